#include "core/synth.hpp"

#include "core/error.hpp"
#include "core/delimited.hpp"
#include "core/keyvalue.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nowcast {

namespace {

// Reference employment structure (thousands) used for default sector shares.
constexpr std::array<double, kSectorCount> kDefaultEmployment{
    110, 275, 25, 150, 310, 110, 180, 130, 110, 15, 150, 100, 110, 190, 290, 45, 75};
constexpr std::array<double, kSectorCount> kDefaultEssential{
    0.90, 0.60, 0.90, 0.20, 0.45, 0.70, 0.10, 0.30, 0.35, 0.20, 0.30, 0.35, 0.45, 0.30, 0.90, 0.10, 0.30};
constexpr std::array<double, kSectorCount> kDefaultIncomeMu{
    10.15, 10.65, 10.95, 10.45, 10.15, 10.45, 9.75, 11.05, 11.05, 10.55, 10.85, 10.25, 10.75, 10.65, 10.45, 9.95, 10.05};
constexpr std::array<double, kSectorCount> kDefaultIncomeSigma{
    0.60, 0.55, 0.45, 0.55, 0.65, 0.50, 0.60, 0.55, 0.60, 0.60, 0.60, 0.60, 0.40, 0.45, 0.50, 0.65, 0.60};
constexpr std::array<double, 9> kOccupationWeights{0.12, 0.19, 0.13, 0.12, 0.14, 0.05, 0.09, 0.09, 0.07};
const std::array<std::string_view, 6> kEmploymentBands{"18_24", "25_34", "35_44", "45_54", "55_65", "66_plus"};
const std::array<std::string_view, 6> kCompositionNames{"single", "couple", "couple_children",
                                                       "lone_parent", "three_adults", "three_adults_children"};
const std::array<std::string_view, 3> kTenureNames{"owner_outright", "mortgage", "renter"};

int employment_band(int age) {
    if (age < 25) return 0;
    if (age < 35) return 1;
    if (age < 45) return 2;
    if (age < 55) return 3;
    if (age < 66) return 4;
    return 5;
}

// Sequential generator on top of the keyed stream.
class Draws {
  public:
    explicit Draws(std::uint64_t seed) : stream_(seed, 0, "synthetic-population") {}

    double uniform() { return stream_.uniform(); }
    bool bernoulli(double p) { return stream_.uniform() < p; }
    double lognormal(double median, double sigma) { return median * std::exp(sigma * stream_.normal()); }
    int integer(int lo, int hi) { // inclusive
        const auto span = static_cast<std::uint64_t>(hi - lo + 1);
        return lo + static_cast<int>(stream_.next() % span);
    }
    template <std::size_t N>
    std::size_t categorical(const std::array<double, N> &weights) {
        const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
        double u = stream_.uniform() * total;
        for (std::size_t i = 0; i < N; ++i) {
            if (u < weights[i]) {
                return i;
            }
            u -= weights[i];
        }
        return N - 1;
    }

  private:
    KeyedStream stream_;
};

int draw_adult_age(Draws &draws) {
    // Adult age structure (18+), by five-year-ish bands.
    static constexpr std::array<double, 8> weights{0.10, 0.15, 0.18, 0.17, 0.15, 0.12, 0.08, 0.05};
    static constexpr std::array<int, 9> edges{18, 25, 35, 45, 55, 65, 72, 80, 90};
    const auto band = draws.categorical(weights);
    return draws.integer(edges[band], edges[band + 1] - 1);
}

int draw_parent_age(Draws &draws) { return draws.integer(24, 52); }

void check_share(std::vector<Issue> &issues, const std::string &source, std::size_t line, const std::string &key,
                 double value) {
    if (value < 0.0 || value > 1.0) {
        issues.push_back(Issue{source, line, key, "share must lie in [0, 1]"});
    }
}

} // namespace

SynthConfig SynthConfig::defaults() {
    SynthConfig config;
    const double total = std::accumulate(kDefaultEmployment.begin(), kDefaultEmployment.end(), 0.0);
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        config.sector_shares[s] = kDefaultEmployment[s] / total;
    }
    config.essential_shares = kDefaultEssential;
    config.income_mu = kDefaultIncomeMu;
    config.income_sigma = kDefaultIncomeSigma;
    return config;
}

SynthConfig parse_synth_config(std::string_view text, std::string source) {
    const auto file = KeyValueFile::parse(text, source);
    SynthConfig config = SynthConfig::defaults();
    std::vector<Issue> issues;
    std::array<bool, kSectorCount> fixed{};

    const auto number = [&](const KeyValueFile::Entry &entry) -> std::optional<double> {
        auto v = parse_double(entry.value);
        if (!v) {
            issues.push_back(Issue{source, entry.line, entry.key, "expected a number, got '" + entry.value + "'"});
        }
        return v;
    };

    for (const auto &section : file.sections()) {
        if (!section.name.empty()) {
            issues.push_back(Issue{source, section.line, section.name, "sections are not used in synth config"});
        }
        for (const auto &entry : section.entries) {
            const auto &key = entry.key;
            const auto dot = key.find('.');
            const std::string head = key.substr(0, dot);
            const std::string tail = dot == std::string::npos ? "" : key.substr(dot + 1);

            if (key == "households") {
                auto v = parse_integer(entry.value);
                if (!v) {
                    issues.push_back(Issue{source, entry.line, key, "expected an integer"});
                } else {
                    config.households = static_cast<int>(*v);
                }
            } else if (key == "base_period") {
                if (auto d = parse_date(entry.value)) {
                    config.base_period = *d;
                } else {
                    issues.push_back(Issue{source, entry.line, key, "expected YYYY-MM-DD"});
                }
            } else if (key == "perturb_weights") {
                if (auto b = parse_bool(entry.value)) {
                    config.perturb_weights = *b;
                } else {
                    issues.push_back(Issue{source, entry.line, key, "expected true/false"});
                }
            } else if (head == "sector" || head == "essential" || head == "income_mu" || head == "income_sigma") {
                const auto sector = parse_sector(tail);
                if (!sector) {
                    issues.push_back(Issue{source, entry.line, key, "unknown sector '" + tail + "'"});
                    continue;
                }
                const auto s = static_cast<std::size_t>(*sector);
                const auto v = number(entry);
                if (!v) {
                    continue;
                }
                if (head == "sector") {
                    check_share(issues, source, entry.line, key, *v);
                    config.sector_shares[s] = *v;
                    fixed[s] = true;
                } else if (head == "essential") {
                    check_share(issues, source, entry.line, key, *v);
                    config.essential_shares[s] = *v;
                } else if (head == "income_mu") {
                    config.income_mu[s] = *v;
                } else if (!(*v >= 0.0)) {
                    issues.push_back(Issue{source, entry.line, key, "scale must be non-negative"});
                } else {
                    config.income_sigma[s] = *v;
                }
            } else if (head == "employment_rate" || head == "composition" || head == "tenure") {
                std::size_t index = 99;
                if (head == "employment_rate") {
                    for (std::size_t i = 0; i < kEmploymentBands.size(); ++i) {
                        if (kEmploymentBands[i] == tail) index = i;
                    }
                } else if (head == "composition") {
                    for (std::size_t i = 0; i < kCompositionNames.size(); ++i) {
                        if (kCompositionNames[i] == tail) index = i;
                    }
                } else {
                    for (std::size_t i = 0; i < kTenureNames.size(); ++i) {
                        if (kTenureNames[i] == tail) index = i;
                    }
                }
                const auto v = number(entry);
                if (index == 99) {
                    issues.push_back(Issue{source, entry.line, key, "unknown key"});
                } else if (v) {
                    check_share(issues, source, entry.line, key, *v);
                    if (head == "employment_rate") config.employment_rate[index] = *v;
                    else if (head == "composition") config.composition[index] = *v;
                    else config.tenure[index] = *v;
                }
            } else {
                struct Scalar {
                    std::string_view name;
                    double SynthConfig::*field;
                    bool is_share;
                };
                static const std::array<Scalar, 13> scalars{{
                    {"self_employed_share", &SynthConfig::self_employed_share, true},
                    {"unemployed_share", &SynthConfig::unemployed_share, true},
                    {"university_share", &SynthConfig::university_share, true},
                    {"bmw_region_share", &SynthConfig::bmw_region_share, true},
                    {"mortgage_median", &SynthConfig::mortgage_median, false},
                    {"rent_median", &SynthConfig::rent_median, false},
                    {"childcare_rate_under5", &SynthConfig::childcare_rate_under5, true},
                    {"childcare_rate_school_age", &SynthConfig::childcare_rate_school_age, true},
                    {"childcare_median", &SynthConfig::childcare_median, false},
                    {"capital_income_rate", &SynthConfig::capital_income_rate, true},
                    {"capital_income_median", &SynthConfig::capital_income_median, false},
                    {"private_pension_rate", &SynthConfig::private_pension_rate, true},
                    {"private_pension_median", &SynthConfig::private_pension_median, false},
                }};
                const auto it = std::find_if(scalars.begin(), scalars.end(),
                                             [&](const Scalar &s) { return s.name == key; });
                if (it == scalars.end()) {
                    issues.push_back(Issue{source, entry.line, key, "unknown key"});
                    continue;
                }
                if (const auto v = number(entry)) {
                    if (it->is_share) {
                        check_share(issues, source, entry.line, key, *v);
                    } else if (!(*v > 0.0)) {
                        issues.push_back(Issue{source, entry.line, key, "must be positive"});
                    }
                    config.*(it->field) = *v;
                }
            }
        }
    }

    double fixed_total = 0.0;
    double free_total = 0.0;
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        (fixed[s] ? fixed_total : free_total) += config.sector_shares[s];
    }
    if (fixed_total > 1.0 + 1e-9) {
        issues.push_back(Issue{source, 0, "sector", "configured sector shares sum to more than 1"});
    } else if (free_total > 0.0) {
        for (std::size_t s = 0; s < kSectorCount; ++s) {
            if (!fixed[s]) {
                config.sector_shares[s] *= (1.0 - fixed_total) / free_total;
            }
        }
    } else if (std::abs(fixed_total - 1.0) > 1e-9) {
        issues.push_back(Issue{source, 0, "sector", "sector shares must sum to 1"});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return config;
}

SynthConfig load_synth_config(const std::filesystem::path &path) {
    return parse_synth_config(read_text_file(path), path.filename().string());
}

std::string render_synth_config(const SynthConfig &config) {
    std::ostringstream out;
    out.precision(10);
    out << "households = " << config.households << '\n';
    out << "base_period = " << format_date(config.base_period) << '\n';
    out << "perturb_weights = " << (config.perturb_weights ? "true" : "false") << '\n';
    for (const auto sector : all_sectors()) {
        const auto s = static_cast<std::size_t>(sector);
        out << "sector." << sector_code(sector) << " = " << config.sector_shares[s] << '\n';
    }
    for (const auto sector : all_sectors()) {
        const auto s = static_cast<std::size_t>(sector);
        out << "essential." << sector_code(sector) << " = " << config.essential_shares[s] << '\n';
        out << "income_mu." << sector_code(sector) << " = " << config.income_mu[s] << '\n';
        out << "income_sigma." << sector_code(sector) << " = " << config.income_sigma[s] << '\n';
    }
    for (std::size_t i = 0; i < kEmploymentBands.size(); ++i) {
        out << "employment_rate." << kEmploymentBands[i] << " = " << config.employment_rate[i] << '\n';
    }
    for (std::size_t i = 0; i < kCompositionNames.size(); ++i) {
        out << "composition." << kCompositionNames[i] << " = " << config.composition[i] << '\n';
    }
    for (std::size_t i = 0; i < kTenureNames.size(); ++i) {
        out << "tenure." << kTenureNames[i] << " = " << config.tenure[i] << '\n';
    }
    out << "self_employed_share = " << config.self_employed_share << '\n'
        << "unemployed_share = " << config.unemployed_share << '\n'
        << "university_share = " << config.university_share << '\n'
        << "bmw_region_share = " << config.bmw_region_share << '\n'
        << "mortgage_median = " << config.mortgage_median << '\n'
        << "rent_median = " << config.rent_median << '\n'
        << "childcare_rate_under5 = " << config.childcare_rate_under5 << '\n'
        << "childcare_rate_school_age = " << config.childcare_rate_school_age << '\n'
        << "childcare_median = " << config.childcare_median << '\n'
        << "capital_income_rate = " << config.capital_income_rate << '\n'
        << "capital_income_median = " << config.capital_income_median << '\n'
        << "private_pension_rate = " << config.private_pension_rate << '\n'
        << "private_pension_median = " << config.private_pension_median << '\n';
    return out.str();
}

Population generate_synthetic(const SynthConfig &config, std::uint64_t seed) {
    if (config.households <= 0) {
        throw ValidationError("synthetic household count must be positive, got " +
                              std::to_string(config.households));
    }
    Draws draws(seed);
    std::vector<Household> households;
    std::vector<Person> persons;
    households.reserve(static_cast<std::size_t>(config.households));
    PersonId next_person = 1;

    for (int h = 1; h <= config.households; ++h) {
        Household hh;
        hh.household_id = h;
        hh.weight = config.perturb_weights ? 0.5 + draws.uniform() : 1.0;
        const auto kind = draws.categorical(config.composition);
        const Region region = draws.bernoulli(config.bmw_region_share) ? Region::border_midland_western
                                                                       : Region::southern_eastern;

        std::vector<int> adult_ages;
        std::vector<int> child_ages;
        switch (kind) {
        case 0:
            adult_ages = {draw_adult_age(draws)};
            break;
        case 1: {
            const int a = draw_adult_age(draws);
            adult_ages = {a, std::max(18, a + draws.integer(-5, 5))};
            break;
        }
        case 2: {
            const int a = draw_parent_age(draws);
            adult_ages = {a, std::max(18, a + draws.integer(-4, 4))};
            child_ages.resize(draws.categorical(std::array<double, 3>{0.4, 0.4, 0.2}) + 1);
            break;
        }
        case 3:
            adult_ages = {draw_parent_age(draws)};
            child_ages.resize(static_cast<std::size_t>(draws.integer(1, 2)));
            break;
        case 4:
            adult_ages = {draw_adult_age(draws), draw_adult_age(draws), draws.integer(18, 30)};
            break;
        default: {
            const int a = draw_parent_age(draws);
            adult_ages = {a, std::max(18, a + draws.integer(-4, 4)), draws.integer(60, 85)};
            child_ages.resize(static_cast<std::size_t>(draws.integer(1, 4)));
            break;
        }
        }
        const int youngest_parent = adult_ages.front();
        for (auto &age : child_ages) {
            age = draws.integer(0, std::min(17, std::max(0, youngest_parent - 18)));
        }

        const auto make_person = [&](int age) {
            Person p;
            p.person_id = next_person++;
            p.household_id = hh.household_id;
            p.age = age;
            p.sex = draws.bernoulli(0.5) ? Sex::male : Sex::female;
            p.region = region;
            return p;
        };

        for (const int age : adult_ages) {
            Person p = make_person(age);
            const double u_edu = draws.uniform();
            p.education = u_edu < config.university_share ? Education::university
                          : u_edu < config.university_share + 0.45 ? Education::secondary
                                                                   : Education::primary;
            if (draws.bernoulli(config.employment_rate[static_cast<std::size_t>(employment_band(age))])) {
                p.work_status = draws.bernoulli(config.self_employed_share) ? WorkStatus::self_employed
                                                                            : WorkStatus::employee;
            } else if (age >= 66) {
                p.work_status = WorkStatus::retired;
            } else if (age < 25 && draws.bernoulli(0.5)) {
                p.work_status = WorkStatus::student;
            } else {
                p.work_status = draws.bernoulli(config.unemployed_share) ? WorkStatus::unemployed
                                                                         : WorkStatus::inactive;
            }
            if (draws.bernoulli(config.capital_income_rate)) {
                p.capital_income = Money::from_euros(draws.lognormal(config.capital_income_median, 1.0));
            }
            if (p.work_status == WorkStatus::retired && draws.bernoulli(config.private_pension_rate)) {
                p.private_pension = Money::from_euros(draws.lognormal(config.private_pension_median, 0.5));
            }
            hh.member_ids.push_back(p.person_id);
            persons.push_back(p);
        }
        for (const int age : child_ages) {
            Person p = make_person(age);
            p.education = Education::primary;
            p.work_status = age < 16 ? WorkStatus::child : WorkStatus::student;
            hh.member_ids.push_back(p.person_id);
            persons.push_back(p);
            if (age <= 4) ++hh.n_children_0_4;
            if (age < 14) ++hh.n_children_under14;
        }

        hh.tenure = static_cast<Tenure>(draws.categorical(config.tenure));
        if (hh.tenure == Tenure::mortgage) {
            hh.mortgage_payment = Money::from_euros(std::max(150.0, draws.lognormal(config.mortgage_median, 0.35)));
        } else if (hh.tenure == Tenure::renter) {
            hh.rent = Money::from_euros(draws.lognormal(config.rent_median, 0.35));
        }
        const double childcare_rate = hh.n_children_0_4 > 0      ? config.childcare_rate_under5
                                      : hh.n_children_under14 > 0 ? config.childcare_rate_school_age
                                                                  : 0.0;
        if (childcare_rate > 0.0 && draws.bernoulli(childcare_rate)) {
            hh.childcare_user = true;
            hh.childcare_expenditure = Money::from_euros(draws.lognormal(config.childcare_median, 0.6));
        }
        households.push_back(std::move(hh));
    }

    // Sector quotas over workers by largest remainder, then a seeded shuffle,
    // so realised worker shares track the configured shares to one worker.
    std::vector<std::size_t> workers;
    for (std::size_t i = 0; i < persons.size(); ++i) {
        if (persons[i].is_worker()) {
            workers.push_back(i);
        }
    }
    const double n_workers = static_cast<double>(workers.size());
    std::vector<std::size_t> quota(kSectorCount);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        const double exact = config.sector_shares[s] * n_workers;
        quota[s] = static_cast<std::size_t>(std::floor(exact));
        assigned += quota[s];
        remainders.emplace_back(exact - std::floor(exact), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < workers.size(); ++k, ++assigned) {
        ++quota[remainders[k % kSectorCount].second];
    }
    std::vector<Sector> sector_pool;
    sector_pool.reserve(workers.size());
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        sector_pool.insert(sector_pool.end(), quota[s], static_cast<Sector>(s));
    }
    for (std::size_t i = sector_pool.size(); i > 1; --i) {
        std::swap(sector_pool[i - 1], sector_pool[static_cast<std::size_t>(draws.integer(0, static_cast<int>(i) - 1))]);
    }

    for (std::size_t k = 0; k < workers.size(); ++k) {
        Person &p = persons[workers[k]];
        const Sector sector = sector_pool[k];
        const auto s = static_cast<std::size_t>(sector);
        p.industry = sector;
        p.occupation = static_cast<int>(draws.categorical(kOccupationWeights)) + 1;
        // Mild age-earnings profile on top of the sector location.
        const double age_shift = -0.004 * (p.age - 45) * (p.age - 45) / 10.0 + 0.1;
        const double annual = std::exp(config.income_mu[s] + age_shift + config.income_sigma[s] * KeyedStream(seed, p.person_id, "synthetic-income").normal());
        if (p.work_status == WorkStatus::employee) {
            p.employment_income = Money::from_euros(std::max(2000.0, annual));
        } else {
            p.self_employment_income = Money::from_euros(std::max(1000.0, annual * 0.9));
        }
        p.essential_worker = draws.bernoulli(config.essential_shares[s]);
        p.home_work_capable = draws.bernoulli(p.occupation <= 4 ? 0.6 : 0.1);
    }

    return Population(std::move(households), std::move(persons), config.base_period);
}

} // namespace nowcast
