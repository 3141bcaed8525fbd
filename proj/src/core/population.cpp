#include "core/population.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

namespace nowcast {

namespace {

struct SectorInfo {
    Sector sector;
    std::string_view code;
    std::string_view label;
};

constexpr std::array<SectorInfo, kSectorCount> kSectors{{
    {Sector::agriculture_mining, "agriculture_mining",
     "Agriculture, Forestry and Fishing; Mining and Quarrying"},
    {Sector::manufacturing, "manufacturing", "Manufacturing"},
    {Sector::utilities, "utilities",
     "Electricity, gas supply; Water supply, sewerage and waste management"},
    {Sector::construction, "construction", "Construction"},
    {Sector::wholesale_retail, "wholesale_retail",
     "Wholesale and Retail Trade; Repair of Motor Vehicles and motorcycles"},
    {Sector::transport_storage, "transport_storage", "Transportation and storage"},
    {Sector::accommodation_food, "accommodation_food", "Accommodation and food service activities"},
    {Sector::information_communication, "information_communication",
     "Information and communication activities"},
    {Sector::financial_insurance, "financial_insurance", "Financial and insurance activities"},
    {Sector::real_estate, "real_estate", "Real Estate activities"},
    {Sector::professional_scientific, "professional_scientific",
     "Professional, Scientific and Technical activities"},
    {Sector::administrative_support, "administrative_support",
     "Administrative and support service activities"},
    {Sector::public_administration, "public_administration",
     "Public Administration And Defence; Compulsory Social Security"},
    {Sector::education, "education", "Education"},
    {Sector::health_social_work, "health_social_work", "Human Health And Social Work activities"},
    {Sector::arts_entertainment, "arts_entertainment", "Arts, entertainment and recreation"},
    {Sector::other_sectors, "other_sectors", "Other Sectors"},
}};

template <class Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::pair<Enum, std::string_view>, N> &table,
                           std::string_view text) {
    for (const auto &[value, name] : table) {
        if (name == text) {
            return value;
        }
    }
    return std::nullopt;
}

template <class Enum, std::size_t N>
std::string_view name_of(const std::array<std::pair<Enum, std::string_view>, N> &table, Enum value) {
    for (const auto &[v, name] : table) {
        if (v == value) {
            return name;
        }
    }
    return "?";
}

constexpr std::array<std::pair<Sex, std::string_view>, 2> kSex{{{Sex::male, "male"}, {Sex::female, "female"}}};
constexpr std::array<std::pair<Education, std::string_view>, 3> kEducation{
    {{Education::primary, "primary"}, {Education::secondary, "secondary"}, {Education::university, "university"}}};
constexpr std::array<std::pair<Region, std::string_view>, 2> kRegion{
    {{Region::southern_eastern, "southern_eastern"}, {Region::border_midland_western, "border_midland_western"}}};
constexpr std::array<std::pair<WorkStatus, std::string_view>, 7> kWorkStatus{{
    {WorkStatus::employee, "employee"},
    {WorkStatus::self_employed, "self_employed"},
    {WorkStatus::unemployed, "unemployed"},
    {WorkStatus::retired, "retired"},
    {WorkStatus::inactive, "inactive"},
    {WorkStatus::student, "student"},
    {WorkStatus::child, "child"},
}};
constexpr std::array<std::pair<CovidState, std::string_view>, 4> kCovidState{{
    {CovidState::none, "none"},
    {CovidState::pup_recipient, "pup_recipient"},
    {CovidState::ceib_recipient, "ceib_recipient"},
    {CovidState::wage_subsidised, "wage_subsidised"},
}};
constexpr std::array<std::pair<Tenure, std::string_view>, 3> kTenure{
    {{Tenure::owner_outright, "owner_outright"}, {Tenure::mortgage, "mortgage"}, {Tenure::renter, "renter"}}};

const std::vector<std::string_view> kHouseholdColumns{
    "household_id", "weight", "member_ids", "tenure", "mortgage_payment", "rent",
    "childcare_user", "childcare_expenditure", "n_children_0_4", "n_children_under14"};

const std::vector<std::string_view> kPersonColumns{
    "person_id", "household_id", "age", "sex", "education", "occupation", "industry", "region",
    "work_status", "employment_income", "self_employment_income", "capital_income",
    "private_pension", "essential_worker", "home_work_capable", "covid_state"};

// Collects per-field parse problems for one table.
class FieldReader {
  public:
    FieldReader(const DelimitedTable &table, std::vector<Issue> &issues) : table_(table), issues_(issues) {}

    template <class T, class Parse>
    T get(const DelimitedTable::Row &row, std::string_view column, Parse parse, std::string_view expected,
          T fallback = T{}) {
        const auto &text = table_.field(row, column);
        auto value = parse(text);
        if (!value) {
            issues_.push_back(Issue{table_.source(), row.line, std::string(column),
                                    "invalid value '" + text + "' (expected " + std::string(expected) + ")"});
            return fallback;
        }
        return *value;
    }

  private:
    const DelimitedTable &table_;
    std::vector<Issue> &issues_;
};

std::optional<Money> parse_money_field(std::string_view text) { return Money::parse(text); }

std::optional<long long> parse_int_field(std::string_view text) { return parse_integer(text); }

std::optional<bool> parse_bool_field(std::string_view text) { return parse_bool(text); }

std::optional<double> parse_double_field(std::string_view text) { return parse_double(text); }

std::optional<std::vector<PersonId>> parse_member_ids(std::string_view text) {
    std::vector<PersonId> ids;
    if (trim(text).empty()) {
        return ids;
    }
    for (const auto &part : split(text, ';')) {
        auto id = parse_integer(part);
        if (!id) {
            return std::nullopt;
        }
        ids.push_back(*id);
    }
    return ids;
}

std::string bool_text(bool value) { return value ? "true" : "false"; }

} // namespace

const std::array<Sector, kSectorCount> &all_sectors() {
    static const std::array<Sector, kSectorCount> sectors = [] {
        std::array<Sector, kSectorCount> out{};
        for (std::size_t i = 0; i < kSectorCount; ++i) {
            out[i] = kSectors[i].sector;
        }
        return out;
    }();
    return sectors;
}

std::string_view sector_code(Sector sector) { return kSectors[static_cast<std::size_t>(sector)].code; }
std::string_view sector_label(Sector sector) { return kSectors[static_cast<std::size_t>(sector)].label; }

std::optional<Sector> parse_sector(std::string_view code) {
    for (const auto &info : kSectors) {
        if (info.code == code) {
            return info.sector;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Sex value) { return name_of(kSex, value); }
std::string_view to_string(Education value) { return name_of(kEducation, value); }
std::string_view to_string(Region value) { return name_of(kRegion, value); }
std::string_view to_string(WorkStatus value) { return name_of(kWorkStatus, value); }
std::string_view to_string(CovidState value) { return name_of(kCovidState, value); }
std::string_view to_string(Tenure value) { return name_of(kTenure, value); }

std::optional<Sex> parse_sex(std::string_view text) { return lookup(kSex, text); }
std::optional<Education> parse_education(std::string_view text) { return lookup(kEducation, text); }
std::optional<Region> parse_region(std::string_view text) { return lookup(kRegion, text); }
std::optional<WorkStatus> parse_work_status(std::string_view text) {
    if (text == "self-employed") {
        return WorkStatus::self_employed;
    }
    return lookup(kWorkStatus, text);
}
std::optional<CovidState> parse_covid_state(std::string_view text) { return lookup(kCovidState, text); }
std::optional<Tenure> parse_tenure(std::string_view text) { return lookup(kTenure, text); }

std::vector<Issue> check_population(const std::vector<Household> &households,
                                    const std::vector<Person> &persons) {
    std::vector<Issue> issues;
    const std::string hh_src = "households";
    const std::string p_src = "persons";

    std::unordered_map<HouseholdId, std::size_t> household_index;
    for (std::size_t h = 0; h < households.size(); ++h) {
        const auto &hh = households[h];
        const auto id = std::to_string(hh.household_id);
        if (!household_index.emplace(hh.household_id, h).second) {
            issues.push_back(Issue{hh_src, 0, "household_id", "duplicate household_id " + id});
        }
        if (!(hh.weight > 0.0)) {
            issues.push_back(Issue{hh_src, 0, "weight", "household " + id + " has non-positive weight"});
        }
        if ((hh.mortgage_payment > Money{}) != (hh.tenure == Tenure::mortgage)) {
            issues.push_back(Issue{hh_src, 0, "mortgage_payment",
                                   "household " + id + ": mortgage_payment > 0 must coincide with tenure mortgage"});
        }
        if (hh.mortgage_payment < Money{} || hh.rent < Money{} || hh.childcare_expenditure < Money{}) {
            issues.push_back(Issue{hh_src, 0, "", "household " + id + " has a negative cost"});
        }
        if (hh.childcare_expenditure > Money{} && !hh.childcare_user) {
            issues.push_back(Issue{hh_src, 0, "childcare_expenditure",
                                   "household " + id + ": childcare expenditure without childcare_user"});
        }
        if (hh.n_children_0_4 < 0 || hh.n_children_under14 < 0) {
            issues.push_back(Issue{hh_src, 0, "", "household " + id + " has a negative child count"});
        }
        if (hh.member_ids.empty()) {
            issues.push_back(Issue{hh_src, 0, "member_ids", "household " + id + " has no members"});
        }
    }

    std::unordered_map<PersonId, std::size_t> person_index;
    for (std::size_t i = 0; i < persons.size(); ++i) {
        const auto &p = persons[i];
        const auto id = std::to_string(p.person_id);
        if (!person_index.emplace(p.person_id, i).second) {
            issues.push_back(Issue{p_src, 0, "person_id", "duplicate person_id " + id});
        }
        if (p.age < 0) {
            issues.push_back(Issue{p_src, 0, "age", "person " + id + " has negative age"});
        }
        if (p.employment_income > Money{} && p.work_status != WorkStatus::employee) {
            issues.push_back(Issue{p_src, 0, "employment_income",
                                   "person " + id + " has employment income but is not an employee"});
        }
        if (p.employment_income < Money{} || p.capital_income < Money{} || p.private_pension < Money{}) {
            issues.push_back(Issue{p_src, 0, "", "person " + id + " has a negative employment, capital or pension income"});
        }
        if (p.covid_state == CovidState::pup_recipient && (p.age < 18 || p.age > 66)) {
            issues.push_back(Issue{p_src, 0, "covid_state", "person " + id + " receives PUP outside ages 18-66"});
        }
        if (p.is_worker() && !p.industry) {
            issues.push_back(Issue{p_src, 0, "industry", "person " + id + " works but has no industry"});
        }
        if (p.occupation < 0 || p.occupation > 9) {
            issues.push_back(Issue{p_src, 0, "occupation", "person " + id + " has occupation outside 0..9"});
        }
        if (!household_index.contains(p.household_id)) {
            issues.push_back(Issue{p_src, 0, "household_id",
                                   "person " + id + " references missing household " +
                                       std::to_string(p.household_id)});
        }
    }

    std::unordered_map<PersonId, HouseholdId> claimed;
    for (const auto &hh : households) {
        for (const auto member : hh.member_ids) {
            const auto it = person_index.find(member);
            if (it == person_index.end()) {
                issues.push_back(Issue{hh_src, 0, "member_ids",
                                       "household " + std::to_string(hh.household_id) +
                                           " lists unknown person " + std::to_string(member)});
                continue;
            }
            if (!claimed.emplace(member, hh.household_id).second) {
                issues.push_back(Issue{hh_src, 0, "member_ids",
                                       "person " + std::to_string(member) + " is listed by more than one household"});
            }
            if (persons[it->second].household_id != hh.household_id) {
                issues.push_back(Issue{p_src, 0, "household_id",
                                       "person " + std::to_string(member) + " is listed by household " +
                                           std::to_string(hh.household_id) + " but references household " +
                                           std::to_string(persons[it->second].household_id)});
            }
        }
    }
    for (const auto &p : persons) {
        if (household_index.contains(p.household_id) && !claimed.contains(p.person_id)) {
            issues.push_back(Issue{p_src, 0, "household_id",
                                   "person " + std::to_string(p.person_id) + " is not listed by household " +
                                       std::to_string(p.household_id)});
        }
    }
    return issues;
}

Population::Population(std::vector<Household> households, std::vector<Person> persons, Date base_period)
    : households_(std::move(households)), persons_(std::move(persons)), base_period_(base_period) {
    auto issues = check_population(households_, persons_);
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    for (std::size_t i = 0; i < persons_.size(); ++i) {
        person_index_.emplace(persons_[i].person_id, i);
    }
    members_.resize(households_.size());
    household_of_.resize(persons_.size());
    for (std::size_t h = 0; h < households_.size(); ++h) {
        household_index_.emplace(households_[h].household_id, h);
        for (const auto member : households_[h].member_ids) {
            const auto index = person_index_.at(member);
            members_[h].push_back(index);
            household_of_[index] = h;
        }
    }
}

std::size_t Population::person_index(PersonId id) const {
    const auto it = person_index_.find(id);
    if (it == person_index_.end()) {
        throw DomainError("unknown person " + std::to_string(id));
    }
    return it->second;
}

std::size_t Population::household_index(HouseholdId id) const {
    const auto it = household_index_.find(id);
    if (it == household_index_.end()) {
        throw DomainError("unknown household " + std::to_string(id));
    }
    return it->second;
}

namespace {

std::vector<Household> read_households(const DelimitedTable &table, std::vector<Issue> &issues) {
    FieldReader r(table, issues);
    std::vector<Household> out;
    for (const auto &row : table.rows()) {
        Household hh;
        hh.household_id = r.get<long long>(row, "household_id", parse_int_field, "integer");
        hh.weight = r.get<double>(row, "weight", parse_double_field, "real", 0.0);
        if (!(hh.weight > 0.0)) {
            issues.push_back(Issue{table.source(), row.line, "weight",
                                   "household " + std::to_string(hh.household_id) + " has non-positive weight"});
            hh.weight = 1.0; // reported; keep the row for referential checks
        }
        hh.member_ids = r.get<std::vector<PersonId>>(row, "member_ids", parse_member_ids, "';'-separated ids");
        hh.tenure = r.get<Tenure>(row, "tenure", parse_tenure, "owner_outright|mortgage|renter");
        hh.mortgage_payment = r.get<Money>(row, "mortgage_payment", parse_money_field, "decimal euros");
        hh.rent = r.get<Money>(row, "rent", parse_money_field, "decimal euros");
        hh.childcare_user = r.get<bool>(row, "childcare_user", parse_bool_field, "true|false");
        hh.childcare_expenditure = r.get<Money>(row, "childcare_expenditure", parse_money_field, "decimal euros");
        hh.n_children_0_4 = static_cast<int>(r.get<long long>(row, "n_children_0_4", parse_int_field, "integer"));
        hh.n_children_under14 =
            static_cast<int>(r.get<long long>(row, "n_children_under14", parse_int_field, "integer"));
        out.push_back(std::move(hh));
    }
    return out;
}

std::vector<Person> read_persons(const DelimitedTable &table, std::vector<Issue> &issues) {
    FieldReader r(table, issues);
    std::vector<Person> out;
    const auto parse_industry = [](std::string_view text) -> std::optional<std::optional<Sector>> {
        if (text.empty() || text == "none") {
            return std::optional<Sector>{};
        }
        if (auto s = parse_sector(text)) {
            return std::optional<Sector>{*s};
        }
        return std::nullopt;
    };
    for (const auto &row : table.rows()) {
        Person p;
        p.person_id = r.get<long long>(row, "person_id", parse_int_field, "integer");
        p.household_id = r.get<long long>(row, "household_id", parse_int_field, "integer");
        p.age = static_cast<int>(r.get<long long>(row, "age", parse_int_field, "integer"));
        p.sex = r.get<Sex>(row, "sex", parse_sex, "male|female");
        p.education = r.get<Education>(row, "education", parse_education, "primary|secondary|university");
        p.occupation = static_cast<int>(r.get<long long>(row, "occupation", parse_int_field, "integer 0..9"));
        p.industry = r.get<std::optional<Sector>>(row, "industry", parse_industry, "sector code or empty");
        p.region = r.get<Region>(row, "region", parse_region, "southern_eastern|border_midland_western");
        p.work_status = r.get<WorkStatus>(row, "work_status", parse_work_status, "work status");
        p.employment_income = r.get<Money>(row, "employment_income", parse_money_field, "decimal euros");
        p.self_employment_income = r.get<Money>(row, "self_employment_income", parse_money_field, "decimal euros");
        p.capital_income = r.get<Money>(row, "capital_income", parse_money_field, "decimal euros");
        p.private_pension = r.get<Money>(row, "private_pension", parse_money_field, "decimal euros");
        p.essential_worker = r.get<bool>(row, "essential_worker", parse_bool_field, "true|false");
        p.home_work_capable = r.get<bool>(row, "home_work_capable", parse_bool_field, "true|false");
        p.covid_state = r.get<CovidState>(row, "covid_state", parse_covid_state, "covid state");
        out.push_back(p);
    }
    return out;
}

// Re-attributes record-level issues to the file row they came from.
void attach_rows(std::vector<Issue> &issues, const DelimitedTable &hh_table, const DelimitedTable &p_table,
                 const std::vector<Household> &households, const std::vector<Person> &persons) {
    for (auto &issue : issues) {
        if (issue.row != 0) {
            continue;
        }
        const bool is_household = issue.source == "households";
        const auto &table = is_household ? hh_table : p_table;
        issue.source = table.source();
        // The message always names the record id as its second word.
        std::istringstream words(issue.message);
        std::string kind, id_text;
        words >> kind >> id_text;
        const auto id = parse_integer(id_text);
        if (!id) {
            continue;
        }
        if (kind == "household") {
            for (std::size_t i = 0; i < households.size(); ++i) {
                if (households[i].household_id == *id) {
                    issue.row = hh_table.rows()[i].line;
                    issue.source = hh_table.source();
                    break;
                }
            }
        } else if (kind == "person") {
            for (std::size_t i = 0; i < persons.size(); ++i) {
                if (persons[i].person_id == *id) {
                    issue.row = p_table.rows()[i].line;
                    issue.source = p_table.source();
                    break;
                }
            }
        }
    }
}

} // namespace

Population load_population(const std::filesystem::path &dir) {
    const auto hh_path = dir / "households.csv";
    const auto p_path = dir / "persons.csv";
    const auto hh_table = DelimitedTable::read(hh_path);
    const auto p_table = DelimitedTable::read(p_path);

    std::vector<Issue> issues;
    for (const auto *table : {&hh_table, &p_table}) {
        const auto &columns = table == &hh_table ? kHouseholdColumns : kPersonColumns;
        for (auto name : columns) {
            if (!table->column(name)) {
                issues.push_back(Issue{table->source(), 1, std::string(name), "missing column"});
            }
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }

    Date base_period = make_date(2019, 12, 31);
    for (const auto &[key, value] : hh_table.directives()) {
        if (key == "base_period") {
            if (auto date = parse_date(value)) {
                base_period = *date;
            } else {
                issues.push_back(Issue{hh_table.source(), 0, "base_period", "invalid date '" + value + "'"});
            }
        }
    }

    auto households = read_households(hh_table, issues);
    auto persons = read_persons(p_table, issues);
    auto structural = check_population(households, persons);
    attach_rows(structural, hh_table, p_table, households, persons);
    // Weight problems were already reported with their row by the reader.
    for (auto &issue : structural) {
        issues.push_back(std::move(issue));
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return Population(std::move(households), std::move(persons), base_period);
}

std::string households_csv(const Population &population) {
    std::ostringstream out;
    out << "# base_period=" << format_date(population.base_period()) << '\n';
    for (std::size_t i = 0; i < kHouseholdColumns.size(); ++i) {
        out << (i ? "," : "") << kHouseholdColumns[i];
    }
    out << '\n';
    for (const auto &hh : population.households()) {
        std::string members;
        for (const auto id : hh.member_ids) {
            if (!members.empty()) {
                members += ';';
            }
            members += std::to_string(id);
        }
        char weight[32];
        std::snprintf(weight, sizeof weight, "%.17g", hh.weight);
        out << hh.household_id << ',' << weight << ',' << members << ',' << to_string(hh.tenure) << ','
            << hh.mortgage_payment.str() << ',' << hh.rent.str() << ',' << bool_text(hh.childcare_user) << ','
            << hh.childcare_expenditure.str() << ',' << hh.n_children_0_4 << ',' << hh.n_children_under14 << '\n';
    }
    return out.str();
}

std::string persons_csv(const Population &population) {
    std::ostringstream out;
    for (std::size_t i = 0; i < kPersonColumns.size(); ++i) {
        out << (i ? "," : "") << kPersonColumns[i];
    }
    out << '\n';
    for (const auto &p : population.persons()) {
        out << p.person_id << ',' << p.household_id << ',' << p.age << ',' << to_string(p.sex) << ','
            << to_string(p.education) << ',' << p.occupation << ','
            << (p.industry ? sector_code(*p.industry) : std::string_view{}) << ',' << to_string(p.region) << ','
            << to_string(p.work_status) << ',' << p.employment_income.str() << ','
            << p.self_employment_income.str() << ',' << p.capital_income.str() << ','
            << p.private_pension.str() << ',' << bool_text(p.essential_worker) << ','
            << bool_text(p.home_work_capable) << ',' << to_string(p.covid_state) << '\n';
    }
    return out.str();
}

void save_population(const Population &population, const std::filesystem::path &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    const auto write = [](const std::filesystem::path &path, const std::string &text) {
        std::ofstream out(path, std::ios::binary);
        out << text;
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
    };
    write(dir / "households.csv", households_csv(population));
    write(dir / "persons.csv", persons_csv(population));
}

} // namespace nowcast
