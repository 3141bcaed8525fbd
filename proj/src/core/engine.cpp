#include "core/scenario.hpp"

#include "core/error.hpp"
#include "core/parallel.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nowcast {

namespace {

constexpr double kProbFloor = 1e-9;

double clamp_prob(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

Covariates worker_covariates(const Person &person) {
    Covariates x;
    if (person.essential_worker) x["d_essential_worker"] = 1.0;
    if (person.home_work_capable) x["d_home_work_capable"] = 1.0;
    if (person.education == Education::university) x["d_university"] = 1.0;
    return x;
}

Covariates person_covariates(const Person &person) {
    Covariates x;
    if (person.education == Education::university) x["d_university"] = 1.0;
    if (person.sex == Sex::female) x["d_female"] = 1.0;
    if (person.age >= 35 && person.age < 55) x["d_age_35_54"] = 1.0;
    return x;
}

Money weekly_from_annual(Money annual) { return Money::from_cents((annual.cents() + 26) / 52); }

std::vector<int> member_ages(const Population &population, std::size_t h) {
    std::vector<int> ages;
    for (const auto i : population.members(h)) {
        ages.push_back(population.persons()[i].age);
    }
    return ages;
}

template <class Pred>
std::vector<std::size_t> select_indices(std::size_t n, Pred &&pred) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (pred(i)) {
            out.push_back(i);
        }
    }
    return out;
}

/// Runs align_binary over `candidates` (person indices) and returns the
/// selected indices.
std::vector<std::size_t> align_people(const Population &population, const std::vector<std::size_t> &candidates,
                                      const std::vector<double> *probs, double target, std::uint64_t seed,
                                      const std::string &key) {
    if (target <= 0.0) {
        return {};
    }
    std::vector<BinaryUnit> units;
    units.reserve(candidates.size());
    for (const auto i : candidates) {
        const auto &p = population.persons()[i];
        units.push_back(BinaryUnit{p.person_id, probs ? clamp_prob((*probs)[i]) : 0.5, population.person_weight(i),
                                   std::nullopt});
    }
    std::vector<std::int64_t> chosen;
    try {
        chosen = align_binary(units, target, seed, key);
    } catch (const InfeasibleError &e) {
        throw InfeasibleError(key + ": " + e.what());
    }
    std::vector<std::size_t> out;
    for (const auto i : candidates) {
        if (std::binary_search(chosen.begin(), chosen.end(), population.persons()[i].person_id)) {
            out.push_back(i);
        }
    }
    return out;
}

} // namespace

Engine::Engine(ModelInputs inputs, ControlTotals controls, RunOptions options)
    : inputs_(std::move(inputs)), controls_(std::move(controls)), options_(options) {
    if (!(options_.employer_top_up >= 0.0 && options_.employer_top_up <= 1.0)) {
        throw ValidationError("employer top-up must lie in [0,1]");
    }
}

Population Engine::nowcast_baseline(const Population &population, Date date) const {
    std::vector<Person> persons = population.persons();
    std::vector<Household> households = population.households();
    const auto &at_work = inputs_.coefficients.at("at_work");
    const auto &income_model = inputs_.coefficients.at("log_employment_income");
    const std::uint64_t seed = options_.seed;

    for (std::size_t band = 0; band < kEmploymentBands.size(); ++band) {
        const std::string key = "employment_rate:" + std::string(kEmploymentBands[band]);
        const auto rate = controls_.value(key, date);
        if (!rate) {
            continue;
        }
        const auto candidates = select_indices(persons.size(), [&](std::size_t i) {
            return persons[i].age >= 18 && employment_age_band(persons[i].age) == band;
        });
        if (candidates.empty()) {
            continue;
        }
        std::vector<BinaryUnit> units;
        double total = 0.0;
        for (const auto i : candidates) {
            const auto &p = persons[i];
            const double prob = clamp_prob(logit_prob(at_work, person_covariates(p)));
            KeyedStream stream(seed, p.person_id, "at_work");
            const auto draw = simulate_binary_anchored(prob, p.is_worker(), stream);
            const double weight = population.person_weight(i);
            units.push_back(BinaryUnit{p.person_id, prob, weight, std::clamp(draw.u, kProbFloor, 1.0 - kProbFloor)});
            total += weight;
        }
        std::vector<std::int64_t> chosen;
        try {
            chosen = align_binary(units, *rate * total, seed, key);
        } catch (const InfeasibleError &e) {
            throw InfeasibleError(key + ": " + e.what());
        }
        for (const auto i : candidates) {
            Person &p = persons[i];
            const bool working = std::binary_search(chosen.begin(), chosen.end(), p.person_id);
            if (p.is_worker() && !working) {
                p.work_status = p.age >= 66 ? WorkStatus::retired : WorkStatus::unemployed;
                p.employment_income = Money{};
                p.self_employment_income = Money{};
                p.industry.reset();
                p.occupation = 0;
                p.essential_worker = false;
                p.home_work_capable = false;
                p.covid_state = CovidState::none;
            } else if (!p.is_worker() && working) {
                KeyedStream stream(seed, p.person_id, "new-worker");
                const auto &employment = inputs_.sectors.national_employment;
                const double total_employment = std::accumulate(employment.begin(), employment.end(), 0.0);
                double u = stream.uniform() * total_employment;
                std::size_t s = 0;
                while (s + 1 < kSectorCount && u >= employment[s]) {
                    u -= employment[s];
                    ++s;
                }
                p.work_status = WorkStatus::employee;
                p.industry = static_cast<Sector>(s);
                p.occupation = 1 + std::min(8, static_cast<int>(stream.uniform() * 9.0));
                p.essential_worker = stream.uniform() < inputs_.sectors.essential_share[s];
                p.home_work_capable = stream.uniform() < (p.occupation <= 4 ? 0.6 : 0.1);
                const double log_income = linear_predict(income_model, person_covariates(p)) +
                                          draw_residual(income_model, seed, p.person_id).value;
                p.employment_income = Money::from_euros(std::max(1000.0, std::exp(log_income)));
                p.self_employment_income = Money{};
            }
        }
    }

    const double wage_index = controls_.value_or("wage_index", date, 1.0);
    if (wage_index != 1.0) {
        std::vector<ContinuousUnit> units;
        std::vector<std::size_t> positions;
        for (std::size_t i = 0; i < persons.size(); ++i) {
            if (persons[i].employment_income.cents() > 0) {
                units.push_back(ContinuousUnit{persons[i].person_id, persons[i].employment_income.euros(),
                                               population.person_weight(i)});
                positions.push_back(i);
            }
        }
        if (!units.empty()) {
            double mean = 0.0;
            double total = 0.0;
            for (const auto &u : units) {
                mean += u.weight * u.value;
                total += u.weight;
            }
            const double factor = continuous_factor(units, wage_index * mean / total);
            for (const auto i : positions) {
                persons[i].employment_income = persons[i].employment_income.scaled(factor);
            }
        }
    }
    return Population(std::move(households), std::move(persons), date);
}

BaselineState Engine::prepare(const Population &population) const {
    const auto &persons = population.persons();
    const auto &households = population.households();
    const std::uint64_t seed = options_.seed;
    BaselineState state;
    state.commute.resize(persons.size(), CommuteMode::none);
    state.prev_weekly.resize(persons.size());
    state.job_loss_prob.assign(persons.size(), 0.0);
    state.subsidy_prob.assign(persons.size(), 0.0);

    const auto &public_model = inputs_.coefficients.at("public_transport");
    const auto &private_model = inputs_.coefficients.at("private_transport");
    const auto &job_loss = inputs_.coefficients.at("job_loss");
    const auto &subsidy = inputs_.coefficients.at("wage_subsidy");
    parallel_for(persons.size(), options_.threads, [&](std::size_t i) {
        const auto &p = persons[i];
        state.commute[i] = commute_mode(p, public_model, private_model, seed).mode;
        state.prev_weekly[i] = weekly_from_annual(p.employment_income);
        if (p.is_worker()) {
            const auto x = worker_covariates(p);
            state.job_loss_prob[i] = logit_prob(job_loss, x);
            state.subsidy_prob[i] = logit_prob(subsidy, x);
        }
    });

    // Baseline disposable income ranks households for the childcare cells
    // and the capital-holding quintiles.
    const PolicyState policy{population.base_period(), false, false, false, options_.employer_top_up};
    std::vector<double> eq_disposable(households.size());
    std::vector<double> weights(households.size());
    std::vector<std::int64_t> ids(households.size());
    parallel_for(households.size(), options_.threads, [&](std::size_t h) {
        std::vector<PersonIncome> members;
        for (const auto i : population.members(h)) {
            const auto &p = persons[i];
            members.push_back(PersonIncome{p.age, p.work_status, CovidState::none, p.employment_income,
                                           p.self_employment_income, p.capital_income, p.private_pension,
                                           state.prev_weekly[i]});
        }
        const auto tb = household_T_and_B(members, inputs_.schedules, inputs_.tax, policy);
        const auto ages = member_ages(population, h);
        eq_disposable[h] = equivalize((tb.market + tb.benefits - tb.tax).euros(), ages);
        weights[h] = households[h].weight * static_cast<double>(ages.size());
        ids[h] = households[h].household_id;
    });
    state.household_decile = assign_deciles(eq_disposable, weights, ids);
    state.household_quintile = assign_quintiles(eq_disposable, weights, ids);

    const auto &participation = inputs_.coefficients.at("childcare_participation");
    const auto &expenditure = inputs_.coefficients.at("childcare_expenditure");
    std::vector<ChildcareUnit> units(households.size());
    parallel_for(households.size(), options_.threads, [&](std::size_t h) {
        const auto &hh = households[h];
        ChildcareUnit &unit = units[h];
        unit.id = hh.household_id;
        unit.weight = hh.weight;
        unit.type = family_type(population, h);
        unit.decile = state.household_decile[h];
        if (!unit.type) {
            return;
        }
        int workers = 0;
        int adults = 0;
        for (const auto i : population.members(h)) {
            workers += persons[i].is_worker() ? 1 : 0;
            adults += persons[i].age >= 18 ? 1 : 0;
        }
        const double eq_weekly = eq_disposable[h] * 12.0 / 52.0;
        const double p = clamp_prob(
            logit_prob(participation, childcare_covariates(hh, workers, adults, eq_weekly, true)));
        KeyedStream stream(seed, hh.household_id, "childcare_participation");
        const bool user = simulate_binary_anchored(p, hh.childcare_user, stream).outcome(p);
        if (!user) {
            return;
        }
        const auto x = childcare_covariates(hh, workers, adults, eq_weekly, false);
        const double predicted = linear_predict(expenditure, x);
        const double observed = hh.childcare_expenditure.euros();
        const Residual residual = observed > 0.0 ? recover_residual(expenditure, x, observed)
                                                 : draw_residual(expenditure, seed, hh.household_id);
        unit.expenditure = std::max(0.0, predicted + residual.value);
    });
    calibrate_childcare(units, inputs_.childcare);
    state.childcare_weekly.resize(households.size());
    for (std::size_t h = 0; h < households.size(); ++h) {
        state.childcare_weekly[h] = units[h].expenditure;
    }
    return state;
}

WaveResult Engine::apply_wave(const Population &population, const BaselineState &baseline, const WavePoint &wave,
                              const ControlTotals *override_controls) const {
    const ControlTotals &controls = override_controls ? *override_controls : controls_;
    const auto &persons = population.persons();
    const auto &households = population.households();
    const std::uint64_t seed = options_.seed;
    const Date date = wave.date;
    const std::size_t n = persons.size();

    std::vector<CovidState> states(n, CovidState::none);

    std::array<double, kSectorCount> ratio{};
    for (std::size_t i = 0; i < n; ++i) {
        if (persons[i].is_worker() && persons[i].industry) {
            ratio[static_cast<std::size_t>(*persons[i].industry)] += population.person_weight(i);
        }
    }
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        ratio[s] /= inputs_.sectors.national_employment[s];
    }

    const auto in_sector = [&](std::size_t i, std::size_t s) {
        return persons[i].is_worker() && persons[i].industry && static_cast<std::size_t>(*persons[i].industry) == s;
    };

    // (a) job losses onto PUP, per sector.
    parallel_for(kSectorCount, options_.threads, [&](std::size_t s) {
        const std::string code(sector_code(static_cast<Sector>(s)));
        const double target = controls.value_or("pup:" + code, date, 0.0) * ratio[s];
        const auto candidates = select_indices(n, [&](std::size_t i) {
            return in_sector(i, s) && persons[i].age >= 18 && persons[i].age <= 66;
        });
        for (const auto i : align_people(population, candidates, &baseline.job_loss_prob, target, seed, "pup:" + code)) {
            states[i] = CovidState::pup_recipient;
        }
    });

    // (b) illness benefit: the national total split by the in-work age profile of cases.
    double ceib_total = 0.0;
    for (std::size_t s = 0; s < kSectorCount; ++s) {
        ceib_total += controls.value_or("ceib:" + std::string(sector_code(static_cast<Sector>(s))), date, 0.0) * ratio[s];
    }
    if (ceib_total > 0.0) {
        std::array<double, kCaseAgeBands.size()> cases{};
        double case_total = 0.0;
        for (std::size_t b = 0; b < kCaseAgeBands.size(); ++b) {
            cases[b] = controls.value_or("cases_in_work:" + std::string(kCaseAgeBands[b]), date, 0.0);
            case_total += cases[b];
        }
        if (case_total <= 0.0) {
            throw ValidationError("illness benefit counts at " + format_date(date) +
                                  " need cases_in_work controls to split them by age");
        }
        parallel_for(kCaseAgeBands.size(), options_.threads, [&](std::size_t b) {
            const double target = ceib_total * cases[b] / case_total;
            const auto candidates = select_indices(n, [&](std::size_t i) {
                return case_age_band(persons[i].age) == b && persons[i].is_worker() && states[i] == CovidState::none;
            });
            for (const auto i : align_people(population, candidates, nullptr, target, seed,
                                             "ceib:" + std::string(kCaseAgeBands[b]))) {
                states[i] = CovidState::ceib_recipient;
            }
        });
    }

    // (c) wage subsidy among remaining employees, per sector.
    parallel_for(kSectorCount, options_.threads, [&](std::size_t s) {
        const std::string code(sector_code(static_cast<Sector>(s)));
        const double target = controls.value_or("subsidy:" + code, date, 0.0) * ratio[s];
        const auto candidates = select_indices(n, [&](std::size_t i) {
            return in_sector(i, s) && persons[i].work_status == WorkStatus::employee &&
                   states[i] == CovidState::none && persons[i].employment_income.cents() > 0;
        });
        for (const auto i :
             align_people(population, candidates, &baseline.subsidy_prob, target, seed, "subsidy:" + code)) {
            states[i] = CovidState::wage_subsidised;
        }
    });

    // (d) home working for non-essential workers still at work.
    std::vector<char> home(n, 0);
    const double home_share = controls.value_or("home_working_share", date, 0.0);
    if (wave.switches.home_working && home_share > 0.0) {
        const auto candidates = select_indices(n, [&](std::size_t i) {
            const auto &p = persons[i];
            return p.is_worker() && !p.essential_worker && p.home_work_capable &&
                   (states[i] == CovidState::none || states[i] == CovidState::wage_subsidised);
        });
        double eligible = 0.0;
        for (const auto i : candidates) {
            eligible += population.person_weight(i);
        }
        for (const auto i : align_people(population, candidates, nullptr, home_share * eligible, seed, "home_working")) {
            home[i] = 1;
        }
    }

    // (e) mortgage payment breaks.
    std::vector<char> deferred(households.size(), 0);
    const double deferrals = controls.interpolated("mortgage_deferrals", date);
    if (wave.switches.deferrals && deferrals > 0.0) {
        const auto accounts = controls.value("mortgage_accounts", date);
        if (!accounts || *accounts <= 0.0) {
            throw ValidationError("mortgage deferrals at " + format_date(date) + " need a mortgage_accounts control");
        }
        std::vector<BinaryUnit> units;
        double weight = 0.0;
        for (const auto &hh : households) {
            if (hh.tenure == Tenure::mortgage) {
                units.push_back(BinaryUnit{hh.household_id, 0.5, hh.weight, std::nullopt});
                weight += hh.weight;
            }
        }
        const double target = std::min(1.0, deferrals / *accounts) * weight;
        if (!units.empty()) {
            const auto chosen = align_binary(units, target, seed, "deferral");
            for (std::size_t h = 0; h < households.size(); ++h) {
                deferred[h] = std::binary_search(chosen.begin(), chosen.end(), households[h].household_id) ? 1 : 0;
            }
        }
    }

    // (f) share-value changes.
    const double factor = wave.switches.capital_loss ? controls.value_or("index_change_factor", date, 0.0) : 0.0;
    CapitalHoldingsGrid grid = inputs_.capital;
    grid.index_change_factor = factor;

    // (g) tax-benefit and income definitions, per household.
    const PolicyState policy{date, wave.switches.pup, wave.switches.ceib, wave.switches.subsidy,
                             options_.employer_top_up};
    WaveResult result;
    result.label = wave.label;
    result.date = date;
    result.households.resize(households.size());
    result.covid_weekly.resize(n);
    std::vector<double> eq_factor(households.size());
    parallel_for(households.size(), options_.threads, [&](std::size_t h) {
        const auto &hh = households[h];
        std::vector<PersonIncome> members;
        int private_commuters = 0;
        int public_commuters = 0;
        int baseline_workers = 0;
        int active_workers = 0;
        double capital_change_euros = 0.0;
        for (const auto i : population.members(h)) {
            const auto &p = persons[i];
            PersonIncome income{p.age,
                                p.work_status,
                                states[i],
                                p.employment_income,
                                p.self_employment_income,
                                p.capital_income,
                                p.private_pension,
                                baseline.prev_weekly[i]};
            const bool out_of_work =
                states[i] == CovidState::pup_recipient || states[i] == CovidState::ceib_recipient;
            if (out_of_work) {
                income.employment = Money{};
                income.self_employment = Money{};
            }
            members.push_back(income);
            const auto tb = person_T_and_B(income, inputs_.schedules, inputs_.tax, policy);
            result.covid_weekly[i] = tb.covid_weekly;
            if (p.is_worker()) {
                ++baseline_workers;
                if (!out_of_work && !home[i]) {
                    ++active_workers;
                    private_commuters += baseline.commute[i] == CommuteMode::private_transport ? 1 : 0;
                    public_commuters += baseline.commute[i] == CommuteMode::public_transport ? 1 : 0;
                }
            }
            if (factor != 0.0) {
                capital_change_euros += capital_change(p, baseline.household_quintile[h], grid, seed);
            }
        }
        const auto tb = household_T_and_B(members, inputs_.schedules, inputs_.tax, policy);
        HouseholdResult &r = result.households[h];
        r.household_id = hh.household_id;
        r.market = tb.market;
        r.benefits = tb.benefits;
        r.covid_benefits = tb.covid;
        r.subsidy = tb.subsidy;
        r.tax = tb.tax;
        r.gross = r.market + r.benefits;
        r.disposable = r.gross - r.tax;
        r.housing = housing_cost(hh, deferred[h] != 0);
        const double loss = -capital_change_euros;
        r.capital = Money::from_euros(options_.capital_booking == CapitalBooking::amortised ? loss / 12.0 : loss);
        Money work = weekly_to_monthly(commuting_cost(inputs_.commute, private_commuters, public_commuters));
        const bool relieved = baseline_workers > 0 && active_workers == 0;
        if (!wave.switches.childcare_support && !relieved) {
            work += Money::from_euros(baseline.childcare_weekly[h] * 52.0 / 12.0);
        }
        r.work = work;
        r.adjusted = r.disposable - r.housing - r.capital - r.work;
        eq_factor[h] = EquivalenceScale{}.factor(member_ages(population, h));
    });

    result.covid_states = states;
    result.home_working.assign(home.begin(), home.end());
    result.deferred.assign(deferred.begin(), deferred.end());
    auto &iv = result.incomes;
    iv.person_ids.resize(n);
    iv.weights.resize(n);
    for (auto &v : iv.values) {
        v.resize(n);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = population.household_of(i);
        const auto &r = result.households[h];
        iv.person_ids[i] = persons[i].person_id;
        iv.weights[i] = households[h].weight;
        iv.values[0][i] = r.market.euros() / eq_factor[h];
        iv.values[1][i] = r.gross.euros() / eq_factor[h];
        iv.values[2][i] = r.disposable.euros() / eq_factor[h];
        iv.values[3][i] = r.adjusted.euros() / eq_factor[h];
    }
    return result;
}

ScenarioResult Engine::run(const Population &population, const std::vector<WavePoint> &waves) const {
    if (waves.empty()) {
        throw ValidationError("a scenario needs at least one wave");
    }
    const Population calibrated = nowcast_baseline(population, waves.front().date);
    const BaselineState baseline = prepare(calibrated);
    ScenarioResult result;
    for (const auto &wave : waves) {
        if (wave.controls) {
            ControlTotals merged = controls_;
            merged.merge(ControlTotals::load(*wave.controls));
            result.waves.push_back(apply_wave(calibrated, baseline, wave, &merged));
        } else {
            result.waves.push_back(apply_wave(calibrated, baseline, wave));
        }
    }
    const auto &first = result.waves.front().incomes;
    result.ranking_deciles = assign_deciles(first.values[3], first.weights, first.person_ids);
    for (const auto &wave : result.waves) {
        result.summaries.push_back(summarize(wave.incomes, result.ranking_deciles));
    }
    return result;
}

DistributionDelta compare(const WaveResult &base, const WaveResult &cf, const std::vector<int> &ranking_deciles) {
    if (base.incomes.person_ids != cf.incomes.person_ids) {
        throw DomainError("cannot compare results over different person sets");
    }
    const auto a = summarize(base.incomes, ranking_deciles);
    const auto b = summarize(cf.incomes, ranking_deciles);
    DistributionDelta delta;
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        delta.mean[k] = b.mean[k] - a.mean[k];
        delta.gini[k] = b.gini[k] - a.gini[k];
        for (std::size_t d = 0; d < 10; ++d) {
            delta.deciles[d][k] = b.deciles[d][k] - a.deciles[d][k];
        }
    }
    return delta;
}

} // namespace nowcast
