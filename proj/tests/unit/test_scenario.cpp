#include "core/error.hpp"
#include "core/scenario.hpp"
#include "support/engine_fixture.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace nowcast;
using testing::fixture_population;
using testing::make_engine;
using testing::shipped_controls;

namespace {

std::string issues_text(const ValidationError &e) {
    std::string out;
    for (const auto &issue : e.issues()) {
        out += issue.str() + "\n";
    }
    return out;
}

// Weighted employment rate per band among adults.
std::array<double, kEmploymentBands.size()> employment_rates(const Population &pop) {
    std::array<double, kEmploymentBands.size()> working{};
    std::array<double, kEmploymentBands.size()> total{};
    for (std::size_t i = 0; i < pop.persons().size(); ++i) {
        const auto &p = pop.persons()[i];
        if (p.age < 18) {
            continue;
        }
        const auto band = employment_age_band(p.age);
        total[band] += pop.person_weight(i);
        if (p.is_worker()) {
            working[band] += pop.person_weight(i);
        }
    }
    for (std::size_t b = 0; b < total.size(); ++b) {
        working[b] /= total[b];
    }
    return working;
}

ControlTotals rate_controls(const std::array<double, kEmploymentBands.size()> &rates, double wage_index = 0.0) {
    std::string text = "stratum_key,date,target\n";
    char buf[128];
    for (std::size_t b = 0; b < rates.size(); ++b) {
        std::snprintf(buf, sizeof buf, "employment_rate:%s,2019-12-31,%.17g\n", std::string(kEmploymentBands[b]).c_str(),
                      rates[b]);
        text += buf;
    }
    if (wage_index > 0.0) {
        std::snprintf(buf, sizeof buf, "wage_index,2019-12-31,%.17g\n", wage_index);
        text += buf;
    }
    return ControlTotals::parse(text, "rates");
}

double mean_employee_income(const Population &pop) {
    double sum = 0.0;
    double weight = 0.0;
    for (std::size_t i = 0; i < pop.persons().size(); ++i) {
        if (pop.persons()[i].work_status == WorkStatus::employee) {
            sum += pop.person_weight(i) * pop.persons()[i].employment_income.euros();
            weight += pop.person_weight(i);
        }
    }
    return sum / weight;
}

} // namespace

TEST_CASE("control totals parse and look up by date") {
    const auto controls = ControlTotals::parse("stratum_key,date,target\n"
                                               "pup:construction,2020-05-05,100\n"
                                               "pup:construction,2020-06-06,50\n"
                                               "mortgage_deferrals,2020-04-01,0\n"
                                               "mortgage_deferrals,2020-05-01,3000\n",
                                               "c");
    CHECK_FALSE(controls.value("pup:construction", make_date(2020, 5, 4)));
    CHECK(controls.value("pup:construction", make_date(2020, 5, 5)) == 100.0);
    CHECK(controls.value("pup:construction", make_date(2020, 7, 1)) == 50.0);
    CHECK(controls.value_or("pup:education", make_date(2020, 7, 1), -1.0) == -1.0);
    CHECK(controls.interpolated("mortgage_deferrals", make_date(2020, 3, 1)) == 0.0);
    CHECK(controls.interpolated("mortgage_deferrals", make_date(2020, 4, 16)) == doctest::Approx(1500.0));
    CHECK(controls.interpolated("mortgage_deferrals", make_date(2021, 1, 1)) == 3000.0);
}

TEST_CASE("control totals report every bad row") {
    try {
        ControlTotals::parse("stratum_key,date,target\n"
                             "pup:fishing,2020-05-05,100\n"
                             "pup:construction,2020-05-05,-1\n"
                             "mystery,2020-05-05,1\n",
                             "c");
        FAIL("expected a validation error");
    } catch (const ValidationError &e) {
        const auto text = issues_text(e);
        CHECK(e.issues().size() == 3);
        CHECK(text.find("unknown sector 'fishing'") != std::string::npos);
    }
}

TEST_CASE("merging controls replaces whole series") {
    auto base = ControlTotals::parse("stratum_key,date,target\npup:construction,2020-05-05,100\n"
                                     "pup:education,2020-05-05,7\n",
                                     "a");
    base.merge(ControlTotals::parse("stratum_key,date,target\npup:construction,2020-06-01,5\n", "b"));
    CHECK_FALSE(base.value("pup:construction", make_date(2020, 5, 20)));
    CHECK(base.value("pup:education", make_date(2020, 5, 20)) == 7.0);
}

TEST_CASE("scenario files") {
    const auto config = parse_scenario("[run]\nseed = 9\ncontrols = c.csv\nemployer_top_up = 0.5\n"
                                       "capital_booking = once\n\n"
                                       "[wave before]\ndate = 2019-12-31\n\n"
                                       "[wave may]\ndate = 2020-05-05\npup = off\nchildcare_support = on\n",
                                       "s.scn", "/base");
    CHECK(config.seed == 9);
    CHECK(config.controls == std::filesystem::path("/base/c.csv"));
    CHECK(config.employer_top_up == 0.5);
    CHECK(config.capital_booking == CapitalBooking::once);
    REQUIRE(config.waves.size() == 2);
    CHECK(config.waves[1].label == "may");
    CHECK_FALSE(config.waves[1].switches.pup);
    CHECK(config.waves[1].switches.childcare_support);
    CHECK(config.waves[0].switches.pup);

    const auto again = parse_scenario(render_scenario(config), "r.scn", "/base");
    CHECK(render_scenario(again) == render_scenario(config));
}

TEST_CASE("scenario files with several problems report them all") {
    try {
        parse_scenario("[run]\ncontrols = c.csv\n[wave a]\ndate = 2020-05-05\n[wave a]\ndate = 2020-04-01\n"
                       "[wave b]\npup = maybe\n",
                       "s.scn", "/");
        FAIL("expected a validation error");
    } catch (const ValidationError &e) {
        const auto text = issues_text(e);
        CHECK(text.find("duplicate wave label 'a'") != std::string::npos);
        CHECK(text.find("wave dates must increase") != std::string::npos);
        CHECK(text.find("expected on or off") != std::string::npos);
        CHECK(text.find("has no date") != std::string::npos);
    }
}

TEST_CASE("age bands") {
    CHECK(kEmploymentBands[employment_age_band(18)] == "18_24");
    CHECK(kEmploymentBands[employment_age_band(65)] == "55_65");
    CHECK(kEmploymentBands[employment_age_band(66)] == "66_plus");
    CHECK(kCaseAgeBands[case_age_band(0)] == "0");
    CHECK(kCaseAgeBands[case_age_band(4)] == "1-4");
    CHECK(kCaseAgeBands[case_age_band(70)] == "65+");
}

TEST_CASE("nowcasting to the observed employment rates changes nothing") {
    const auto &pop = fixture_population();
    const auto engine = make_engine(rate_controls(employment_rates(pop)));
    const auto out = engine.nowcast_baseline(pop, make_date(2019, 12, 31));
    CHECK(persons_csv(out) == persons_csv(pop));
}

TEST_CASE("raising one band's employment target is met within one unit weight") {
    const auto &pop = fixture_population();
    auto rates = employment_rates(pop);
    const std::size_t band = 1;
    rates[band] = std::min(1.0, rates[band] + 0.05);
    const auto out = make_engine(rate_controls(rates)).nowcast_baseline(pop, make_date(2019, 12, 31));

    double working = 0.0;
    double total = 0.0;
    double max_weight = 0.0;
    for (std::size_t i = 0; i < out.persons().size(); ++i) {
        const auto &p = out.persons()[i];
        if (p.age >= 18 && employment_age_band(p.age) == band) {
            total += out.person_weight(i);
            max_weight = std::max(max_weight, out.person_weight(i));
            working += p.is_worker() ? out.person_weight(i) : 0.0;
        }
    }
    CHECK(std::abs(working - rates[band] * total) <= max_weight);
    CHECK(check_population(out.households(), out.persons()).empty());
}

TEST_CASE("a wage index scales mean employee income") {
    const auto &pop = fixture_population();
    const auto out =
        make_engine(rate_controls(employment_rates(pop), 1.02)).nowcast_baseline(pop, make_date(2019, 12, 31));
    // Incomes are held in cents, so the mean moves by 2% to within half a cent.
    CHECK(std::abs(mean_employee_income(out) - 1.02 * mean_employee_income(pop)) <= 0.005);
}

TEST_CASE("a wave with no shock reproduces the baseline") {
    const auto &pop = fixture_population();
    const auto controls = testing::controls_subset(shipped_controls(), {"employment_rate", "wage_index"});
    const auto engine = make_engine(controls);
    const auto result = engine.run(pop, {testing::wave("before", make_date(2019, 12, 31)),
                                         testing::wave("later", make_date(2020, 5, 5))});
    REQUIRE(result.waves.size() == 2);
    CHECK(testing::same_households(result.waves[0], result.waves[1]));
    const auto delta = compare(result.waves[0], result.waves[1], result.ranking_deciles);
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        CHECK(delta.mean[k] == 0.0);
        CHECK(delta.gini[k] == 0.0);
    }
}

TEST_CASE("PUP recipients per sector meet the scaled control totals") {
    const auto &pop = fixture_population();
    const auto engine = make_engine(shipped_controls());
    const Date date = make_date(2020, 5, 5);
    const auto nowcast = engine.nowcast_baseline(pop, make_date(2019, 12, 31));
    const auto baseline = engine.prepare(nowcast);
    const auto result = engine.apply_wave(nowcast, baseline, testing::wave("may", date));

    std::array<double, kSectorCount> workers{};
    std::array<double, kSectorCount> recipients{};
    std::array<double, kSectorCount> max_weight{};
    const auto &persons = nowcast.persons();
    for (std::size_t i = 0; i < persons.size(); ++i) {
        if (!persons[i].is_worker() || !persons[i].industry) {
            continue;
        }
        const auto s = static_cast<std::size_t>(*persons[i].industry);
        const double w = nowcast.person_weight(i);
        workers[s] += w;
        max_weight[s] = std::max(max_weight[s], w);
        if (result.covid_states[i] == CovidState::pup_recipient) {
            recipients[s] += w;
        }
    }
    for (const auto sector : all_sectors()) {
        const auto s = static_cast<std::size_t>(sector);
        const double ratio = workers[s] / testing::shipped_inputs().sectors.national_employment[s];
        const double target =
            shipped_controls().value_or("pup:" + std::string(sector_code(sector)), date, 0.0) * ratio;
        CAPTURE(sector_code(sector));
        CHECK(std::abs(recipients[s] - target) <= max_weight[s] + 1e-9);
    }

    for (std::size_t i = 0; i < persons.size(); ++i) {
        if (result.covid_states[i] == CovidState::pup_recipient) {
            CHECK(persons[i].age >= 18);
            CHECK(persons[i].age <= 66);
            CHECK(result.covid_weekly[i] ==
                  testing::shipped_inputs().schedules.pup_rate(baseline.prev_weekly[i], date));
        }
    }
    CHECK(testing::identity_holds(result));
}

TEST_CASE("comparisons need the same people") {
    const auto &pop = fixture_population();
    const auto controls = testing::controls_subset(shipped_controls(), {"employment_rate"});
    const auto result = make_engine(controls).run(pop, {testing::wave("before", make_date(2019, 12, 31))});
    const auto same = compare(result.waves[0], result.waves[0], result.ranking_deciles);
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        CHECK(same.mean[k] == 0.0);
        for (int d = 0; d < 10; ++d) {
            CHECK(same.deciles[d][k] == 0.0);
        }
    }
    auto other = result.waves[0];
    other.incomes.person_ids.back() += 1000000;
    CHECK_THROWS_AS(compare(result.waves[0], other, result.ranking_deciles), DomainError);
}

TEST_CASE("an unknown control file is an I/O error") {
    CHECK_THROWS_AS(ControlTotals::load(testing::fixtures_dir() / "missing.csv"), IoError);
    CHECK_THROWS_AS(ControlTotals::load(testing::fixtures_dir() / "unknown_sector.csv"), ValidationError);
}

TEST_CASE("the shipped inputs load") {
    const auto &inputs = testing::shipped_inputs();
    CHECK(inputs.coefficients.contains("public_transport"));
    CHECK(inputs.coefficients.contains("childcare_participation"));
    CHECK(inputs.sectors.national_employment[static_cast<std::size_t>(Sector::construction)] > 0.0);
    CHECK(testing::crisis_waves().size() == 7);
}
