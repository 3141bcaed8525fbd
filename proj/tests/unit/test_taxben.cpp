#include "core/error.hpp"
#include "core/taxben.hpp"
#include "support/golden.hpp"
#include "support/paths.hpp"

#include <doctest.h>

#include <string>

using namespace nowcast;

namespace {

const PolicySchedules &shipped() {
    static const PolicySchedules schedules = PolicySchedules::load(testing::policy_dir());
    return schedules;
}

Money eur(std::string_view text) { return *Money::parse(text); }

} // namespace

TEST_CASE("shipped schedules reproduce the published weekly rates") {
    for (const auto &rate : testing::kGoldenRates) {
        CAPTURE(rate.instrument);
        CAPTURE(rate.earnings);
        CAPTURE(rate.date);
        CHECK(testing::evaluate(shipped(), rate).str() == rate.expected);
    }
}

TEST_CASE("shipped schedules reproduce the derived TWSS rates") {
    for (const auto &rate : testing::kDerivedRates) {
        CAPTURE(rate.earnings);
        CAPTURE(rate.date);
        CHECK(testing::evaluate(shipped(), rate).str() == rate.expected);
    }
}

TEST_CASE("schedules reject dates outside a scheme's life") {
    CHECK_THROWS_AS(shipped().pup_rate(eur("450"), make_date(2020, 3, 1)), DomainError);
    CHECK_THROWS_AS(shipped().twss_subsidy(eur("450"), make_date(2020, 9, 15)), DomainError);
    CHECK_THROWS_AS(shipped().ewss_subsidy(eur("450"), make_date(2020, 6, 1)), DomainError);
}

TEST_CASE("CEIB pays the banded PUP rate or the top band") {
    CHECK(shipped().ceib_rate(make_date(2020, 5, 5)).str() == "350.00");
    CHECK(shipped().ceib_rate(make_date(2020, 3, 15)).str() == "203.00");
    CHECK(shipped().ceib_rate(make_date(2020, 11, 15)).str() == "350.00");
    CHECK(shipped().ceib_rate(make_date(2020, 11, 15), eur("250")).str() == "250.00");
}

TEST_CASE("wage subsidy hands over from TWSS to EWSS") {
    const Money gross = eur("500");
    const Money take_home = eur("420");
    CHECK(shipped().wage_subsidy(gross, take_home, make_date(2020, 3, 1)).cents() == 0);
    CHECK(shipped().wage_subsidy(gross, take_home, make_date(2020, 5, 1)).str() == "350.00");
    CHECK(shipped().wage_subsidy(gross, take_home, make_date(2020, 8, 28)).str() == "350.00");
    CHECK(shipped().wage_subsidy(gross, take_home, make_date(2020, 9, 1)).str() == "203.00");
    CHECK(shipped().wage_subsidy(gross, take_home, make_date(2020, 11, 15)).str() == "350.00");
}

TEST_CASE("band rules parse and render") {
    CHECK(BandRule::parse("203")->amount.str() == "203.00");
    CHECK(BandRule::parse("none")->amount.cents() == 0);
    const auto rate = BandRule::parse("rate 0.70 cap 410");
    REQUIRE(rate);
    CHECK(rate->kind == BandRule::Kind::rate);
    CHECK(rate->rate.ppm == 700000);
    CHECK(rate->cap->str() == "410.00");
    const auto taper = BandRule::parse("taper 350 until 1462");
    REQUIRE(taper);
    CHECK(taper->kind == BandRule::Kind::taper);
    CHECK(taper->taper_end.str() == "1462.00");
    CHECK_FALSE(BandRule::parse("rate"));
    CHECK_FALSE(BandRule::parse("cap 410"));
    CHECK_FALSE(BandRule::parse("taper 350"));
}

TEST_CASE("schedule files are validated") {
    const std::string header = "scheme,effective_from,band_lower,value\n";
    const std::string subsidies = "twss,2020-03-26,0,rate 0.70 cap 410\newss,2020-09-01,0,203\n";
    CHECK_NOTHROW(PolicySchedules::parse(header + "pup,2020-03-13,0,203\n" + subsidies, "s"));
    CHECK_THROWS_AS(PolicySchedules::parse(header + "pup,2020-03-13,0,203\n", "s"), ValidationError);
    CHECK_THROWS_AS(PolicySchedules::parse(header + "pup,2020-03-13,10,203\n" + subsidies, "s"), ValidationError);
    CHECK_THROWS_AS(PolicySchedules::parse(header + "pup,2020-13-13,0,203\n" + subsidies, "s"), ValidationError);
    CHECK_THROWS_AS(PolicySchedules::parse(header + "pup,2020-03-13,0,lots\n" + subsidies, "s"), ValidationError);
    const auto custom =
        PolicySchedules::parse(header + "pup,2020-03-13,0,100\npup,2020-03-13,500,200\n" + subsidies, "s");
    CHECK(custom.pup_rate(eur("499.99"), make_date(2020, 4, 1)).str() == "100.00");
    CHECK(custom.pup_rate(eur("500"), make_date(2020, 4, 1)).str() == "200.00");
}

TEST_CASE("income tax follows the bands, credits and social insurance") {
    const TaxSystem system;
    CHECK(income_tax(Money{}, system).cents() == 0);
    CHECK(income_tax(eur("10000"), system).str() == "0.00");
    CHECK(income_tax(eur("16500"), system).str() == "0.00");
    CHECK(income_tax(eur("30000"), system).str() == "3167.84");
    CHECK(income_tax(eur("50000"), system).str() == "10907.84");

    TaxSystem one_band;
    one_band.bands = {{Money{}, Rate{200000}}};
    one_band.credits = Money{};
    one_band.social_insurance_rate = Rate{0};
    CHECK(income_tax(eur("100"), one_band).str() == "20.00");
    CHECK_THROWS_AS(income_tax(eur("-1"), system), DomainError);
}

TEST_CASE("tax systems are validated") {
    TaxSystem bad;
    bad.bands = {{Money{}, Rate{200000}}, {Money{}, Rate{400000}}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    bad.bands = {{Money{}, Rate{1200000}}};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    CHECK_NOTHROW(TaxSystem{}.validate());
    CHECK(TaxSystem{}.top_marginal_rate() == doctest::Approx(0.44));

    const TaxSystem parsed = parse_tax_system(render_tax_system(TaxSystem{}), "rendered");
    CHECK(render_tax_system(parsed) == render_tax_system(TaxSystem{}));
}

TEST_CASE("a PUP recipient's household receives the weekly rate as a monthly benefit") {
    PersonIncome person;
    person.age = 40;
    person.work_status = WorkStatus::employee;
    person.covid_state = CovidState::pup_recipient;
    person.prev_weekly_earnings = eur("150");
    const PolicyState policy{make_date(2020, 5, 5)};
    const auto hh = household_T_and_B({person}, shipped(), TaxSystem{}, policy);
    CHECK(hh.covid_weekly.str() == "350.00");
    CHECK(hh.covid == weekly_to_monthly(eur("350")));
    CHECK(hh.benefits == weekly_to_monthly(eur("350")));
    CHECK(hh.market.cents() == 0);
    CHECK(hh.tax.cents() == 0);
}

TEST_CASE("households without market income pay no tax") {
    PersonIncome adult;
    adult.age = 40;
    adult.work_status = WorkStatus::unemployed;
    PersonIncome child;
    child.age = 5;
    child.work_status = WorkStatus::child;
    const TaxSystem system;
    const auto hh = household_T_and_B({adult, child}, shipped(), system, PolicyState{make_date(2020, 5, 5)});
    CHECK(hh.tax.cents() == 0);
    CHECK(hh.benefits == weekly_to_monthly(system.unemployment_weekly) + system.child_benefit_monthly);
}

TEST_CASE("disabling the instruments reproduces the baseline benefits") {
    PersonIncome base;
    base.age = 40;
    base.work_status = WorkStatus::unemployed;
    base.capital = eur("1200");

    PersonIncome recipient = base;
    recipient.covid_state = CovidState::pup_recipient;
    recipient.prev_weekly_earnings = eur("500");

    PolicyState off{make_date(2020, 5, 5)};
    off.pup = false;
    off.ceib = false;
    off.subsidy = false;
    const TaxSystem system;
    const auto baseline = person_T_and_B(base, shipped(), system, off);
    const auto switched = person_T_and_B(recipient, shipped(), system, off);
    CHECK(switched.benefits == baseline.benefits);
    CHECK(switched.tax == baseline.tax);
    CHECK(switched.market == baseline.market);
    CHECK(switched.covid.cents() == 0);
}

TEST_CASE("wage subsidies are taxable and replace part of employer pay") {
    PersonIncome worker;
    worker.age = 35;
    worker.work_status = WorkStatus::employee;
    worker.employment = eur("26000"); // 500 a week
    worker.prev_weekly_earnings = eur("500");
    worker.covid_state = CovidState::wage_subsidised;
    const TaxSystem system;
    PolicyState policy{make_date(2020, 11, 15)};
    policy.employer_top_up = 0.0;
    const auto out = person_T_and_B(worker, shipped(), system, policy);
    // EWSS pays 350 a week at 500 gross; the employer tops up nothing.
    CHECK(out.subsidy == weekly_to_monthly(eur("350")));
    CHECK(out.market.cents() == 0);
    CHECK(out.tax == annual_to_monthly(income_tax(eur("18200"), system)));

    policy.employer_top_up = 1.0;
    const auto topped = person_T_and_B(worker, shipped(), system, policy);
    CHECK(topped.market == annual_to_monthly(eur("7800")));
    CHECK(topped.tax == annual_to_monthly(income_tax(eur("26000"), system)));
}
