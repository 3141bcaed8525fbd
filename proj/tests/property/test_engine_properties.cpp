#include "core/scenario.hpp"
#include "support/engine_fixture.hpp"

#include <doctest.h>

#include <cstdlib>
#include <limits>

using namespace nowcast;
using testing::fixture_population;
using testing::make_engine;
using testing::shipped_controls;

namespace {

std::int64_t total_market(const WaveResult &wave) {
    std::int64_t sum = 0;
    for (const auto &h : wave.households) {
        sum += h.market.cents();
    }
    return sum;
}

} // namespace

TEST_CASE("the income identity holds on every household of every crisis wave") {
    const auto result = make_engine(shipped_controls()).run(fixture_population(), testing::crisis_waves());
    REQUIRE(result.waves.size() == 7);
    for (const auto &wave : result.waves) {
        CAPTURE(wave.label);
        CHECK(testing::identity_holds(wave));
    }
}

TEST_CASE("results do not depend on the thread count") {
    const auto waves = testing::crisis_waves();
    const auto one = make_engine(shipped_controls(), 20200505, 1).run(fixture_population(), waves);
    const auto four = make_engine(shipped_controls(), 20200505, 4).run(fixture_population(), waves);
    for (std::size_t w = 0; w < waves.size(); ++w) {
        CHECK(testing::same_households(one.waves[w], four.waves[w]));
        CHECK(one.waves[w].covid_states == four.waves[w].covid_states);
        CHECK(one.waves[w].incomes.values == four.waves[w].incomes.values);
    }
}

TEST_CASE("switching the instruments off leaves only baseline benefits") {
    auto waves = testing::crisis_waves();
    for (auto &w : waves) {
        w.switches = WaveSwitches::instruments_off();
    }
    const auto result = make_engine(shipped_controls()).run(fixture_population(), waves);
    for (const auto &wave : result.waves) {
        bool job_losses = false;
        for (std::size_t i = 0; i < wave.covid_states.size(); ++i) {
            job_losses |= wave.covid_states[i] == CovidState::pup_recipient;
            CHECK(wave.covid_weekly[i].cents() == 0);
        }
        for (const auto &h : wave.households) {
            CHECK(h.covid_benefits.cents() == 0);
            CHECK(h.subsidy.cents() == 0);
            CHECK(h.disposable == h.market - h.tax + h.benefits);
        }
        if (wave.label == "2020-05-05") {
            CHECK(job_losses);
        }
        for (const bool d : wave.deferred) {
            CHECK_FALSE(d);
        }
    }
}

TEST_CASE("more PUP recipients in a sector never raise market income") {
    const auto controls = testing::controls_subset(shipped_controls(), {"employment_rate", "wage_index", "pup:"});
    const auto engine = make_engine(controls);
    const auto nowcast = engine.nowcast_baseline(fixture_population(), make_date(2019, 12, 31));
    const auto baseline = engine.prepare(nowcast);
    const Date date = make_date(2020, 5, 5);
    std::int64_t previous = std::numeric_limits<std::int64_t>::max();
    for (const double count : {0.0, 20000.0, 60000.0, 120000.0, 160000.0}) {
        auto shocked = controls;
        shocked.merge(ControlTotals::parse("stratum_key,date,target\npup:wholesale_retail,2020-05-05," +
                                               std::to_string(count) + "\n",
                                           "shock"));
        const auto wave = engine.apply_wave(nowcast, baseline, testing::wave("w", date), &shocked);
        const auto market = total_market(wave);
        CHECK(market <= previous);
        previous = market;
    }
}

TEST_CASE("capital losses book once or amortised") {
    const auto waves = std::vector<WavePoint>{testing::wave("before", make_date(2019, 12, 31)),
                                              testing::wave("may", make_date(2020, 5, 5))};
    const auto controls = testing::controls_subset(shipped_controls(), {"employment_rate", "index_change_factor"});
    RunOptions options;
    options.capital_booking = CapitalBooking::amortised;
    const auto amortised = Engine(testing::shipped_inputs(), controls, options).run(fixture_population(), waves);
    options.capital_booking = CapitalBooking::once;
    const auto once = Engine(testing::shipped_inputs(), controls, options).run(fixture_population(), waves);
    std::int64_t a = 0;
    std::int64_t o = 0;
    for (std::size_t h = 0; h < once.waves[1].households.size(); ++h) {
        a += amortised.waves[1].households[h].capital.cents();
        o += once.waves[1].households[h].capital.cents();
        CHECK(amortised.waves[0].households[h].capital.cents() == 0);
    }
    CHECK(a > 0);
    CHECK(std::llabs(o - 12 * a) <= static_cast<std::int64_t>(12 * once.waves[1].households.size()));
}
