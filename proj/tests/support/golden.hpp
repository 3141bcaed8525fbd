#pragma once

#include "core/date.hpp"
#include "core/money.hpp"
#include "core/taxben.hpp"

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nowcast::testing {

struct GoldenRate {
    std::string_view instrument; // pup, twss or ewss
    std::string_view earnings;
    std::string_view date;
    std::string_view expected;
};

// Weekly rates of the COVID instruments as published, in euros.
inline constexpr std::array<GoldenRate, 48> kGoldenRates{{
    // PUP flat at launch, then the increase on March 24.
    {"pup", "0", "2020-03-15", "203.00"},
    {"pup", "500", "2020-03-15", "203.00"},
    {"pup", "150", "2020-03-23", "203.00"},
    {"pup", "150", "2020-03-24", "350.00"},
    {"pup", "150", "2020-05-05", "350.00"},
    {"pup", "1000", "2020-05-05", "350.00"},
    // June 29 bands.
    {"pup", "150", "2020-07-01", "203.00"},
    {"pup", "250", "2020-07-01", "250.00"},
    {"pup", "350", "2020-07-01", "300.00"},
    {"pup", "450", "2020-07-01", "300.00"},
    // September 17: two rates.
    {"pup", "199.99", "2020-09-20", "203.00"},
    {"pup", "200", "2020-09-20", "350.00"},
    // October 16 bands, with 300-400 paying 300.
    {"pup", "150", "2020-11-15", "203.00"},
    {"pup", "250", "2020-11-15", "250.00"},
    {"pup", "350", "2020-11-15", "300.00"},
    {"pup", "400", "2020-11-15", "350.00"},
    {"pup", "450", "2020-11-15", "350.00"},
    // February 2021 reversion.
    {"pup", "150", "2021-02-15", "203.00"},
    {"pup", "300", "2021-02-15", "203.00"},
    {"pup", "350", "2021-02-15", "250.00"},
    // TWSS: flat 203, then 70% with caps, then the April 20 redesign.
    {"twss", "500", "2020-03-20", "203.00"},
    {"twss", "500", "2020-04-01", "350.00"},
    {"twss", "586", "2020-04-01", "410.00"},
    {"twss", "700", "2020-04-01", "350.00"},
    {"twss", "1000", "2020-04-01", "0.00"},
    {"twss", "400", "2020-05-01", "340.00"},
    {"twss", "450", "2020-05-01", "350.00"},
    {"twss", "550", "2020-05-01", "385.00"},
    {"twss", "700", "2020-05-01", "350.00"},
    // EWSS, first table.
    {"ewss", "100", "2020-08-01", "0.00"},
    {"ewss", "151.50", "2020-08-01", "151.50"},
    {"ewss", "180", "2020-08-01", "151.50"},
    {"ewss", "202.99", "2020-08-01", "151.50"},
    {"ewss", "203", "2020-08-01", "203.00"},
    {"ewss", "1462", "2020-08-01", "203.00"},
    {"ewss", "2000", "2020-08-01", "0.00"},
    // EWSS, second table.
    {"ewss", "100", "2020-11-01", "0.00"},
    {"ewss", "180", "2020-11-01", "203.00"},
    {"ewss", "202.99", "2020-11-01", "203.00"},
    {"ewss", "250", "2020-11-01", "250.00"},
    {"ewss", "299.99", "2020-11-01", "250.00"},
    {"ewss", "300", "2020-11-01", "300.00"},
    {"ewss", "399.99", "2020-11-01", "300.00"},
    {"ewss", "400", "2020-11-01", "350.00"},
    {"ewss", "1462", "2020-11-01", "350.00"},
    {"ewss", "1462.01", "2020-11-01", "0.00"},
    {"ewss", "2000", "2020-11-01", "0.00"},
    {"ewss", "2000", "2021-01-26", "0.00"},
}};

// Rates that follow from the shipped schedule choices (70% and 85% rules and
// the taper above 960.01), checked independently in tests/oracles.
inline constexpr std::array<GoldenRate, 4> kDerivedRates{{
    {"twss", "123.45", "2020-04-01", "86.42"},
    {"twss", "1000", "2020-05-01", "322.12"},
    {"twss", "1211", "2020-05-01", "175.00"},
    {"twss", "1462", "2020-05-01", "0.00"},
}};

inline Money evaluate(const PolicySchedules &schedules, const GoldenRate &rate) {
    const auto earnings = Money::parse(rate.earnings);
    const auto date = parse_date(rate.date);
    if (!earnings || !date) {
        throw std::invalid_argument("bad golden case " + std::string(rate.earnings) + " " + std::string(rate.date));
    }
    if (rate.instrument == "pup") {
        return schedules.pup_rate(*earnings, *date);
    }
    if (rate.instrument == "twss") {
        return schedules.twss_subsidy(*earnings, *date);
    }
    return schedules.ewss_subsidy(*earnings, *date);
}

} // namespace nowcast::testing
