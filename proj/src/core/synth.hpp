#pragma once

#include "core/population.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

namespace nowcast {

/// Parameters of the synthetic population generator. Every field has a
/// default so an empty `synth.cfg` yields a plausible population.
struct SynthConfig {
    int households = 1000;
    Date base_period = make_date(2019, 12, 31);
    /// When set, household weights are drawn uniformly from [0.5, 1.5].
    bool perturb_weights = false;

    std::array<double, kSectorCount> sector_shares{};
    std::array<double, kSectorCount> essential_shares{};
    /// Log-normal employee income per sector: log-scale location and scale.
    std::array<double, kSectorCount> income_mu{};
    std::array<double, kSectorCount> income_sigma{};

    /// Employment probability by adult age band 18-24, 25-34, 35-44, 45-54, 55-65, 66+.
    std::array<double, 6> employment_rate{0.50, 0.80, 0.80, 0.78, 0.60, 0.08};
    double self_employed_share = 0.12;
    double unemployed_share = 0.30; // of non-working adults under 66
    double university_share = 0.35;
    double bmw_region_share = 0.27;

    /// Household composition: single, couple, couple with children,
    /// lone parent, three adults, three adults with children.
    std::array<double, 6> composition{0.24, 0.24, 0.28, 0.08, 0.11, 0.05};
    /// Tenure: outright owner, mortgage, renter.
    std::array<double, 3> tenure{0.36, 0.34, 0.30};
    double mortgage_median = 1050.0; // per month
    double rent_median = 1150.0;     // per month
    double childcare_rate_under5 = 0.45;
    double childcare_rate_school_age = 0.15;
    double childcare_median = 80.0; // per week
    double capital_income_rate = 0.18;
    double capital_income_median = 900.0; // per year
    double private_pension_rate = 0.40;
    double private_pension_median = 9000.0; // per year

    static SynthConfig defaults();
};

/// Parses `key = value` lines over the defaults; unknown keys and bad values
/// are reported together as a ValidationError. Sectors given a `sector.<code>`
/// share keep it and the remaining sectors are rescaled to fill the rest.
SynthConfig load_synth_config(const std::filesystem::path &path);
SynthConfig parse_synth_config(std::string_view text, std::string source);
/// Every key with its effective value, in `key = value` form.
std::string render_synth_config(const SynthConfig &config);

/// Deterministic in (config, seed): equal inputs give identical records.
/// Throws ValidationError when households <= 0.
Population generate_synthetic(const SynthConfig &config, std::uint64_t seed);

} // namespace nowcast
