#pragma once

#include "core/calibration.hpp"
#include "core/expenses.hpp"
#include "core/igm.hpp"
#include "core/metrics.hpp"
#include "core/population.hpp"
#include "core/taxben.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nowcast {

/// Dated external aggregates keyed by stratum, e.g. "pup:construction".
///
/// Recognised keys: employment_rate:<18_24|25_34|35_44|45_54|55_65|66_plus>,
/// wage_index, pup:<sector>, ceib:<sector>, subsidy:<sector>,
/// cases_in_work:<age>, cases_out_of_work:<age>, home_working_share,
/// mortgage_deferrals, mortgage_accounts, index_change_factor.
class ControlTotals {
  public:
    struct Point {
        Date date;
        double value = 0.0;
    };

    static ControlTotals load(const std::filesystem::path &path);
    /// Columns stratum_key, date, target. Unknown keys or sectors are
    /// reported together with their rows.
    static ControlTotals parse(std::string_view text, std::string source);

    /// Latest value dated on or before `date`.
    std::optional<double> value(std::string_view key, Date date) const;
    /// value() or `fallback` when nothing is in force yet.
    double value_or(std::string_view key, Date date, double fallback) const;
    /// Linear interpolation between dated points; 0 before the first point
    /// and the last value after it.
    double interpolated(std::string_view key, Date date) const;

    bool contains(std::string_view key) const { return series_.find(key) != series_.end(); }
    const std::map<std::string, std::vector<Point>, std::less<>> &series() const noexcept { return series_; }

    /// Replaces or adds the series of every key in `other`.
    void merge(const ControlTotals &other);

  private:
    std::map<std::string, std::vector<Point>, std::less<>> series_;
};

/// Age bands of the case-count controls.
inline constexpr std::array<std::string_view, 9> kCaseAgeBands{"0",     "1-4",   "5-14",  "15-24", "25-34",
                                                                "35-44", "45-54", "55-64", "65+"};
/// Age bands of the employment-rate controls.
inline constexpr std::array<std::string_view, 6> kEmploymentBands{"18_24", "25_34", "35_44",
                                                                  "45_54", "55_65", "66_plus"};
std::size_t case_age_band(int age);
std::size_t employment_age_band(int age);

/// National employment and essential-worker share per sector.
struct SectorReference {
    std::array<double, kSectorCount> national_employment{};
    std::array<double, kSectorCount> essential_share{};

    /// Columns sector, national_employment, essential_share; every sector once.
    static SectorReference load(const std::filesystem::path &path);
};

struct WaveSwitches {
    bool pup = true;
    bool ceib = true;
    bool subsidy = true;
    bool childcare_support = false;
    bool deferrals = true;
    bool home_working = true;
    bool capital_loss = true;

    /// All income-support instruments off (PUP, CEIB, subsidy, childcare
    /// support, deferrals).
    static WaveSwitches instruments_off();
};

struct WavePoint {
    std::string label;
    Date date;
    WaveSwitches switches;
    /// Extra controls for this wave only, merged over the run's controls.
    std::optional<std::filesystem::path> controls;
};

enum class CapitalBooking { amortised, once };

struct ScenarioConfig {
    std::uint64_t seed = 20200505;
    std::filesystem::path controls;
    double employer_top_up = 1.0;
    CapitalBooking capital_booking = CapitalBooking::amortised;
    std::vector<WavePoint> waves;
};

/// Scenario file: a [run] section (seed, controls, employer_top_up,
/// capital_booking) and one [wave <label>] section per wave (date and the
/// switches pup, ceib, subsidy, childcare_support, deferrals, home_working,
/// capital_loss, plus an optional controls file). Relative paths resolve
/// against `base_dir`. Waves must have unique labels and ascending dates.
ScenarioConfig parse_scenario(std::string_view text, std::string source, const std::filesystem::path &base_dir);
ScenarioConfig load_scenario(const std::filesystem::path &path);
std::string render_scenario(const ScenarioConfig &config);

/// Everything loaded from the data and policy directories.
struct ModelInputs {
    CoefficientTable coefficients;
    CommuteCostTable commute;
    ChildcareCostGrid childcare;
    CapitalHoldingsGrid capital; // index_change_factor comes from the controls
    SectorReference sectors;
    TaxSystem tax;
    PolicySchedules schedules;

    /// Files read: coefficients.csv, residual_scales.csv (optional),
    /// commute_costs.csv, childcare_costs.csv, capital_participation.csv,
    /// capital_holdings.csv, sector_reference.csv, tax_system.cfg from
    /// `data_dir`; schedules.csv from `policy_dir`.
    static ModelInputs load(const std::filesystem::path &data_dir, const std::filesystem::path &policy_dir);
    static std::vector<std::filesystem::path> files(const std::filesystem::path &data_dir,
                                                    const std::filesystem::path &policy_dir);
};

struct RunOptions {
    std::uint64_t seed = 20200505;
    unsigned threads = 1;
    double employer_top_up = 1.0;
    CapitalBooking capital_booking = CapitalBooking::amortised;
};

/// Monthly amounts per household for one wave.
struct HouseholdResult {
    HouseholdId household_id = 0;
    Money market;
    Money benefits;       // all benefits including COVID payments and subsidies
    Money covid_benefits; // PUP and CEIB payments
    Money subsidy;        // wage subsidies
    Money tax;
    Money gross;      // market + benefits
    Money disposable; // gross - tax
    Money housing;    // H
    Money capital;    // Q, positive for a loss
    Money work;       // C: commuting and childcare
    Money adjusted;   // disposable - H - Q - C
};

struct WaveResult {
    std::string label;
    Date date;
    std::vector<HouseholdResult> households;  // population order
    std::vector<CovidState> covid_states;     // per person
    std::vector<bool> home_working;           // per person
    std::vector<Money> covid_weekly;          // per person PUP/CEIB payment per week
    std::vector<bool> deferred;               // per household
    IncomeVectors incomes;                    // equivalised, per person
};

/// Per-person and per-household quantities fixed at the baseline.
struct BaselineState {
    std::vector<CommuteMode> commute;      // per person
    std::vector<Money> prev_weekly;        // per person, employee earnings per week
    std::vector<double> job_loss_prob;     // per person, workers only
    std::vector<double> subsidy_prob;      // per person, workers only
    std::vector<double> childcare_weekly;  // per household, calibrated
    std::vector<int> household_decile;     // baseline equivalised disposable income
    std::vector<int> household_quintile;   // 0..4 on the same ranking
};

struct DistributionDelta {
    std::array<double, kDefinitionCount> mean{};
    std::array<double, kDefinitionCount> gini{};
    std::array<std::array<double, kDefinitionCount>, 10> deciles{};
};

struct ScenarioResult {
    std::vector<WaveResult> waves;
    std::vector<int> ranking_deciles; // per person, from the first wave
    std::vector<DistributionSummary> summaries;
};

class Engine {
  public:
    Engine(ModelInputs inputs, ControlTotals controls, RunOptions options);

    const ModelInputs &inputs() const noexcept { return inputs_; }
    const ControlTotals &controls() const noexcept { return controls_; }
    const RunOptions &options() const noexcept { return options_; }

    /// Aligns employment per age band to the employment-rate controls at
    /// `date` and scales employee incomes by the wage index. Base-year
    /// states are kept where the targets equal the observed rates.
    Population nowcast_baseline(const Population &population, Date date) const;

    BaselineState prepare(const Population &population) const;

    /// Applies one wave's shock and policy state. `controls` overrides the
    /// engine's controls when given.
    WaveResult apply_wave(const Population &population, const BaselineState &baseline, const WavePoint &wave,
                          const ControlTotals *controls = nullptr) const;

    /// nowcast_baseline at the first wave's date, then every wave. The first
    /// wave supplies the decile ranking.
    ScenarioResult run(const Population &population, const std::vector<WavePoint> &waves) const;

  private:
    ModelInputs inputs_;
    ControlTotals controls_;
    RunOptions options_;
};

/// Differences cf - base of means, Gini and decile means, ranking persons by
/// `ranking_deciles`. Throws DomainError when the person sets differ.
DistributionDelta compare(const WaveResult &base, const WaveResult &cf, const std::vector<int> &ranking_deciles);

} // namespace nowcast
