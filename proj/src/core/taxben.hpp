#pragma once

#include "core/date.hpp"
#include "core/money.hpp"
#include "core/population.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

/// A rate held in parts per million so band arithmetic stays in integers.
struct Rate {
    std::int64_t ppm = 0;

    static std::optional<Rate> parse(std::string_view text);
    double value() const { return static_cast<double>(ppm) / 1e6; }
    /// amount * rate, rounded half away from zero to the cent.
    Money apply(Money amount) const;
    std::string str() const;
    friend auto operator<=>(Rate, Rate) = default;
};

/// The payment rule of one band.
struct BandRule {
    enum class Kind { flat, rate, taper };
    Kind kind = Kind::flat;
    Money amount;            // flat payment, or taper start amount
    Rate rate;               // Kind::rate
    std::optional<Money> cap; // Kind::rate
    Money taper_end;         // Kind::taper: amount reaches 0 here

    /// Parses "203", "none", "rate 0.70 cap 410", "rate 0.85", "taper 350 until 1462".
    static std::optional<BandRule> parse(std::string_view text);
    std::string str() const;
};

struct Band {
    Money lower; // inclusive lower bound of weekly earnings
    BandRule rule;
};

struct Regime {
    Date effective_from;
    std::vector<Band> bands; // ascending lower bounds, first at 0
};

/// One instrument's dated parameter sets. A scheme may end at a date after
/// which it no longer exists.
struct Schedule {
    std::string scheme;
    std::vector<Regime> regimes; // date ordered
    std::optional<Date> ends;

    bool in_force(Date date) const;
    /// Regime in force at `date`; DomainError outside the scheme's life.
    const Regime &at(Date date) const;
    /// Weekly payment for weekly `earnings` at `date`.
    Money evaluate(Money earnings, Date date) const;
};

/// The dated COVID instruments: "pup", "twss" and "ewss" schedules.
class PolicySchedules {
  public:
    PolicySchedules() = default;
    explicit PolicySchedules(std::map<std::string, Schedule, std::less<>> schedules);

    /// Reads `schedules.csv` from `dir` (columns scheme, effective_from,
    /// band_lower, value). Value "end" closes the scheme at that date.
    static PolicySchedules load(const std::filesystem::path &dir);
    static PolicySchedules parse(std::string_view text, std::string source);

    const Schedule &schedule(std::string_view scheme) const;
    const std::map<std::string, Schedule, std::less<>> &schedules() const noexcept { return schedules_; }

    Money pup_rate(Money prev_weekly_earnings, Date date) const;
    /// The recipient's banded PUP rate when previous earnings are known,
    /// otherwise the top band in force.
    Money ceib_rate(Date date, std::optional<Money> prev_weekly_earnings = std::nullopt) const;
    Money twss_subsidy(Money avg_take_home, Date date) const;
    Money ewss_subsidy(Money gross_weekly, Date date) const;
    /// TWSS while it is in force, EWSS afterwards; 0 before either starts.
    Money wage_subsidy(Money gross_weekly, Money take_home_weekly, Date date) const;

  private:
    std::map<std::string, Schedule, std::less<>> schedules_;
};

struct TaxBand {
    Money threshold; // annual taxable income where the band starts
    Rate rate;
};

/// Simplified baseline tax-benefit parameters (annual tax, weekly benefits).
struct TaxSystem {
    std::vector<TaxBand> bands{{Money::from_cents(0), Rate{200000}}, {Money::from_cents(3530000), Rate{400000}}};
    Money credits = Money::from_cents(330000);
    Rate social_insurance_rate{40000};
    Money social_insurance_floor = Money::from_cents(1830400);
    Money unemployment_weekly = Money::from_cents(20300);
    Money illness_weekly = Money::from_cents(20300);
    Money pension_weekly = Money::from_cents(24830);
    Money child_benefit_monthly = Money::from_cents(14000);
    int pension_age = 66;
    int child_benefit_age = 18;

    /// Throws ValidationError when rates leave [0,1] or thresholds do not increase.
    void validate() const;
    /// Highest marginal rate of income_tax (top band plus social insurance).
    double top_marginal_rate() const;
};

TaxSystem parse_tax_system(std::string_view text, std::string source);
TaxSystem load_tax_system(const std::filesystem::path &path);
std::string render_tax_system(const TaxSystem &system);

/// Band tax minus credits floored at 0, plus social insurance on the excess
/// over the floor. Annual amounts.
Money income_tax(Money taxable, const TaxSystem &system);

/// Which COVID instruments are in force for a calculation.
struct PolicyState {
    Date date;
    bool pup = true;
    bool ceib = true;
    bool subsidy = true;
    /// Share of the pay above the subsidy the employer keeps paying.
    double employer_top_up = 1.0;
};

/// One person's scenario inputs to the tax-benefit calculation.
struct PersonIncome {
    int age = 0;
    WorkStatus work_status = WorkStatus::inactive; // baseline status
    CovidState covid_state = CovidState::none;
    Money employment;      // annual, in the scenario
    Money self_employment; // annual
    Money capital;         // annual
    Money pension;         // annual
    /// Baseline weekly employee earnings, used for banded rates.
    Money prev_weekly_earnings;
};

/// Monthly amounts for one person or household.
struct TaxBenefit {
    Money market;
    Money benefits; // baseline benefits, COVID payments and wage subsidies
    Money tax;
    Money subsidy;  // part of `benefits` paid as wage subsidy
    Money covid;    // part of `benefits` paid as PUP or CEIB
    Money covid_weekly; // the same payment per week
};

TaxBenefit person_T_and_B(const PersonIncome &person, const PolicySchedules &schedules, const TaxSystem &system,
                          const PolicyState &policy);
/// Sum over members plus child benefit for members under the child-benefit age.
TaxBenefit household_T_and_B(const std::vector<PersonIncome> &members, const PolicySchedules &schedules,
                             const TaxSystem &system, const PolicyState &policy);

/// Weekly pay after the income tax it would attract over a year.
Money take_home_weekly(Money gross_weekly, const TaxSystem &system);

} // namespace nowcast
