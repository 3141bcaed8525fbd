#pragma once

#include "core/igm.hpp"
#include "core/money.hpp"
#include "core/population.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

namespace nowcast {

enum class CommuteMode { none, public_transport, private_transport };

std::string_view to_string(CommuteMode mode);

/// Weekly commuting costs by number of commuting workers (1, 2, 3+).
struct CommuteCostTable {
    std::array<double, 3> fuel_increase{};
    std::array<double, 3> public_increase{};
    std::array<Money, 3> fuel_weekly;
    std::array<Money, 3> public_weekly;
    std::array<Money, 3> total_weekly;

    /// Columns workers, fuel_increase, public_increase, fuel_weekly,
    /// public_weekly, total_weekly with rows for 1, 2 and 3 workers. Totals
    /// must equal the component sums within a cent.
    static CommuteCostTable load(const std::filesystem::path &path);
};

struct CommuteChoice {
    CommuteMode mode = CommuteMode::none;
    double p_public = 0.0;
    double p_private = 0.0;
};

/// Evaluates both transport logits for a worker and picks the mode with
/// draws keyed by (seed, person). Public transport is checked first, so it
/// wins when both fire. Non-workers get CommuteMode::none.
CommuteChoice commute_mode(const Person &person, const CoefficientSet &public_model,
                           const CoefficientSet &private_model, std::uint64_t seed);

/// Fuel cost for the private commuters plus fare cost for the public ones,
/// each read from the column of its count (capped at 3). Weekly.
Money commuting_cost(const CommuteCostTable &table, int private_commuters, int public_commuters);

enum class FamilyType { lone_parent, couple_with_children, other_with_children };
inline constexpr std::size_t kFamilyTypeCount = 3;

std::string_view to_string(FamilyType type);
std::optional<FamilyType> parse_family_type(std::string_view text);

/// nullopt for households without members under 18.
std::optional<FamilyType> family_type(const Population &population, std::size_t household_index);

/// Mean weekly childcare cost by family type and disposable-income decile.
struct ChildcareCostGrid {
    std::array<std::array<double, 10>, kFamilyTypeCount> cells{};

    double at(FamilyType type, int decile) const;
    /// Columns family_type, d1..d10 (an optional total column is ignored).
    static ChildcareCostGrid load(const std::filesystem::path &path);
};

struct ChildcareUnit {
    HouseholdId id = 0;
    double weight = 1.0;
    std::optional<FamilyType> type;
    int decile = 1; // 1..10
    double expenditure = 0.0; // € per week, 0 for non-users
};

/// Scales expenditure within each family type x decile cell so the weighted
/// cell mean (users and non-users) equals the grid value. Cells with no
/// positive expenditure are left as they are. Returns the number of cells
/// calibrated.
int calibrate_childcare(std::vector<ChildcareUnit> &units, const ChildcareCostGrid &grid);

/// Covariates of the childcare participation and expenditure models.
/// `eq_income_weekly` is the household's equivalised disposable income.
Covariates childcare_covariates(const Household &household, int workers, int adults, double eq_income_weekly,
                                bool squared_term);

/// Monthly housing cost: rent for renters, the mortgage payment unless
/// deferred, nothing for outright owners.
Money housing_cost(const Household &household, bool deferred);

/// Age x household-income-quintile share participation and mean holding.
struct CapitalHoldingsGrid {
    static constexpr std::array<int, 5> kAgeRows{30, 40, 50, 60, 70};
    std::array<std::array<double, 5>, 5> participation{};
    std::array<std::array<double, 5>, 5> holding_thousands{};
    double index_change_factor = 0.0;

    /// Row for an age: under 35, 35-44, 45-54, 55-64, 65 and over.
    static std::size_t age_row(int age);
    /// Expected value of the change among participants, in € thousand.
    double participant_change(std::size_t age_row, std::size_t quintile) const;

    /// Two grids with columns age_group, q1..q5 (optional total ignored).
    static CapitalHoldingsGrid load(const std::filesystem::path &participation_path,
                                    const std::filesystem::path &holding_path, double index_change_factor);
};

/// Change in the value of a person's shareholding in euros (negative for a
/// loss). Adults participate with the cell's probability using a draw keyed
/// by (seed, person). `quintile` is 0..4. Throws DomainError outside the grid.
double capital_change(const Person &person, int quintile, const CapitalHoldingsGrid &grid, std::uint64_t seed);

} // namespace nowcast
