#include "core/expenses.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"
#include "core/keyvalue.hpp"
#include "core/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace nowcast {

std::string_view to_string(CommuteMode mode) {
    switch (mode) {
    case CommuteMode::none:
        return "none";
    case CommuteMode::public_transport:
        return "public";
    case CommuteMode::private_transport:
        return "private";
    }
    return "?";
}

CommuteCostTable CommuteCostTable::load(const std::filesystem::path &path) {
    const auto table = DelimitedTable::read(path);
    table.require_columns({"workers", "fuel_increase", "public_increase", "fuel_weekly", "public_weekly", "total_weekly"});
    CommuteCostTable out;
    std::vector<Issue> issues;
    std::array<bool, 3> seen{};
    for (const auto &row : table.rows()) {
        const auto workers = parse_integer(table.field(row, "workers"));
        if (!workers || *workers < 1 || *workers > 3) {
            issues.push_back(Issue{table.source(), row.line, "workers", "expected 1, 2 or 3"});
            continue;
        }
        const auto i = static_cast<std::size_t>(*workers - 1);
        seen[i] = true;
        for (const auto &[column, target] : {std::pair{"fuel_increase", &out.fuel_increase[i]},
                                             std::pair{"public_increase", &out.public_increase[i]}}) {
            const auto v = parse_double(table.field(row, column));
            if (!v || *v < 0.0) {
                issues.push_back(Issue{table.source(), row.line, column, "expected a non-negative number"});
            } else {
                *target = *v;
            }
        }
        for (const auto &[column, target] : {std::pair{"fuel_weekly", &out.fuel_weekly[i]},
                                             std::pair{"public_weekly", &out.public_weekly[i]},
                                             std::pair{"total_weekly", &out.total_weekly[i]}}) {
            const auto v = Money::parse(table.field(row, column));
            if (!v || v->cents() < 0) {
                issues.push_back(Issue{table.source(), row.line, column, "expected a non-negative amount"});
            } else {
                *target = *v;
            }
        }
        const auto diff = out.total_weekly[i] - out.fuel_weekly[i] - out.public_weekly[i];
        if (std::llabs(diff.cents()) > 1) {
            issues.push_back(Issue{table.source(), row.line, "total_weekly", "total differs from the component sum"});
        }
    }
    for (std::size_t i = 0; i < 3; ++i) {
        if (!seen[i]) {
            issues.push_back(Issue{table.source(), 0, "workers", "missing row for " + std::to_string(i + 1) + " workers"});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return out;
}

CommuteChoice commute_mode(const Person &person, const CoefficientSet &public_model,
                           const CoefficientSet &private_model, std::uint64_t seed) {
    CommuteChoice choice;
    if (!person.is_worker()) {
        return choice;
    }
    const auto x = commute_covariates(person);
    choice.p_public = logit_prob(public_model, x);
    choice.p_private = logit_prob(private_model, x);
    if (keyed_uniform(seed, person.person_id, "commute-public") < choice.p_public) {
        choice.mode = CommuteMode::public_transport;
    } else if (keyed_uniform(seed, person.person_id, "commute-private") < choice.p_private) {
        choice.mode = CommuteMode::private_transport;
    }
    return choice;
}

Money commuting_cost(const CommuteCostTable &table, int private_commuters, int public_commuters) {
    Money cost;
    if (private_commuters > 0) {
        cost += table.fuel_weekly[static_cast<std::size_t>(std::min(private_commuters, 3) - 1)];
    }
    if (public_commuters > 0) {
        cost += table.public_weekly[static_cast<std::size_t>(std::min(public_commuters, 3) - 1)];
    }
    return cost;
}

std::string_view to_string(FamilyType type) {
    switch (type) {
    case FamilyType::lone_parent:
        return "lone_parent";
    case FamilyType::couple_with_children:
        return "couple_with_children";
    case FamilyType::other_with_children:
        return "other_with_children";
    }
    return "?";
}

std::optional<FamilyType> parse_family_type(std::string_view text) {
    for (const auto type :
         {FamilyType::lone_parent, FamilyType::couple_with_children, FamilyType::other_with_children}) {
        if (to_string(type) == text) {
            return type;
        }
    }
    return std::nullopt;
}

std::optional<FamilyType> family_type(const Population &population, std::size_t household_index) {
    int adults = 0;
    int children = 0;
    for (const auto i : population.members(household_index)) {
        (population.persons()[i].age < 18 ? children : adults) += 1;
    }
    if (children == 0) {
        return std::nullopt;
    }
    if (adults <= 1) {
        return FamilyType::lone_parent;
    }
    if (adults == 2 && children <= 3) {
        return FamilyType::couple_with_children;
    }
    return FamilyType::other_with_children;
}

double ChildcareCostGrid::at(FamilyType type, int decile) const {
    if (decile < 1 || decile > 10) {
        throw DomainError("decile must lie in 1..10, got " + std::to_string(decile));
    }
    return cells[static_cast<std::size_t>(type)][static_cast<std::size_t>(decile - 1)];
}

ChildcareCostGrid ChildcareCostGrid::load(const std::filesystem::path &path) {
    const auto table = DelimitedTable::read(path);
    std::vector<std::string_view> columns{"family_type"};
    std::vector<std::string> names;
    for (int d = 1; d <= 10; ++d) {
        names.push_back("d" + std::to_string(d));
    }
    columns.insert(columns.end(), names.begin(), names.end());
    table.require_columns(columns);
    ChildcareCostGrid grid;
    std::vector<Issue> issues;
    std::array<bool, kFamilyTypeCount> seen{};
    for (const auto &row : table.rows()) {
        const auto &label = table.field(row, "family_type");
        const auto type = parse_family_type(label);
        if (!type) {
            if (label != "total") {
                issues.push_back(Issue{table.source(), row.line, "family_type", "unknown family type '" + label + "'"});
            }
            continue;
        }
        seen[static_cast<std::size_t>(*type)] = true;
        for (std::size_t d = 0; d < 10; ++d) {
            const auto v = parse_double(table.field(row, names[d]));
            if (!v || *v < 0.0) {
                issues.push_back(Issue{table.source(), row.line, names[d], "expected a non-negative number"});
                continue;
            }
            grid.cells[static_cast<std::size_t>(*type)][d] = *v;
        }
    }
    for (std::size_t t = 0; t < kFamilyTypeCount; ++t) {
        if (!seen[t]) {
            issues.push_back(Issue{table.source(), 0, "family_type",
                                   "missing row '" + std::string(to_string(static_cast<FamilyType>(t))) + "'"});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return grid;
}

int calibrate_childcare(std::vector<ChildcareUnit> &units, const ChildcareCostGrid &grid) {
    // (type, decile) -> unit positions
    std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (units[i].type) {
            if (units[i].decile < 1 || units[i].decile > 10) {
                throw DomainError("decile must lie in 1..10, got " + std::to_string(units[i].decile));
            }
            cells[{static_cast<int>(*units[i].type), units[i].decile}].push_back(i);
        } else if (units[i].expenditure != 0.0) {
            throw DomainError("household " + std::to_string(units[i].id) + " has childcare costs but no children");
        }
    }
    int calibrated = 0;
    for (const auto &[cell, positions] : cells) {
        double weighted = 0.0;
        double total = 0.0;
        for (const auto i : positions) {
            weighted += units[i].weight * units[i].expenditure;
            total += units[i].weight;
        }
        if (!(weighted > 0.0)) {
            continue;
        }
        const double target = grid.at(static_cast<FamilyType>(cell.first), cell.second);
        const double factor = target / (weighted / total);
        for (const auto i : positions) {
            units[i].expenditure *= factor;
        }
        ++calibrated;
    }
    return calibrated;
}

Covariates childcare_covariates(const Household &household, int workers, int adults, double eq_income_weekly,
                                bool squared_term) {
    Covariates x;
    x["n_children_0_4"] = household.n_children_0_4;
    x["n_children"] = household.n_children_under14;
    x["eq_disposable_income"] = eq_income_weekly;
    if (squared_term) {
        x["eq_disposable_income_sq"] = eq_income_weekly * eq_income_weekly;
    }
    const bool lone_parent_working = adults == 1 && workers >= 1;
    if (workers >= 2 || lone_parent_working) {
        x["d_two_earners_or_lone_parent_working"] = 1.0;
    }
    return x;
}

Money housing_cost(const Household &household, bool deferred) {
    switch (household.tenure) {
    case Tenure::owner_outright:
        return Money{};
    case Tenure::mortgage:
        return deferred ? Money{} : household.mortgage_payment;
    case Tenure::renter:
        return household.rent;
    }
    return Money{};
}

std::size_t CapitalHoldingsGrid::age_row(int age) {
    if (age < 0) {
        throw DomainError("negative age");
    }
    if (age < 35) return 0;
    if (age < 45) return 1;
    if (age < 55) return 2;
    if (age < 65) return 3;
    return 4;
}

double CapitalHoldingsGrid::participant_change(std::size_t age_row, std::size_t quintile) const {
    if (age_row >= 5 || quintile >= 5) {
        throw DomainError("capital grid cell out of range");
    }
    return holding_thousands[age_row][quintile] * index_change_factor;
}

namespace {

std::array<std::array<double, 5>, 5> load_age_quintile_grid(const std::filesystem::path &path, bool probabilities) {
    const auto table = DelimitedTable::read(path);
    table.require_columns({"age_group", "q1", "q2", "q3", "q4", "q5"});
    std::array<std::array<double, 5>, 5> grid{};
    std::array<bool, 5> seen{};
    std::vector<Issue> issues;
    for (const auto &row : table.rows()) {
        const auto &label = table.field(row, "age_group");
        if (label == "total") {
            continue;
        }
        const auto age = parse_integer(label);
        const auto it = age ? std::find(CapitalHoldingsGrid::kAgeRows.begin(), CapitalHoldingsGrid::kAgeRows.end(), *age)
                            : CapitalHoldingsGrid::kAgeRows.end();
        if (it == CapitalHoldingsGrid::kAgeRows.end()) {
            issues.push_back(Issue{table.source(), row.line, "age_group", "expected one of 30, 40, 50, 60, 70 or total"});
            continue;
        }
        const auto r = static_cast<std::size_t>(it - CapitalHoldingsGrid::kAgeRows.begin());
        seen[r] = true;
        for (std::size_t q = 0; q < 5; ++q) {
            const std::string column = "q" + std::to_string(q + 1);
            const auto v = parse_double(table.field(row, column));
            if (!v || *v < 0.0 || (probabilities && *v > 1.0)) {
                issues.push_back(Issue{table.source(), row.line, column,
                                       probabilities ? "expected a share in [0,1]" : "expected a non-negative number"});
                continue;
            }
            grid[r][q] = *v;
        }
    }
    for (std::size_t r = 0; r < 5; ++r) {
        if (!seen[r]) {
            issues.push_back(Issue{table.source(), 0, "age_group",
                                   "missing row " + std::to_string(CapitalHoldingsGrid::kAgeRows[r])});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return grid;
}

} // namespace

CapitalHoldingsGrid CapitalHoldingsGrid::load(const std::filesystem::path &participation_path,
                                              const std::filesystem::path &holding_path, double index_change_factor) {
    CapitalHoldingsGrid grid;
    grid.participation = load_age_quintile_grid(participation_path, true);
    grid.holding_thousands = load_age_quintile_grid(holding_path, false);
    grid.index_change_factor = index_change_factor;
    return grid;
}

double capital_change(const Person &person, int quintile, const CapitalHoldingsGrid &grid, std::uint64_t seed) {
    if (quintile < 0 || quintile > 4) {
        throw DomainError("income quintile must lie in 0..4, got " + std::to_string(quintile));
    }
    if (person.age < 18 || grid.index_change_factor == 0.0) {
        return 0.0;
    }
    const std::size_t row = CapitalHoldingsGrid::age_row(person.age);
    const auto q = static_cast<std::size_t>(quintile);
    if (keyed_uniform(seed, person.person_id, "capital-participation") >= grid.participation[row][q]) {
        return 0.0;
    }
    return grid.participant_change(row, q) * 1000.0;
}

} // namespace nowcast
