#include "core/error.hpp"
#include "core/expenses.hpp"
#include "core/igm.hpp"
#include "support/paths.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace nowcast;

namespace {

const CommuteCostTable &commute_table() {
    static const CommuteCostTable table = CommuteCostTable::load(testing::data_dir() / "commute_costs.csv");
    return table;
}

CapitalHoldingsGrid capital_grid(double factor) {
    return CapitalHoldingsGrid::load(testing::data_dir() / "capital_participation.csv",
                                     testing::data_dir() / "capital_holdings.csv", factor);
}

Person adult(PersonId id, HouseholdId hh, int age) {
    Person p;
    p.person_id = id;
    p.household_id = hh;
    p.age = age;
    p.work_status = WorkStatus::inactive;
    return p;
}

Person child(PersonId id, HouseholdId hh, int age) {
    Person p = adult(id, hh, age);
    p.work_status = age < 16 ? WorkStatus::child : WorkStatus::student;
    return p;
}

} // namespace

TEST_CASE("commuting costs by mode and count") {
    CHECK(commuting_cost(commute_table(), 2, 0).str() == "13.59");
    CHECK(commuting_cost(commute_table(), 0, 1).str() == "1.76");
    CHECK(commuting_cost(commute_table(), 0, 0).cents() == 0);
    CHECK(commuting_cost(commute_table(), 1, 1).str() == "9.17");
    CHECK(commuting_cost(commute_table(), 5, 0) == commuting_cost(commute_table(), 3, 0));
    for (std::size_t i = 0; i < 3; ++i) {
        const auto diff = commute_table().total_weekly[i] - commute_table().fuel_weekly[i] -
                          commute_table().public_weekly[i];
        CHECK(std::llabs(diff.cents()) <= 1);
    }
}

TEST_CASE("commute tables must add up") {
    const auto dir = std::filesystem::temp_directory_path() / "nowcast_commute_bad";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "commute.csv");
        out << "workers,fuel_increase,public_increase,fuel_weekly,public_weekly,total_weekly\n"
               "1,0.263,0.172,7.41,1.76,9.50\n2,0.482,0.253,13.59,0.83,14.42\n3,0.721,0.595,20.33,3.49,23.82\n";
    }
    CHECK_THROWS_AS(CommuteCostTable::load(dir / "commute.csv"), ValidationError);
    CHECK_THROWS_AS(CommuteCostTable::load(dir / "missing.csv"), IoError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("non-workers do not commute") {
    const auto table = CoefficientTable::load(testing::data_dir() / "coefficients.csv");
    Person p = adult(1, 1, 40);
    const auto choice = commute_mode(p, table.at("public_transport"), table.at("private_transport"), 3);
    CHECK(choice.mode == CommuteMode::none);

    p.work_status = WorkStatus::employee;
    p.industry = Sector::agriculture_mining;
    p.occupation = 9;
    p.age = 17;
    const auto worker = commute_mode(p, table.at("public_transport"), table.at("private_transport"), 3);
    CHECK(worker.p_public == doctest::Approx(0.0552527).epsilon(1e-6));
}

TEST_CASE("housing costs") {
    Household h;
    h.tenure = Tenure::owner_outright;
    CHECK(housing_cost(h, false).cents() == 0);
    h.tenure = Tenure::mortgage;
    h.mortgage_payment = Money::from_cents(100000);
    CHECK(housing_cost(h, false).str() == "1000.00");
    CHECK(housing_cost(h, true).cents() == 0);
    h.tenure = Tenure::renter;
    h.mortgage_payment = Money{};
    h.rent = Money::from_cents(90000);
    CHECK(housing_cost(h, true).str() == "900.00");
}

TEST_CASE("family types") {
    std::vector<Household> households(4);
    std::vector<Person> persons;
    for (int i = 0; i < 4; ++i) {
        households[i].household_id = i + 1;
    }
    persons.push_back(adult(1, 1, 40));
    persons.push_back(child(2, 1, 3));
    persons.push_back(adult(3, 2, 40));
    persons.push_back(adult(4, 2, 41));
    persons.push_back(child(5, 2, 8));
    persons.push_back(adult(6, 3, 70));
    persons.push_back(adult(7, 4, 40));
    persons.push_back(adult(8, 4, 41));
    persons.push_back(adult(9, 4, 19));
    persons.push_back(child(10, 4, 12));
    for (auto &p : persons) {
        households[static_cast<std::size_t>(p.household_id - 1)].member_ids.push_back(p.person_id);
    }
    const Population pop(households, persons, make_date(2019, 12, 31));
    CHECK(family_type(pop, 0) == FamilyType::lone_parent);
    CHECK(family_type(pop, 1) == FamilyType::couple_with_children);
    CHECK_FALSE(family_type(pop, 2));
    CHECK(family_type(pop, 3) == FamilyType::other_with_children);
}

TEST_CASE("childcare calibration matches the published cell means") {
    const auto grid = ChildcareCostGrid::load(testing::data_dir() / "childcare_costs.csv");
    CHECK(grid.at(FamilyType::couple_with_children, 5) == 14.7);
    CHECK(grid.at(FamilyType::lone_parent, 10) == 268.5);
    CHECK_THROWS_AS(grid.at(FamilyType::lone_parent, 11), DomainError);

    std::vector<ChildcareUnit> units;
    for (int i = 0; i < 40; ++i) {
        ChildcareUnit u;
        u.id = i;
        u.weight = 0.5 + (i % 3) * 0.25;
        u.type = i % 2 == 0 ? FamilyType::couple_with_children : FamilyType::lone_parent;
        u.decile = 5;
        u.expenditure = i % 4 == 0 ? 0.0 : 20.0 + i;
        units.push_back(u);
    }
    ChildcareUnit no_children;
    no_children.id = 99;
    units.push_back(no_children);
    ChildcareUnit empty_cell;
    empty_cell.id = 100;
    empty_cell.type = FamilyType::other_with_children;
    empty_cell.decile = 2;
    units.push_back(empty_cell);

    CHECK(calibrate_childcare(units, grid) == 2);
    for (const auto type : {FamilyType::couple_with_children, FamilyType::lone_parent}) {
        double weighted = 0.0;
        double total = 0.0;
        for (const auto &u : units) {
            if (u.type == type) {
                weighted += u.weight * u.expenditure;
                total += u.weight;
            }
        }
        CHECK(weighted / total == doctest::Approx(grid.at(type, 5)).epsilon(1e-9));
    }
    CHECK(units[40].expenditure == 0.0);
    CHECK(units[41].expenditure == 0.0);
    CHECK(units[0].expenditure == 0.0);
}

TEST_CASE("capital losses among participants equal holding times the factor") {
    const auto grid = capital_grid(-0.3532);
    CHECK(grid.participant_change(3, 4) == doctest::Approx(-0.6227).epsilon(1e-3));
    CHECK(grid.participant_change(0, 0) == doctest::Approx(-0.0003532));
    CHECK_THROWS_AS(grid.participant_change(5, 0), DomainError);

    Person p = adult(1, 1, 62);
    int participants = 0;
    for (PersonId id = 0; id < 2000; ++id) {
        p.person_id = id;
        const double change = capital_change(p, 4, grid, 11);
        if (change != 0.0) {
            ++participants;
            CHECK(change == doctest::Approx(1763.0 * -0.3532));
        }
    }
    CHECK(participants > 0);
    CHECK_THROWS_AS(capital_change(p, 5, grid, 11), DomainError);
}

TEST_CASE("a zero index change means no capital losses") {
    const auto grid = capital_grid(0.0);
    Person p = adult(1, 1, 70);
    for (PersonId id = 0; id < 500; ++id) {
        p.person_id = id;
        CHECK(capital_change(p, 4, grid, 3) == 0.0);
    }
}

TEST_CASE("capital age rows") {
    CHECK(CapitalHoldingsGrid::age_row(18) == 0);
    CHECK(CapitalHoldingsGrid::age_row(35) == 1);
    CHECK(CapitalHoldingsGrid::age_row(54) == 2);
    CHECK(CapitalHoldingsGrid::age_row(64) == 3);
    CHECK(CapitalHoldingsGrid::age_row(90) == 4);
}
