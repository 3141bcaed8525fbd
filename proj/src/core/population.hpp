#pragma once

#include "core/date.hpp"
#include "core/error.hpp"
#include "core/money.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nowcast {

using PersonId = std::int64_t;
using HouseholdId = std::int64_t;

enum class Sex { male, female };
enum class Education { primary, secondary, university };
enum class Region { southern_eastern, border_midland_western };
enum class WorkStatus { employee, self_employed, unemployed, retired, inactive, student, child };
enum class CovidState { none, pup_recipient, ceib_recipient, wage_subsidised };
enum class Tenure { owner_outright, mortgage, renter };

/// The 17 sectors used for the recipient control totals.
enum class Sector : int {
    agriculture_mining,
    manufacturing,
    utilities,
    construction,
    wholesale_retail,
    transport_storage,
    accommodation_food,
    information_communication,
    financial_insurance,
    real_estate,
    professional_scientific,
    administrative_support,
    public_administration,
    education,
    health_social_work,
    arts_entertainment,
    other_sectors,
};
inline constexpr std::size_t kSectorCount = 17;

const std::array<Sector, kSectorCount> &all_sectors();
std::string_view sector_code(Sector sector);
/// Long label as printed in the recipient tables.
std::string_view sector_label(Sector sector);
std::optional<Sector> parse_sector(std::string_view code);

std::string_view to_string(Sex value);
std::string_view to_string(Education value);
std::string_view to_string(Region value);
std::string_view to_string(WorkStatus value);
std::string_view to_string(CovidState value);
std::string_view to_string(Tenure value);

std::optional<Sex> parse_sex(std::string_view text);
std::optional<Education> parse_education(std::string_view text);
std::optional<Region> parse_region(std::string_view text);
std::optional<WorkStatus> parse_work_status(std::string_view text);
std::optional<CovidState> parse_covid_state(std::string_view text);
std::optional<Tenure> parse_tenure(std::string_view text);

struct Person {
    PersonId person_id = 0;
    HouseholdId household_id = 0;
    int age = 0;
    Sex sex = Sex::male;
    Education education = Education::secondary;
    int occupation = 0; // 1..9, 0 when not working
    std::optional<Sector> industry;
    Region region = Region::southern_eastern;
    WorkStatus work_status = WorkStatus::inactive;
    Money employment_income;      // per year
    Money self_employment_income; // per year, may be negative
    Money capital_income;         // per year
    Money private_pension;        // per year
    bool essential_worker = false;
    bool home_work_capable = false;
    CovidState covid_state = CovidState::none;

    bool is_worker() const {
        return work_status == WorkStatus::employee || work_status == WorkStatus::self_employed;
    }
};

struct Household {
    HouseholdId household_id = 0;
    double weight = 1.0;
    std::vector<PersonId> member_ids;
    Tenure tenure = Tenure::renter;
    Money mortgage_payment;      // per month
    Money rent;                  // per month
    bool childcare_user = false;
    Money childcare_expenditure; // per week
    int n_children_0_4 = 0;
    int n_children_under14 = 0;
};

/// Validated microdata. Construction checks every schema and referential
/// invariant and throws ValidationError listing all violations. Immutable
/// afterwards; copies are cheap enough to derive modified populations.
class Population {
  public:
    Population(std::vector<Household> households, std::vector<Person> persons, Date base_period);

    const std::vector<Household> &households() const noexcept { return households_; }
    const std::vector<Person> &persons() const noexcept { return persons_; }
    Date base_period() const noexcept { return base_period_; }

    std::size_t person_index(PersonId id) const;
    std::size_t household_index(HouseholdId id) const;
    /// Indices into persons() of the members of households()[household_index].
    std::span<const std::size_t> members(std::size_t household_index) const {
        return members_[household_index];
    }
    /// Index into households() for persons()[person_index].
    std::size_t household_of(std::size_t person_index) const { return household_of_[person_index]; }
    double person_weight(std::size_t person_index) const {
        return households_[household_of_[person_index]].weight;
    }

  private:
    std::vector<Household> households_;
    std::vector<Person> persons_;
    Date base_period_;
    std::unordered_map<PersonId, std::size_t> person_index_;
    std::unordered_map<HouseholdId, std::size_t> household_index_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::size_t> household_of_;
};

/// Every invariant violation of the given records, without throwing.
std::vector<Issue> check_population(const std::vector<Household> &households,
                                    const std::vector<Person> &persons);

/// Reads `households.csv` and `persons.csv` from `dir`. Throws IoError for
/// missing files and ValidationError listing every schema or referential
/// problem found.
Population load_population(const std::filesystem::path &dir);
void save_population(const Population &population, const std::filesystem::path &dir);

std::string households_csv(const Population &population);
std::string persons_csv(const Population &population);

} // namespace nowcast
