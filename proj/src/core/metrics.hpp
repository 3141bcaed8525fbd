#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nowcast {

enum class IncomeDefinition { market, gross, disposable, adjusted };
inline constexpr std::size_t kDefinitionCount = 4;
inline constexpr std::array<IncomeDefinition, kDefinitionCount> kDefinitions{
    IncomeDefinition::market, IncomeDefinition::gross, IncomeDefinition::disposable, IncomeDefinition::adjusted};

/// Column label used in the output tables ("Market Income", ...).
std::string_view definition_label(IncomeDefinition definition);

/// Modified OECD scale by default: 1 for the first adult, 0.5 for each
/// further member aged `adult_age` or over, 0.3 for each younger member.
struct EquivalenceScale {
    double first_adult = 1.0;
    double other_adult = 0.5;
    double child = 0.3;
    int adult_age = 14;

    /// Scale value for a household with these member ages. A household of
    /// children only counts its first member as the first adult.
    double factor(std::span<const int> ages) const;
};

/// income / scale.factor(ages). Throws DomainError for an empty household.
double equivalize(double income, std::span<const int> ages, const EquivalenceScale &scale = {});

double weighted_mean(std::span<const double> values, std::span<const double> weights);

/// Weighted Gini in O(n log n). Throws DomainError for empty input,
/// non-positive weights, or a zero mean with dispersion. All-zero values
/// give 0.
double weighted_gini(std::span<const double> values, std::span<const double> weights);
/// The definitional double sum, O(n^2); used as a reference.
double weighted_gini_pairwise(std::span<const double> values, std::span<const double> weights);

/// Decile (1..10) of each unit by ascending value, ties by ascending id.
/// A unit belongs to the decile in which its cumulative weight starts, so
/// each group holds a tenth of the weight to within one unit weight.
std::vector<int> assign_deciles(std::span<const double> values, std::span<const double> weights,
                                std::span<const std::int64_t> ids);
/// Quintile (0..4) by the same rule.
std::vector<int> assign_quintiles(std::span<const double> values, std::span<const double> weights,
                                  std::span<const std::int64_t> ids);

struct Decomposition {
    double benefits = 0.0; // G_gross - G_market
    double taxes = 0.0;    // G_disposable - G_gross
    double expenses = 0.0; // G_adjusted - G_disposable
};

Decomposition redistribution_decomposition(double gini_market, double gini_gross, double gini_disposable,
                                           double gini_adjusted);

/// Person-level equivalised incomes for one wave, one vector per definition.
struct IncomeVectors {
    std::vector<std::int64_t> person_ids;
    std::vector<double> weights;
    std::array<std::vector<double>, kDefinitionCount> values;
};

struct DistributionSummary {
    std::array<double, kDefinitionCount> mean{};
    std::array<double, kDefinitionCount> gini{};
    /// Decile means, [decile][definition].
    std::array<std::array<double, kDefinitionCount>, 10> deciles{};
    Decomposition decomposition;
};

/// Means, Gini and decomposition of `wave`, with deciles taken from
/// `ranking` (usually the baseline adjusted income of the same persons).
DistributionSummary summarize(const IncomeVectors &wave, const std::vector<int> &ranking_deciles);

/// Per-decile weighted means of `values` for the given decile assignment.
std::array<double, 10> decile_means(std::span<const double> values, std::span<const double> weights,
                                    std::span<const int> deciles);

} // namespace nowcast
