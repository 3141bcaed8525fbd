#include "core/metrics.hpp"

#include "core/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nowcast {

std::string_view definition_label(IncomeDefinition definition) {
    switch (definition) {
    case IncomeDefinition::market:
        return "Market Income";
    case IncomeDefinition::gross:
        return "Gross Income";
    case IncomeDefinition::disposable:
        return "Disposable Income";
    case IncomeDefinition::adjusted:
        return "Disposable Income*";
    }
    return "?";
}

double EquivalenceScale::factor(std::span<const int> ages) const {
    if (ages.empty()) {
        throw DomainError("cannot equivalise income of an empty household");
    }
    int adults = 0;
    int children = 0;
    for (const int age : ages) {
        (age >= adult_age ? adults : children) += 1;
    }
    if (adults == 0) {
        // the first member stands in for the head of household
        return first_adult + child * (children - 1);
    }
    return first_adult + other_adult * (adults - 1) + child * children;
}

double equivalize(double income, std::span<const int> ages, const EquivalenceScale &scale) {
    return income / scale.factor(ages);
}

namespace {

void check_inputs(std::span<const double> values, std::span<const double> weights) {
    if (values.empty()) {
        throw DomainError("at least one value is required");
    }
    if (values.size() != weights.size()) {
        throw DomainError("values and weights differ in length");
    }
    for (const double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw DomainError("weights must be positive and finite");
        }
    }
    for (const double v : values) {
        if (!std::isfinite(v)) {
            throw DomainError("values must be finite");
        }
    }
}

std::vector<int> assign_groups(std::span<const double> values, std::span<const double> weights,
                               std::span<const std::int64_t> ids, int groups) {
    check_inputs(values, weights);
    if (ids.size() != values.size()) {
        throw DomainError("ids and values differ in length");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) {
            return values[a] < values[b];
        }
        return ids[a] < ids[b];
    });
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    std::vector<int> out(values.size());
    double before = 0.0;
    for (const auto i : order) {
        const int g = static_cast<int>(std::floor(groups * before / total)) + 1;
        out[i] = std::min(groups, g);
        before += weights[i];
    }
    return out;
}

} // namespace

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
    check_inputs(values, weights);
    double sum = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum += weights[i] * values[i];
        total += weights[i];
    }
    return sum / total;
}

double weighted_gini(std::span<const double> values, std::span<const double> weights) {
    check_inputs(values, weights);
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double wx = 0.0;
    double numerator = 0.0;
    double cumulative = 0.0;
    bool dispersed = false;
    for (const auto i : order) {
        cumulative += weights[i];
        wx += weights[i] * values[i];
        numerator += weights[i] * values[i] * (2.0 * cumulative - weights[i] - total);
        dispersed = dispersed || values[i] != values[order.front()];
    }
    if (!dispersed) {
        return 0.0;
    }
    if (wx == 0.0) {
        throw DomainError("Gini is undefined for a zero mean with dispersion");
    }
    return numerator / (total * wx);
}

double weighted_gini_pairwise(std::span<const double> values, std::span<const double> weights) {
    check_inputs(values, weights);
    double total = 0.0;
    double wx = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        total += weights[i];
        wx += weights[i] * values[i];
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = 0; j < values.size(); ++j) {
            sum += weights[i] * weights[j] * std::abs(values[i] - values[j]);
        }
    }
    if (sum == 0.0) {
        return 0.0;
    }
    if (wx == 0.0) {
        throw DomainError("Gini is undefined for a zero mean with dispersion");
    }
    const double mean = wx / total;
    return sum / (2.0 * total * total * mean);
}

std::vector<int> assign_deciles(std::span<const double> values, std::span<const double> weights,
                                std::span<const std::int64_t> ids) {
    return assign_groups(values, weights, ids, 10);
}

std::vector<int> assign_quintiles(std::span<const double> values, std::span<const double> weights,
                                  std::span<const std::int64_t> ids) {
    auto groups = assign_groups(values, weights, ids, 5);
    for (auto &g : groups) {
        g -= 1;
    }
    return groups;
}

Decomposition redistribution_decomposition(double gini_market, double gini_gross, double gini_disposable,
                                           double gini_adjusted) {
    return Decomposition{gini_gross - gini_market, gini_disposable - gini_gross, gini_adjusted - gini_disposable};
}

std::array<double, 10> decile_means(std::span<const double> values, std::span<const double> weights,
                                    std::span<const int> deciles) {
    if (values.size() != weights.size() || values.size() != deciles.size()) {
        throw DomainError("values, weights and deciles differ in length");
    }
    std::array<double, 10> sum{};
    std::array<double, 10> total{};
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (deciles[i] < 1 || deciles[i] > 10) {
            throw DomainError("decile out of range");
        }
        const auto d = static_cast<std::size_t>(deciles[i] - 1);
        sum[d] += weights[i] * values[i];
        total[d] += weights[i];
    }
    std::array<double, 10> out{};
    for (std::size_t d = 0; d < 10; ++d) {
        out[d] = total[d] > 0.0 ? sum[d] / total[d] : 0.0;
    }
    return out;
}

DistributionSummary summarize(const IncomeVectors &wave, const std::vector<int> &ranking_deciles) {
    DistributionSummary out;
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        out.mean[k] = weighted_mean(wave.values[k], wave.weights);
        out.gini[k] = weighted_gini(wave.values[k], wave.weights);
        const auto means = decile_means(wave.values[k], wave.weights, ranking_deciles);
        for (std::size_t d = 0; d < 10; ++d) {
            out.deciles[d][k] = means[d];
        }
    }
    out.decomposition = redistribution_decomposition(out.gini[0], out.gini[1], out.gini[2], out.gini[3]);
    return out;
}

} // namespace nowcast
