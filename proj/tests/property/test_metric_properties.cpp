#include "core/metrics.hpp"
#include "core/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>

using namespace nowcast;

namespace {

struct Sample {
    std::vector<double> values;
    std::vector<double> weights;
};

Sample random_sample(std::uint64_t k) {
    KeyedStream rng(77, static_cast<std::int64_t>(k), "gini");
    Sample s;
    const int n = 1 + static_cast<int>(rng.next() % 60);
    for (int i = 0; i < n; ++i) {
        // Some ties, some zeros, a long right tail.
        const double u = rng.uniform();
        s.values.push_back(u < 0.1 ? 0.0 : u < 0.2 ? 100.0 : std::exp(4.0 + 2.0 * rng.normal()));
        s.weights.push_back(k % 3 == 0 ? 1.0 : 0.1 + 5.0 * rng.uniform());
    }
    if (s.values.size() == 1 || std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; })) {
        s.values.push_back(50.0);
        s.weights.push_back(1.0);
    }
    return s;
}

} // namespace

TEST_CASE("sorted Gini equals the double sum") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto s = random_sample(k);
        const double fast = weighted_gini(s.values, s.weights);
        const double slow = weighted_gini_pairwise(s.values, s.weights);
        CAPTURE(k);
        CHECK(std::abs(fast - slow) < 1e-12);
        CHECK(fast >= 0.0);
        CHECK(fast <= 1.0);
    }
}

TEST_CASE("Gini ignores scale and replication") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        const auto s = random_sample(k);
        const double g = weighted_gini(s.values, s.weights);
        auto scaled = s.values;
        for (auto &v : scaled) {
            v *= 3.7;
        }
        auto heavy = s.weights;
        for (auto &w : heavy) {
            w *= 0.25;
        }
        Sample twice = s;
        twice.values.insert(twice.values.end(), s.values.begin(), s.values.end());
        twice.weights.insert(twice.weights.end(), s.weights.begin(), s.weights.end());
        CHECK(weighted_gini(scaled, s.weights) == doctest::Approx(g).epsilon(1e-12));
        CHECK(weighted_gini(s.values, heavy) == doctest::Approx(g).epsilon(1e-12));
        CHECK(weighted_gini(twice.values, twice.weights) == doctest::Approx(g).epsilon(1e-12));
    }
}

TEST_CASE("decomposition terms telescope") {
    for (std::uint64_t k = 0; k < 200; ++k) {
        KeyedStream rng(8, static_cast<std::int64_t>(k), "decomp");
        const double m = rng.uniform(), g = rng.uniform(), d = rng.uniform(), a = rng.uniform();
        const auto t = redistribution_decomposition(m, g, d, a);
        CHECK(t.benefits + t.taxes + t.expenses == doctest::Approx(a - m).epsilon(1e-15));
        CHECK(t.benefits == g - m);
        CHECK(t.taxes == d - g);
        CHECK(t.expenses == a - d);
    }
}

TEST_CASE("deciles hold a tenth of the weight each") {
    for (std::uint64_t k = 0; k < 100; ++k) {
        KeyedStream rng(12, static_cast<std::int64_t>(k), "deciles");
        const int n = 10 + static_cast<int>(rng.next() % 400);
        std::vector<double> values, weights;
        std::vector<std::int64_t> ids;
        double total = 0.0, max_weight = 0.0;
        for (int i = 0; i < n; ++i) {
            values.push_back(std::floor(rng.uniform() * 50.0));
            weights.push_back(0.5 + rng.uniform());
            ids.push_back(i);
            total += weights.back();
            max_weight = std::max(max_weight, weights.back());
        }
        const auto deciles = assign_deciles(values, weights, ids);
        std::array<double, 10> mass{};
        for (int i = 0; i < n; ++i) {
            REQUIRE(deciles[i] >= 1);
            REQUIRE(deciles[i] <= 10);
            mass[deciles[i] - 1] += weights[i];
        }
        for (double w : mass) {
            CHECK(std::abs(w - total / 10.0) <= max_weight + 1e-9);
        }
        const auto means = decile_means(values, weights, deciles);
        for (int d = 1; d < 10; ++d) {
            if (mass[d] > 0.0 && mass[d - 1] > 0.0) {
                CHECK(means[d] >= means[d - 1]);
            }
        }
    }
}
