#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace nowcast {

/// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the bytes of `text`.
constexpr std::uint64_t hash_name(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// A random stream keyed by (global seed, unit id, model/stratum name).
///
/// Every draw for a unit depends only on its key, never on iteration order
/// or thread count. Conversions to uniform/normal/logistic are done here
/// rather than through <random> distributions so results are identical
/// across standard library implementations.
class KeyedStream {
  public:
    KeyedStream(std::uint64_t seed, std::int64_t id, std::string_view key)
        : state_(mix64(mix64(seed ^ hash_name(key)) ^ static_cast<std::uint64_t>(id))) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (one variate per call).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Standard logistic variate.
    double logistic() {
        const double u = uniform();
        return std::log(u / (1.0 - u));
    }

  private:
    std::uint64_t state_;
};

/// Convenience: the first uniform of the keyed stream.
inline double keyed_uniform(std::uint64_t seed, std::int64_t id, std::string_view key) {
    return KeyedStream(seed, id, key).uniform();
}

} // namespace nowcast
