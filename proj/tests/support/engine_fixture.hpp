#pragma once

#include "core/population.hpp"
#include "core/scenario.hpp"
#include "support/paths.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nowcast::testing {

inline const ModelInputs &shipped_inputs() {
    static const ModelInputs inputs = ModelInputs::load(data_dir(), policy_dir());
    return inputs;
}

inline const ControlTotals &shipped_controls() {
    static const ControlTotals controls = ControlTotals::load(data_dir() / "controls.csv");
    return controls;
}

inline const Population &fixture_population() {
    static const Population population = load_population(fixtures_dir() / "population");
    return population;
}

inline Engine make_engine(const ControlTotals &controls, std::uint64_t seed = 20200505, unsigned threads = 1) {
    RunOptions options;
    options.seed = seed;
    options.threads = threads;
    return Engine(shipped_inputs(), controls, options);
}

inline WavePoint wave(std::string label, Date date, WaveSwitches switches = {}) {
    WavePoint w;
    w.label = std::move(label);
    w.date = date;
    w.switches = switches;
    return w;
}

/// The shipped crisis waves.
inline std::vector<WavePoint> crisis_waves() {
    return load_scenario(data_dir() / "scenarios" / "crisis.scn").waves;
}

/// Controls holding only the series whose key starts with one of `prefixes`.
inline ControlTotals controls_subset(const ControlTotals &controls, const std::vector<std::string> &prefixes) {
    std::string text = "stratum_key,date,target\n";
    for (const auto &[key, points] : controls.series()) {
        bool keep = false;
        for (const auto &prefix : prefixes) {
            keep |= key.starts_with(prefix);
        }
        if (!keep) {
            continue;
        }
        for (const auto &point : points) {
            text += key + "," + format_date(point.date) + "," + std::to_string(point.value) + "\n";
        }
    }
    return ControlTotals::parse(text, "subset");
}

/// Exact adjusted-income identity on every household.
inline bool identity_holds(const WaveResult &wave) {
    for (const auto &h : wave.households) {
        if (h.gross != h.market + h.benefits || h.disposable != h.gross - h.tax ||
            h.adjusted != h.disposable - h.housing - h.capital - h.work) {
            return false;
        }
    }
    return true;
}

inline bool same_households(const WaveResult &a, const WaveResult &b) {
    if (a.households.size() != b.households.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.households.size(); ++i) {
        const auto &x = a.households[i];
        const auto &y = b.households[i];
        if (x.household_id != y.household_id || x.market != y.market || x.benefits != y.benefits ||
            x.tax != y.tax || x.housing != y.housing || x.capital != y.capital || x.work != y.work ||
            x.adjusted != y.adjusted) {
            return false;
        }
    }
    return true;
}

} // namespace nowcast::testing
