#pragma once

#include "core/report.hpp"
#include "core/scenario.hpp"
#include "core/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nowcast {

/// Everything a run or validation needs, as given on the command line.
struct RunRequest {
    std::filesystem::path scenario;
    std::optional<std::filesystem::path> population_dir;
    std::optional<std::filesystem::path> synth_config;
    std::filesystem::path data_dir;
    std::filesystem::path policy_dir; // defaults to data_dir/policy when empty
    std::optional<std::uint64_t> seed; // overrides the scenario seed
    unsigned threads = 1;
};

struct PreparedRun {
    ScenarioConfig scenario;
    Population population;
    ModelInputs inputs;
    ControlTotals controls;
    RunOptions options;
    RunManifest manifest;
};

/// Loads and validates every input. Validation problems from all files are
/// reported together in one ValidationError; a missing or unreadable file
/// raises IoError instead.
PreparedRun prepare_run(const RunRequest &request);

/// Simulates every wave and returns the tables plus manifest.json.
std::vector<OutputFile> execute_run(const PreparedRun &run);

/// The effective configuration with every default filled in.
std::string describe_config(const RunRequest &request);

std::filesystem::path default_data_dir();

} // namespace nowcast
