#pragma once

#include "core/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nowcast {

struct OutputFile {
    std::string name;
    std::string content;
};

/// table8.csv (means), table9.csv (Gini and change from the first wave),
/// table10.csv (redistribution), table_e1.csv (decile means) and one
/// summary_<label>.csv per wave.
std::vector<OutputFile> render_tables(const ScenarioResult &result);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path &path);
/// Digest over the names and digests of the regular files in `dir`, sorted
/// by name.
std::string directory_digest(const std::filesystem::path &dir);

struct RunManifest {
    struct Input {
        std::string role; // e.g. "population/households.csv"
        std::string sha256;
    };
    std::uint64_t seed = 0;
    double employer_top_up = 1.0;
    std::string capital_booking;
    std::vector<Input> inputs;
    std::string schedule_digest;
    std::vector<std::pair<std::string, std::string>> waves; // label, date
    std::string version;
};

/// Pretty-printed JSON with a fixed key order and no timestamps or absolute
/// paths.
std::string render_manifest(const RunManifest &manifest);

/// Creates `dir` and writes every file; throws IoError on failure.
void write_outputs(const std::filesystem::path &dir, const std::vector<OutputFile> &files);

/// Lower-case file-name-safe form of a wave label.
std::string file_label(std::string_view label);

} // namespace nowcast
