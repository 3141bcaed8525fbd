#include "core/report.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace nowcast {

namespace {

std::string fixed(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, value);
    std::string text(buf);
    // "-0.000" and "0.000" must not differ between runs that agree.
    if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
        text.erase(0, 1);
    }
    return text;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

std::string definitions_header(std::string_view first) {
    std::string line(first);
    for (const auto d : kDefinitions) {
        line += ",";
        line += definition_label(d);
    }
    return line + "\n";
}

std::string table8(const ScenarioResult &result) {
    std::string out = "Income definition";
    for (const auto &wave : result.waves) {
        out += "," + csv_field(wave.label);
    }
    out += "\n";
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        out += std::string(definition_label(kDefinitions[k]));
        for (const auto &summary : result.summaries) {
            out += "," + fixed(summary.mean[k], 2);
        }
        out += "\n";
    }
    return out;
}

std::string table9(const ScenarioResult &result) {
    std::string out = definitions_header("");
    out += "Gini,,,,\n";
    for (std::size_t w = 0; w < result.waves.size(); ++w) {
        out += csv_field(result.waves[w].label);
        for (std::size_t k = 0; k < kDefinitionCount; ++k) {
            out += "," + fixed(result.summaries[w].gini[k], 6);
        }
        out += "\n";
    }
    out += "Change,,,,\n";
    for (std::size_t w = 1; w < result.waves.size(); ++w) {
        out += csv_field(result.waves[w].label);
        for (std::size_t k = 0; k < kDefinitionCount; ++k) {
            out += "," + fixed(result.summaries[w].gini[k] - result.summaries[0].gini[k], 6);
        }
        out += "\n";
    }
    return out;
}

std::string table10(const ScenarioResult &result) {
    std::string out = "Redistribution,Benefits,Taxes,Work Expenses and Housing Costs\n";
    for (std::size_t w = 0; w < result.waves.size(); ++w) {
        const auto &d = result.summaries[w].decomposition;
        out += csv_field(result.waves[w].label) + "," + fixed(d.benefits, 6) + "," + fixed(d.taxes, 6) + "," +
               fixed(d.expenses, 6) + "\n";
    }
    return out;
}

std::string decile_block(const DistributionSummary &summary) {
    std::string out;
    for (std::size_t d = 0; d < 10; ++d) {
        out += std::to_string(d + 1);
        for (std::size_t k = 0; k < kDefinitionCount; ++k) {
            out += "," + fixed(summary.deciles[d][k], 1);
        }
        out += "\n";
    }
    out += "Total";
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        out += "," + fixed(summary.mean[k], 1);
    }
    return out + "\n";
}

std::string table_e1(const ScenarioResult &result) {
    std::string out = "Wave,Decile";
    for (const auto d : kDefinitions) {
        out += ",";
        out += definition_label(d);
    }
    out += "\n";
    for (std::size_t w = 0; w < result.waves.size(); ++w) {
        std::istringstream block(decile_block(result.summaries[w]));
        for (std::string line; std::getline(block, line);) {
            out += csv_field(result.waves[w].label) + "," + line + "\n";
        }
    }
    return out;
}

std::string wave_summary(const WaveResult &wave, const DistributionSummary &summary) {
    std::string out = "# wave=" + wave.label + "\n# date=" + format_date(wave.date) + "\n";
    out += definitions_header("Decile");
    out += decile_block(summary);
    out += "Gini";
    for (std::size_t k = 0; k < kDefinitionCount; ++k) {
        out += "," + fixed(summary.gini[k], 6);
    }
    return out + "\n";
}

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX *ctx) const { EVP_MD_CTX_free(ctx); }
};

} // namespace

std::vector<OutputFile> render_tables(const ScenarioResult &result) {
    if (result.waves.empty() || result.waves.size() != result.summaries.size()) {
        throw DomainError("cannot render an empty or incomplete scenario result");
    }
    std::vector<OutputFile> files{
        {"table8.csv", table8(result)},
        {"table9.csv", table9(result)},
        {"table10.csv", table10(result)},
        {"table_e1.csv", table_e1(result)},
    };
    for (std::size_t w = 0; w < result.waves.size(); ++w) {
        std::string name = "summary_" + file_label(result.waves[w].label) + ".csv";
        if (std::any_of(files.begin(), files.end(), [&](const OutputFile &f) { return f.name == name; })) {
            throw ValidationError("wave labels map to the same output file " + name);
        }
        files.push_back({std::move(name), wave_summary(result.waves[w], result.summaries[w])});
    }
    return files;
}

std::string sha256_hex(std::string_view bytes) {
    std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
        throw Error("SHA-256 computation failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path &path) { return sha256_hex(read_text_file(path)); }

std::string directory_digest(const std::filesystem::path &dir) {
    std::error_code ec;
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir, ec)) {
        if (entry.is_regular_file()) {
            files.push_back(entry.path());
        }
    }
    if (ec) {
        throw IoError("cannot list " + dir.string() + ": " + ec.message());
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto &file : files) {
        listing += file.filename().string() + " " + sha256_file(file) + "\n";
    }
    return sha256_hex(listing);
}

std::string render_manifest(const RunManifest &manifest) {
    nlohmann::ordered_json j;
    j["version"] = manifest.version;
    j["seed"] = manifest.seed;
    j["employer_top_up"] = manifest.employer_top_up;
    j["capital_booking"] = manifest.capital_booking;
    j["schedule_digest"] = manifest.schedule_digest;
    auto &inputs = j["inputs"] = nlohmann::ordered_json::array();
    for (const auto &input : manifest.inputs) {
        inputs.push_back({{"role", input.role}, {"sha256", input.sha256}});
    }
    auto &waves = j["waves"] = nlohmann::ordered_json::array();
    for (const auto &[label, date] : manifest.waves) {
        waves.push_back({{"label", label}, {"date", date}});
    }
    return j.dump(2) + "\n";
}

void write_outputs(const std::filesystem::path &dir, const std::vector<OutputFile> &files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    for (const auto &file : files) {
        const auto path = dir / file.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << file.content;
        out.close();
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
    }
}

std::string file_label(std::string_view label) {
    std::string out;
    for (const char c : label) {
        const auto u = static_cast<unsigned char>(c);
        out += std::isalnum(u) || c == '-' || c == '_' ? static_cast<char>(std::tolower(u)) : '_';
    }
    return out.empty() ? "wave" : out;
}

} // namespace nowcast
