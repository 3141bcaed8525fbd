#include "core/keyvalue.hpp"

#include "core/delimited.hpp"
#include "core/error.hpp"

#include <charconv>
#include <cmath>

namespace nowcast {

const KeyValueFile::Entry *KeyValueFile::Section::find(std::string_view key) const {
    for (const auto &entry : entries) {
        if (entry.key == key) {
            return &entry;
        }
    }
    return nullptr;
}

KeyValueFile KeyValueFile::read(const std::filesystem::path &path) {
    return parse(read_text_file(path), path.filename().string());
}

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
    KeyValueFile file;
    file.source_ = std::move(source);
    file.sections_.push_back(Section{});
    std::vector<Issue> issues;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = trim(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                issues.push_back(Issue{file.source_, line_no, "", "unterminated section header"});
                continue;
            }
            file.sections_.push_back(
                Section{std::string(trim(line.substr(1, line.size() - 2))), line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back(Issue{file.source_, line_no, "", "expected key = value"});
            continue;
        }
        file.sections_.back().entries.push_back(Entry{std::string(trim(line.substr(0, eq))),
                                                      std::string(trim(line.substr(eq + 1))), line_no});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return file;
}

std::optional<bool> parse_bool(std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "on" || text == "yes" || text == "1") {
        return true;
    }
    if (text == "false" || text == "off" || text == "no" || text == "0") {
        return false;
    }
    return std::nullopt;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) {
        return std::nullopt;
    }
    if (text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

} // namespace nowcast
