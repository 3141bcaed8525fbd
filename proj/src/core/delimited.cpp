#include "core/delimited.hpp"

#include "core/date.hpp"
#include "core/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace nowcast {

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split(std::string_view text, char delimiter) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(delimiter, start);
        out.emplace_back(trim(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw IoError("error reading " + path.string());
    }
    return buffer.str();
}

DelimitedTable DelimitedTable::read(const std::filesystem::path &path) {
    return parse(read_text_file(path), path.filename().string());
}

DelimitedTable DelimitedTable::parse(std::string_view text, std::string source) {
    DelimitedTable table;
    table.source_ = std::move(source);
    char delimiter = ',';
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        const auto line = trim(text.substr(start, end - start));
        ++line_no;
        start = end + 1;
        if (line.empty()) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        if (line.front() == '#') {
            if (!have_header) {
                const auto body = trim(line.substr(1));
                const auto eq = body.find('=');
                if (eq != std::string_view::npos) {
                    table.directives_.emplace_back(std::string(trim(body.substr(0, eq))),
                                                   std::string(trim(body.substr(eq + 1))));
                }
            }
            continue;
        }
        if (!have_header) {
            if (line.find(',') == std::string_view::npos && line.find('\t') != std::string_view::npos) {
                delimiter = '\t';
            }
            table.header_ = split(line, delimiter);
            have_header = true;
            continue;
        }
        auto fields = split(line, delimiter);
        if (fields.size() != table.header_.size()) {
            throw ValidationError({Issue{table.source_, line_no, "",
                                         "expected " + std::to_string(table.header_.size()) +
                                             " fields, found " + std::to_string(fields.size())}});
        }
        table.rows_.push_back(Row{line_no, std::move(fields)});
    }
    if (!have_header) {
        throw ValidationError({Issue{table.source_, 0, "", "missing header row"}});
    }
    return table;
}

std::optional<std::size_t> DelimitedTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

void DelimitedTable::require_columns(const std::vector<std::string_view> &names) const {
    std::vector<Issue> issues;
    for (auto name : names) {
        if (!column(name)) {
            issues.push_back(Issue{source_, 1, std::string(name), "missing column"});
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
}

const std::string &DelimitedTable::field(const Row &row, std::string_view name) const {
    const auto index = column(name);
    if (!index) {
        throw ValidationError({Issue{source_, 1, std::string(name), "missing column"}});
    }
    return row.fields[*index];
}

std::optional<Date> parse_date(std::string_view text) {
    text = trim(text);
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int parts[3] = {0, 0, 0};
    const std::size_t offsets[3] = {0, 5, 8};
    const std::size_t lengths[3] = {4, 2, 2};
    for (int p = 0; p < 3; ++p) {
        for (std::size_t i = 0; i < lengths[p]; ++i) {
            const char c = text[offsets[p] + i];
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
            parts[p] = parts[p] * 10 + (c - '0');
        }
    }
    const std::chrono::year_month_day ymd{std::chrono::year{parts[0]},
                                          std::chrono::month{static_cast<unsigned>(parts[1])},
                                          std::chrono::day{static_cast<unsigned>(parts[2])}};
    if (!ymd.ok()) {
        return std::nullopt;
    }
    return Date{ymd};
}

std::string format_date(Date date) {
    const std::chrono::year_month_day ymd{date};
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buffer;
}

} // namespace nowcast
