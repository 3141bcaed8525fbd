#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace nowcast {

using Date = std::chrono::sys_days;

constexpr Date make_date(int year, unsigned month, unsigned day) {
    return Date{std::chrono::year{year} / std::chrono::month{month} / std::chrono::day{day}};
}

/// Parses an ISO calendar date (YYYY-MM-DD). Rejects impossible dates.
std::optional<Date> parse_date(std::string_view text);

std::string format_date(Date date);

} // namespace nowcast
