#include "core/money.hpp"

#include <cmath>
#include <cstdlib>

namespace nowcast {

namespace {

std::int64_t round_half_away(long double value) {
    return static_cast<std::int64_t>(std::llround(value));
}

// Integer division rounding half away from zero.
std::int64_t divide_rounded(std::int64_t numerator, std::int64_t denominator) {
    const std::int64_t q = numerator / denominator;
    const std::int64_t r = numerator % denominator;
    if (2 * std::llabs(r) >= denominator) {
        return numerator >= 0 ? q + 1 : q - 1;
    }
    return q;
}

} // namespace

Money Money::from_euros(double euros) {
    return Money(round_half_away(static_cast<long double>(euros) * 100.0L));
}

std::optional<Money> Money::parse(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        pos = 1;
    }
    std::int64_t whole = 0;
    std::size_t whole_digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
        if (whole > (INT64_MAX / 1000)) {
            return std::nullopt;
        }
        whole = whole * 10 + (text[pos] - '0');
        ++pos;
        ++whole_digits;
    }
    std::int64_t fraction = 0;
    std::size_t fraction_digits = 0;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            if (fraction_digits == 2) {
                if (text[pos] != '0') {
                    return std::nullopt;
                }
            } else {
                fraction = fraction * 10 + (text[pos] - '0');
                ++fraction_digits;
            }
            ++pos;
        }
    }
    if (pos != text.size() || (whole_digits == 0 && fraction_digits == 0)) {
        return std::nullopt;
    }
    if (fraction_digits == 1) {
        fraction *= 10;
    }
    const std::int64_t cents = whole * 100 + fraction;
    return Money(negative ? -cents : cents);
}

Money Money::scaled(double factor) const {
    return Money(round_half_away(static_cast<long double>(cents_) * factor));
}

std::string Money::str() const {
    const std::int64_t magnitude = std::llabs(cents_);
    std::string out = cents_ < 0 ? "-" : "";
    out += std::to_string(magnitude / 100);
    out += '.';
    const auto frac = magnitude % 100;
    out += static_cast<char>('0' + frac / 10);
    out += static_cast<char>('0' + frac % 10);
    return out;
}

Money weekly_to_monthly(Money weekly) {
    return Money::from_cents(divide_rounded(weekly.cents() * 52, 12));
}

Money annual_to_monthly(Money annual) {
    return Money::from_cents(divide_rounded(annual.cents(), 12));
}

} // namespace nowcast
