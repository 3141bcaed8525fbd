#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace nowcast {

/// An amount of euros held as a whole number of cents. All schedule and
/// income-identity arithmetic runs on this type so results are bit-exact.
class Money {
  public:
    constexpr Money() = default;

    static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }
    /// Rounds half away from zero to the nearest cent.
    static Money from_euros(double euros);
    /// Exact decimal parse ("1462", "151.50", "-3.2"); at most two decimals.
    static std::optional<Money> parse(std::string_view text);

    constexpr std::int64_t cents() const { return cents_; }
    constexpr double euros() const { return static_cast<double>(cents_) / 100.0; }

    /// Multiply by a real factor, rounding half away from zero.
    Money scaled(double factor) const;

    /// Fixed two-decimal rendering, e.g. "350.00", "-0.05".
    std::string str() const;

    constexpr Money operator-() const { return Money(-cents_); }
    constexpr Money &operator+=(Money other) {
        cents_ += other.cents_;
        return *this;
    }
    constexpr Money &operator-=(Money other) {
        cents_ -= other.cents_;
        return *this;
    }
    friend constexpr Money operator+(Money a, Money b) { return Money(a.cents_ + b.cents_); }
    friend constexpr Money operator-(Money a, Money b) { return Money(a.cents_ - b.cents_); }
    friend constexpr auto operator<=>(Money, Money) = default;

  private:
    constexpr explicit Money(std::int64_t cents) : cents_(cents) {}

    std::int64_t cents_ = 0;
};

constexpr Money operator""_eur(unsigned long long euros) {
    return Money::from_cents(static_cast<std::int64_t>(euros) * 100);
}

/// Weekly amount to monthly, using the uniform 52/12 factor.
Money weekly_to_monthly(Money weekly);
/// Annual amount to monthly (÷12, rounded).
Money annual_to_monthly(Money annual);

} // namespace nowcast
