#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace paam {

/// Integer nanosecond time quantity. Every analysis and simulation time value
/// uses this type; there is no floating-point time anywhere in the core.
class Duration {
public:
    constexpr Duration() = default;
    constexpr explicit Duration(std::int64_t ns) : ns_(ns) {}

    static constexpr Duration ns(std::int64_t v) { return Duration(v); }
    static constexpr Duration us(std::int64_t v) { return Duration(v * 1'000); }
    static constexpr Duration ms(std::int64_t v) { return Duration(v * 1'000'000); }
    static constexpr Duration s(std::int64_t v) { return Duration(v * 1'000'000'000); }
    static constexpr Duration zero() { return Duration(0); }

    constexpr std::int64_t count() const { return ns_; }

    constexpr auto operator<=>(const Duration&) const = default;

    constexpr Duration& operator+=(Duration o) { ns_ += o.ns_; return *this; }
    constexpr Duration& operator-=(Duration o) { ns_ -= o.ns_; return *this; }
    friend constexpr Duration operator+(Duration a, Duration b) { return Duration(a.ns_ + b.ns_); }
    friend constexpr Duration operator-(Duration a, Duration b) { return Duration(a.ns_ - b.ns_); }
    friend constexpr Duration operator*(Duration a, std::int64_t k) { return Duration(a.ns_ * k); }
    friend constexpr Duration operator*(std::int64_t k, Duration a) { return Duration(a.ns_ * k); }

private:
    std::int64_t ns_ = 0;
};

/// Point on the simulation clock, measured from time zero.
using Instant = Duration;

/// A bound that may be infinite. nullopt means UNBOUNDED / UNSCHEDULABLE.
using Bound = std::optional<Duration>;

/// Exact integer ceil(a / b) for a >= 0, b > 0.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return a / b + (a % b != 0 ? 1 : 0);
}

enum class TimeUnit { Ns, Us, Ms, S };

std::int64_t unit_scale(TimeUnit u);
std::optional<TimeUnit> parse_time_unit(std::string_view s);
std::string_view to_string(TimeUnit u);

/// Parses "250", "391us", "2.5ms", "1s". A bare number uses `default_unit`.
/// Fractional values must resolve to a whole number of nanoseconds.
/// Throws std::invalid_argument on malformed input or negative values.
Duration parse_duration(std::string_view text, TimeUnit default_unit = TimeUnit::Ns);

/// Shortest exact rendering with a unit suffix, e.g. "8.391ms", "130us", "7ns".
std::string format_duration(Duration d);

std::string format_bound(const Bound& b, std::string_view infinite_label = "UNBOUNDED");

}  // namespace paam
