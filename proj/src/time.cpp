#include "paam/time.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace paam {

std::int64_t unit_scale(TimeUnit u) {
    switch (u) {
        case TimeUnit::Ns: return 1;
        case TimeUnit::Us: return 1'000;
        case TimeUnit::Ms: return 1'000'000;
        case TimeUnit::S: return 1'000'000'000;
    }
    return 1;
}

std::optional<TimeUnit> parse_time_unit(std::string_view s) {
    if (s == "ns") return TimeUnit::Ns;
    if (s == "us") return TimeUnit::Us;
    if (s == "ms") return TimeUnit::Ms;
    if (s == "s") return TimeUnit::S;
    return std::nullopt;
}

std::string_view to_string(TimeUnit u) {
    switch (u) {
        case TimeUnit::Ns: return "ns";
        case TimeUnit::Us: return "us";
        case TimeUnit::Ms: return "ms";
        case TimeUnit::S: return "s";
    }
    return "ns";
}

Duration parse_duration(std::string_view text, TimeUnit default_unit) {
    auto fail = [&]() -> Duration {
        throw std::invalid_argument("invalid duration '" + std::string(text) + "'");
    };
    std::size_t i = 0;
    while (i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) != 0)) ++i;
    if (i == 0) return fail();
    std::string_view whole = text.substr(0, i);
    std::string_view frac;
    if (i < text.size() && text[i] == '.') {
        std::size_t j = i + 1;
        while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) != 0)) ++j;
        frac = text.substr(i + 1, j - i - 1);
        if (frac.empty()) return fail();
        i = j;
    }
    TimeUnit unit = default_unit;
    if (i < text.size()) {
        auto u = parse_time_unit(text.substr(i));
        if (!u) return fail();
        unit = *u;
    }
    std::int64_t scale = unit_scale(unit);
    std::int64_t w = 0;
    if (auto r = std::from_chars(whole.data(), whole.data() + whole.size(), w); r.ec != std::errc{}) {
        return fail();
    }
    std::int64_t total = w * scale;
    // fractional digits: each must land on a whole nanosecond
    std::int64_t place = scale;
    for (char c : frac) {
        int digit = c - '0';
        if (place % 10 != 0) {
            if (digit != 0) {
                throw std::invalid_argument("duration '" + std::string(text) +
                                            "' is finer than 1ns");
            }
            continue;
        }
        place /= 10;
        total += digit * place;
    }
    return Duration(total);
}

std::string format_duration(Duration d) {
    std::int64_t v = d.count();
    std::string sign = v < 0 ? "-" : "";
    if (v < 0) v = -v;
    struct U { std::int64_t scale; const char* name; };
    static constexpr U units[] = {{1'000'000'000, "s"}, {1'000'000, "ms"}, {1'000, "us"}};
    for (const auto& u : units) {
        if (v >= u.scale) {
            std::int64_t whole = v / u.scale;
            std::int64_t rem = v % u.scale;
            std::string out = sign + std::to_string(whole);
            if (rem != 0) {
                std::string digits = std::to_string(rem);
                int width = 0;
                for (std::int64_t s = u.scale; s > 1; s /= 10) ++width;
                digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
                while (!digits.empty() && digits.back() == '0') digits.pop_back();
                out += "." + digits;
            }
            return out + u.name;
        }
    }
    return sign + std::to_string(v) + "ns";
}

std::string format_bound(const Bound& b, std::string_view infinite_label) {
    return b ? format_duration(*b) : std::string(infinite_label);
}

}  // namespace paam
