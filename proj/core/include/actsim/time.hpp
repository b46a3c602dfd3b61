#pragma once

#include <cstdint>
#include <compare>
#include <numeric>
#include <string>

namespace actsim {

inline constexpr std::int64_t kPsPerNs = 1'000;
inline constexpr std::int64_t kPsPerUs = 1'000'000;
inline constexpr std::int64_t kPsPerMs = 1'000'000'000;
inline constexpr std::int64_t kPsPerSec = 1'000'000'000'000;

/// Absolute simulation time: integer picoseconds since the simulation epoch.
/// All timing arithmetic in the library is exact integer arithmetic; floating
/// point appears only in physical models (grid frequency, rotor dynamics).
struct SimTime {
    std::int64_t ps{0};

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime& operator+=(std::int64_t d) { ps += d; return *this; }
    constexpr SimTime& operator-=(std::int64_t d) { ps -= d; return *this; }
};

constexpr SimTime operator+(SimTime t, std::int64_t d) { return SimTime{t.ps + d}; }
constexpr SimTime operator-(SimTime t, std::int64_t d) { return SimTime{t.ps - d}; }
constexpr std::int64_t operator-(SimTime a, SimTime b) { return a.ps - b.ps; }

/// Exact rational duration in picoseconds. Carrier ticks are ring_period/16
/// and stay exact as rationals; conversion to integer ps happens only at the
/// point a timestamp is emitted.
struct RationalPs {
    std::int64_t num{0};
    std::int64_t den{1};

    constexpr RationalPs() = default;
    constexpr RationalPs(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

    constexpr void normalize() {
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    /// this * k, exact (128-bit intermediate).
    constexpr RationalPs times(std::int64_t k) const {
        __int128 n = static_cast<__int128>(num) * k;
        __int128 g = gcd128(n < 0 ? -n : n, den);
        return raw(static_cast<std::int64_t>(n / g), den / static_cast<std::int64_t>(g));
    }

    constexpr RationalPs plus(const RationalPs& o) const {
        __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
        __int128 d = static_cast<__int128>(den) * o.den;
        __int128 g = gcd128(n < 0 ? -n : n, d);
        return raw(static_cast<std::int64_t>(n / g), static_cast<std::int64_t>(d / g));
    }

    constexpr RationalPs minus(const RationalPs& o) const { return plus(raw(-o.num, o.den)); }

    constexpr bool is_integer() const { return den == 1; }

    /// Round to nearest integer ps, ties away from zero.
    constexpr std::int64_t round_ps() const {
        if (den == 1) return num;
        const std::int64_t q = num / den;
        const std::int64_t r = num % den;
        const std::int64_t twice = (r < 0 ? -r : r) * 2;
        if (twice >= den) return q + (num < 0 ? -1 : 1);
        return q;
    }

    constexpr double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    constexpr auto operator<=>(const RationalPs& o) const {
        const __int128 lhs = static_cast<__int128>(num) * o.den;
        const __int128 rhs = static_cast<__int128>(o.num) * den;
        return lhs <=> rhs;
    }
    constexpr bool operator==(const RationalPs& o) const { return num == o.num && den == o.den; }

private:
    static constexpr RationalPs raw(std::int64_t n, std::int64_t d) {
        RationalPs r;
        r.num = n;
        r.den = d;
        return r;
    }
    static constexpr __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }
};

std::string format_ps(std::int64_t ps);

}  // namespace actsim
