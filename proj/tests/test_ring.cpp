#include <doctest.h>

#include "actsim/error.hpp"
#include "actsim/ring.hpp"

using namespace actsim;

namespace {
RingParams at_energy(double mev) {
    RingParams p;
    p.kinetic_energy_mev = mev;
    return p;
}
}  // namespace

TEST_CASE("revolution period at reference energies") {
    // Frozen against a 50-digit decimal evaluation of
    // T = C / (beta c), beta = sqrt(1 - 1/gamma^2), gamma = 1 + Ek/m.
    CHECK(revolution_period_ps(at_energy(1000.0)) == 945'388);
    CHECK(revolution_period_ps(at_energy(950.0)) == 953'248);
    CHECK(revolution_period_ps(at_energy(1100.0)) == 931'838);
    CHECK(revolution_period_ps(at_energy(1300.0)) == 911'160);
}

TEST_CASE("revolution period decreases monotonically with energy") {
    std::int64_t prev = revolution_period_ps(at_energy(950.0));
    for (double ek = 955.0; ek <= 1300.0; ek += 5.0) {
        const std::int64_t t = revolution_period_ps(at_energy(ek));
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("energy envelope is enforced") {
    CHECK_THROWS_AS(revolution_period_ps(at_energy(949.9)), RangeError);
    CHECK_THROWS_AS(revolution_period_ps(at_energy(1300.1)), RangeError);
    CHECK_NOTHROW(revolution_period_ps(at_energy(950.0)));
    CHECK_NOTHROW(revolution_period_ps(at_energy(1300.0)));
    RingParams bad;
    bad.circumference_m = 0.0;
    CHECK_THROWS_AS(revolution_period_ps(bad), RangeError);
}

TEST_CASE("carrier tick is one sixteenth of a turn, exact") {
    const RationalPs tick = carrier_period(945'390);
    CHECK(tick == RationalPs{945'390, 16});
    CHECK(tick.times(16).round_ps() == 945'390);
    CHECK(tick.to_double() == doctest::Approx(59'086.875));
    // 16 ticks per turn stays exact over many turns.
    CHECK(tick.times(16 * 1'000'000).round_ps() == 945'390LL * 1'000'000);
    CHECK_THROWS_AS(carrier_period(0), RangeError);
}

TEST_CASE("fixed-delay drift accumulates linearly over the fill") {
    CHECK(cumulative_drift_ps(1060, 2) == 2'120);
    CHECK(cumulative_drift_ps(1060, 2'000) == 2'120'000);
    CHECK(cumulative_drift_ps(0, 12345) == 0);
    CHECK(cumulative_drift_ps(1060, -2'000) == -2'120'000);
    CHECK_THROWS_AS(cumulative_drift_ps(-1, 1), RangeError);
}
