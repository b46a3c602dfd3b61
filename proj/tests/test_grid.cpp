#include <doctest.h>

#include <cmath>
#include <vector>

#include "actsim/error.hpp"
#include "actsim/grid.hpp"

using namespace actsim;

TEST_CASE("crossing spacing for known frequencies") {
    CHECK(GridModel::spacing_for(60.0) == 16'666'666'667);
    CHECK(GridModel::spacing_for(59.95) == 16'680'567'139);
    CHECK(GridModel::spacing_for(59.0) == 16'949'152'542);
    CHECK(GridModel::spacing_for(61.0) == 16'393'442'623);
    CHECK(GridModel::spacing_for(60.05) == 16'652'789'342);
}

TEST_CASE("noiseless grid ticks at exactly the nominal spacing") {
    GridConfig cfg;
    GridModel g(cfg);
    SimTime prev{0};
    for (int i = 0; i < 100; ++i) {
        const ZeroCrossing zc = g.next_zero_crossing();
        CHECK(zc.cycle_index == i);
        CHECK(zc.at - prev == 16'666'666'667);
        prev = zc.at;
    }
}

TEST_CASE("same seed reproduces the same crossing sequence") {
    GridConfig cfg;
    cfg.wander_sigma = 0.01;
    cfg.wander_reversion = 0.05;
    cfg.seed = 42;
    GridModel a(cfg), b(cfg);
    for (int i = 0; i < 500; ++i) CHECK(a.next_zero_crossing().at == b.next_zero_crossing().at);

    cfg.seed = 43;
    GridModel c(cfg);
    GridModel d(GridConfig{.wander_sigma = 0.01, .wander_reversion = 0.05, .seed = 42});
    bool diverged = false;
    for (int i = 0; i < 500; ++i)
        if (c.next_zero_crossing().at != d.next_zero_crossing().at) diverged = true;
    CHECK(diverged);
}

TEST_CASE("frequency stays clamped and crossings strictly increase") {
    GridConfig cfg;
    cfg.wander_sigma = 0.5;  // violent wander to exercise the clamp
    cfg.f_min = 59.5;
    cfg.f_max = 60.5;
    cfg.seed = 7;
    GridModel g(cfg);
    SimTime prev{-1};
    const std::int64_t lo = GridModel::spacing_for(cfg.f_max);
    const std::int64_t hi = GridModel::spacing_for(cfg.f_min);
    SimTime last{0};
    for (int i = 0; i < 2000; ++i) {
        const ZeroCrossing zc = g.next_zero_crossing();
        CHECK(g.frequency() >= cfg.f_min);
        CHECK(g.frequency() <= cfg.f_max);
        CHECK(prev < zc.at);
        prev = zc.at;
        const std::int64_t spacing = zc.at - last;
        last = zc.at;
        CHECK(spacing >= lo);
        CHECK(spacing <= hi);
    }
}

TEST_CASE("mean reversion pulls a displaced frequency back to nominal") {
    GridConfig cfg;
    cfg.wander_reversion = 0.1;
    GridModel g(cfg);
    g.apply_transient(TransientKind::FrequencyStep, -0.5);
    CHECK(g.frequency() == doctest::Approx(59.5));
    for (int i = 0; i < 200; ++i) g.next_zero_crossing();
    CHECK(std::abs(g.frequency() - 60.0) < 1e-6);
}

TEST_CASE("scripted frequency step changes the spacing from its cycle on") {
    GridConfig cfg;
    cfg.transients.push_back({SimTime{60'000'000'000}, TransientKind::FrequencyStep, -0.05});
    GridModel g(cfg);
    std::vector<std::int64_t> spacing;
    SimTime prev{0};
    for (int i = 0; i < 8; ++i) {
        const SimTime t = g.next_zero_crossing().at;
        spacing.push_back(t - prev);
        prev = t;
    }
    // Crossings 0..3 at 60 Hz; time passes 50 ms during cycle 3, so the step
    // lands on cycle 4 and later.
    for (int i = 0; i < 4; ++i) CHECK(spacing[i] == GridModel::spacing_for(60.0));
    for (int i = 4; i < 8; ++i) CHECK(spacing[i] == GridModel::spacing_for(59.95));
}

TEST_CASE("phase step shifts exactly one spacing") {
    GridConfig cfg;
    GridModel g(cfg);
    g.next_zero_crossing();
    g.apply_transient(TransientKind::PhaseStep, 250'000.0);
    SimTime prev = g.last_crossing();
    const SimTime shifted = g.next_zero_crossing().at;
    CHECK(shifted - prev == GridModel::spacing_for(60.0) + 250'000);
    prev = shifted;
    const SimTime after = g.next_zero_crossing().at;
    CHECK(after - prev == GridModel::spacing_for(60.0));
}

TEST_CASE("transient kind parsing") {
    CHECK(parse_transient_kind("frequency-step") == TransientKind::FrequencyStep);
    CHECK(parse_transient_kind("phase-step") == TransientKind::PhaseStep);
    CHECK_THROWS_AS(parse_transient_kind("step"), ConfigError);
}

TEST_CASE("config validation") {
    GridConfig bad;
    bad.f_min = 61.0;
    bad.f_max = 59.0;
    CHECK_THROWS_AS(GridModel{bad}, ConfigError);
    GridConfig bad2;
    bad2.f_nominal = 58.0;
    CHECK_THROWS_AS(GridModel{bad2}, ConfigError);
    GridConfig bad3;
    bad3.wander_sigma = -1.0;
    CHECK_THROWS_AS(GridModel{bad3}, ConfigError);
}
