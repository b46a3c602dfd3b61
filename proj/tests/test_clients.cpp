#include <doctest.h>

#include <cmath>
#include <set>

#include "actsim/clients.hpp"
#include "actsim/error.hpp"
#include "actsim/eventlink.hpp"

using namespace actsim;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::int64_t kCyclePs = 16'666'666'667;  // one 60 Hz machine cycle
}  // namespace

TEST_CASE("utility module maps selected codes to interrupts") {
    UtilityModule um(7, {codes::CycleStart, codes::SyncLost});
    CHECK(um.on_event({SimTime{10}, codes::CycleStart, {}, "mtg"}).has_value());
    CHECK_FALSE(um.on_event({SimTime{20}, codes::Extraction, {}, "mtg"}).has_value());
    CHECK(um.on_event({SimTime{30}, codes::SyncLost, {}, "mtg"}).has_value());
    REQUIRE(um.interrupt_log().size() == 2);
    CHECK(um.interrupt_log()[0].code == codes::CycleStart);
    CHECK(um.interrupt_log()[1].at.ps == 30);
}

TEST_CASE("utility module mirrors RTDL frames and honors remote reset") {
    UtilityModule um(7, {});
    um.store_frame({rtdl_addr::RingRevolutionPeriod, 945'388});
    CHECK(um.memory()[rtdl_addr::RingRevolutionPeriod] == 945'388);
    CHECK_FALSE(um.reset_asserted());
    um.store_frame({rtdl_addr::IocResetAddress, 3});  // someone else's address
    CHECK_FALSE(um.reset_asserted());
    um.store_frame({rtdl_addr::IocResetAddress, 7});
    CHECK(um.reset_asserted());
}

TEST_CASE("chopper kind parsing") {
    CHECK(parse_chopper_kind("fermi") == ChopperKind::Fermi);
    CHECK(parse_chopper_kind("t0") == ChopperKind::T0);
    CHECK(parse_chopper_kind("bandwidth") == ChopperKind::Bandwidth);
    CHECK_THROWS_AS(parse_chopper_kind("spinny"), ConfigError);
}

TEST_CASE("phase error converts to time through the harmonic") {
    ChopperConfig cfg;
    cfg.harmonic = 1;
    // Rotor lags the reference by the phase equivalent of 1 us.
    const double dphi = kTwoPi * (1.0e6 / static_cast<double>(kCyclePs));
    ChopperRotor rotor(cfg, kCyclePs, -dphi, 0.0);
    const auto rep = rotor.evaluate(0.0);
    CHECK(std::llabs(rep.time_error_ps - kPsPerUs) <= 1);
    CHECK(rep.pass_required);
    CHECK_FALSE(rep.pass_desired);

    // A higher harmonic shrinks the time equivalent of the same phase error.
    ChopperConfig cfg4 = cfg;
    cfg4.harmonic = 4;
    ChopperRotor rotor4(cfg4, kCyclePs, -dphi, 0.0);
    CHECK(std::llabs(rotor4.evaluate(0.0).time_error_ps - kPsPerUs / 4) <= 1);
}

TEST_CASE("lock detector needs a sustained run inside the threshold") {
    ChopperConfig cfg;  // 2 us threshold, 10 cycles
    ChopperRotor rotor(cfg, kCyclePs, 0.0, 0.0);
    for (int i = 0; i < 9; ++i) CHECK_FALSE(rotor.evaluate(0.0).locked);
    CHECK(rotor.evaluate(0.0).locked);

    ChopperRotor r2(cfg, kCyclePs, 0.0, 0.0);
    for (int i = 0; i < 9; ++i) r2.evaluate(0.0);
    const double big = kTwoPi * (5.0e6 / static_cast<double>(kCyclePs));  // 5 us excursion
    CHECK_FALSE(r2.evaluate(big).locked);  // run broken
    for (int i = 0; i < 9; ++i) CHECK_FALSE(r2.evaluate(0.0).locked);
    CHECK(r2.evaluate(0.0).locked);
}

TEST_CASE("rotor tracks a steady reference train") {
    ChopperConfig cfg;
    cfg.harmonic = 1;
    const double omega0 = kTwoPi / (static_cast<double>(kCyclePs) * 1e-12);
    ChopperRotor rotor(cfg, kCyclePs, 0.0, omega0);
    const double dt = static_cast<double>(kCyclePs) * 1e-12 / 64.0;
    double ref = 0.0;
    for (int cycle = 0; cycle < 100; ++cycle) {
        for (int s = 0; s < 64; ++s) {
            ref += kTwoPi / 64.0;
            rotor.step(dt, ref);
        }
    }
    const auto rep = rotor.evaluate(ref);
    CHECK(std::llabs(rep.time_error_ps) < 1000);  // settles well under 1 ns
    CHECK(rotor.max_abs_accel() <= cfg.alpha_max + 1e-9);
}

TEST_CASE("acceleration clamp engages on a large phase step and is counted") {
    ChopperConfig cfg;
    cfg.harmonic = 1;
    const double omega0 = kTwoPi / (static_cast<double>(kCyclePs) * 1e-12);
    // Start 600 us of phase behind the reference.
    const double dphi = kTwoPi * (600.0e6 / static_cast<double>(kCyclePs));
    ChopperRotor rotor(cfg, kCyclePs, -dphi, omega0);
    const double dt = static_cast<double>(kCyclePs) * 1e-12 / 64.0;
    double ref = 0.0;
    for (int s = 0; s < 64; ++s) {
        ref += kTwoPi / 64.0;
        rotor.step(dt, ref);
    }
    CHECK(rotor.clamp_count() > 0);
    CHECK(rotor.max_abs_accel() <= cfg.alpha_max + 1e-9);
}

TEST_CASE("chopper config validation") {
    ChopperConfig bad;
    bad.harmonic = 0;
    CHECK_THROWS_AS(ChopperRotor(bad, kCyclePs, 0.0, 0.0), ConfigError);
    ChopperConfig bad2;
    bad2.alpha_max = 0.0;
    CHECK_THROWS_AS(ChopperRotor(bad2, kCyclePs, 0.0, 0.0), ConfigError);
    ChopperRotor ok(ChopperConfig{}, kCyclePs, 0.0, 0.0);
    CHECK_THROWS_AS(ok.step(0.0, 0.0), ConfigError);
}

TEST_CASE("klystron window check") {
    const std::vector<SimTime> crossings{SimTime{0}, SimTime{kCyclePs}};
    auto r = klystron_check(SimTime{100 * kPsPerUs}, crossings, 500 * kPsPerUs);
    CHECK(r.pass);
    CHECK(r.deviation_ps == 100 * kPsPerUs);
    CHECK(r.margin_ps == 400 * kPsPerUs);
    r = klystron_check(SimTime{kCyclePs - 700 * kPsPerUs}, crossings, 500 * kPsPerUs);
    CHECK_FALSE(r.pass);
    CHECK(r.deviation_ps == -700 * kPsPerUs);
    CHECK(r.margin_ps == -200 * kPsPerUs);
    CHECK_THROWS_AS(klystron_check(SimTime{0}, std::span<const SimTime>{}, 1), StateError);
}

TEST_CASE("beam gate geometry") {
    CHECK_THROWS_AS(make_beam_gate(0, true), ConfigError);
    CHECK_THROWS_AS(make_beam_gate(16, true), ConfigError);

    const BeamGateConfig centered = make_beam_gate(5, true);
    CHECK(centered.phase_offset_ticks == RationalPs{-5, 2});
    CHECK(gap_center_tick(centered, 0) == RationalPs{0, 1});
    CHECK(gap_center_tick(centered, 3) == RationalPs{48, 1});

    const BeamGateConfig legacy = make_beam_gate(5, false);  // off at tick 0, on at tick 5
    CHECK(legacy.phase_offset_ticks == RationalPs{0, 1});
    CHECK(gap_center_tick(legacy, 0) == RationalPs{5, 2});

    const auto edges = beam_gate_edges(centered, 3);
    REQUIRE(edges.size() == 3);
    for (const auto& e : edges) {
        CHECK(e.on_tick.minus(e.off_tick) == RationalPs{5, 1});     // gap is 5 ticks
        CHECK(e.off_tick == RationalPs{16 * e.turn * 2 - 5, 2});    // 16t - 2.5
    }
}

TEST_CASE("centered gap nulls the extraction alignment error") {
    RingRfClock clock;
    clock.reset(SimTime{0}, 945'390);
    const BeamGateConfig centered = make_beam_gate(5, true);
    // Turn boundaries coincide with gap centers: zero error, every turn.
    for (std::int64_t turn : {0, 1, 7, 1060, 6000})
        CHECK(gap_alignment_error_ps(centered, clock, clock.turn_boundary(turn)) == 0);

    // The uncentered placement leaves the center 2.5 ticks away from the
    // boundary: 2.5 * 59086.875 ps, about 148 ns.
    const BeamGateConfig legacy = make_beam_gate(5, false);
    const std::int64_t err = gap_alignment_error_ps(legacy, clock, clock.turn_boundary(1060));
    CHECK(err == 147'717);

    // Worst case is half a turn from the nearest center.
    const SimTime halfway = clock.turn_boundary(3) + 945'390 / 2;
    CHECK(gap_alignment_error_ps(centered, clock, halfway) == 945'390 / 2);
}
