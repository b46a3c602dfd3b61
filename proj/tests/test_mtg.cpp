#include <doctest.h>

#include <vector>

#include "actsim/error.hpp"
#include "actsim/mtg.hpp"

using namespace actsim;

TEST_CASE("pll construction validates gains and seeds the period") {
    CHECK_THROWS_AS(make_pll(0.0, 59.0, 61.0, 60.0), ConfigError);
    CHECK_THROWS_AS(make_pll(1.5, 59.0, 61.0, 60.0), ConfigError);
    const PllState s = make_pll(0.5, 59.0, 61.0, 60.0);
    CHECK(s.kappa_f == doctest::Approx(0.0625));  // kappa^2 / 4
    CHECK(s.period_estimate_ps == GridModel::spacing_for(60.0));
    CHECK(s.period_min_ps == GridModel::spacing_for(61.0));
    CHECK(s.period_max_ps == GridModel::spacing_for(59.0));
}

TEST_CASE("kappa = 1 is a pass-through: reference equals the crossing") {
    GridConfig cfg;
    cfg.wander_sigma = 0.05;
    cfg.seed = 3;
    GridModel g(cfg);
    PllState pll = make_pll(1.0, cfg.f_min, cfg.f_max, cfg.f_nominal);
    for (int i = 0; i < 300; ++i) {
        const ZeroCrossing zc = g.next_zero_crossing();
        const PllOutput out = pll_update(pll, zc);
        pll = out.state;
        CHECK(out.reference == zc.at);
    }
}

TEST_CASE("first crossing primes the loop with zero error") {
    PllState pll = make_pll(0.3, 59.0, 61.0, 60.0);
    const PllOutput out = pll_update(pll, ZeroCrossing{SimTime{123}, 0});
    CHECK(out.error_ps == 0);
    CHECK(out.reference.ps == 123);
    CHECK(out.state.primed);
    CHECK(out.state.phase_estimate.ps == 123 + GridModel::spacing_for(60.0));
}

TEST_CASE("smoothing is monotone in kappa") {
    GridConfig cfg;
    cfg.wander_sigma = 0.02;
    cfg.wander_reversion = 0.05;
    cfg.seed = 11;
    const double s_tiny = measure_sigma_ps(cfg, 0.02, 0.0001, 4000);
    const double s_small = measure_sigma_ps(cfg, 0.1, 0.0025, 4000);
    const double s_mid = measure_sigma_ps(cfg, 0.5, 0.0625, 4000);
    const double s_full = measure_sigma_ps(cfg, 1.0, 0.25, 4000);
    CHECK(s_tiny > s_small);
    CHECK(s_small > s_mid);
    CHECK(s_mid > s_full);
    CHECK(s_full == doctest::Approx(0.0));  // pass-through has zero deviation
}

TEST_CASE("cycle schedule identities are exact") {
    CycleParams p;  // n_cs 6000, fill 1060, pretrig 5500, leads 400/100 us
    const std::int64_t T = 945'388;
    const SimTime ref{1'000'000'000};
    const CycleSchedule s = schedule_cycle(7, ref, T, p);
    CHECK(s.cycle_index == 7);
    CHECK(s.t_cycle_start == ref);
    CHECK(s.t_extraction - s.t_cycle_start == 6000 * T);
    CHECK(s.t_extraction - s.t_injection == 1060 * T);
    CHECK(s.t_injection - s.t_klystron == 400 * kPsPerUs);
    CHECK(s.t_extraction - s.t_diag_pretrig == 5500 * T);
    CHECK(s.t_cycle_start - s.t_rtdl_start == 100 * kPsPerUs);
    // The extraction offset shifts the whole cycle rigidly.
    p.extraction_offset_ps = 250'000;
    const CycleSchedule s2 = schedule_cycle(7, ref, T, p);
    CHECK(s2.t_cycle_start - s.t_cycle_start == 250'000);
    CHECK(s2.t_extraction - s.t_extraction == 250'000);
}

TEST_CASE("cycle schedule rejects leads that do not fit") {
    CycleParams p;
    p.n_cs = 5500;  // equal to the pretrigger lead
    CHECK_THROWS_AS(schedule_cycle(0, SimTime{0}, 945'388, p), ConfigError);
    CycleParams q;
    q.n_cs = 1000;  // below fill_turns
    q.diag_pretrig_turns = 100;
    CHECK_THROWS_AS(schedule_cycle(0, SimTime{0}, 945'388, q), ConfigError);
    CHECK_THROWS_AS(schedule_cycle(0, SimTime{0}, 0, CycleParams{}), ConfigError);
}

TEST_CASE("sync check picks the nearest crossing and chains lost cycles") {
    CycleParams p;
    CycleSchedule s = schedule_cycle(0, SimTime{100'000}, 945'388, p);
    const std::vector<SimTime> crossings{SimTime{0}, SimTime{16'666'666'667}};
    SyncStatus prev;
    SyncStatus st = check_sync(s, crossings, 500 * kPsPerUs, prev);
    CHECK(st.deviation_ps == 100'000);
    CHECK(st.in_sync);
    CHECK(st.consecutive_lost == 0);

    s = schedule_cycle(1, SimTime{700 * kPsPerUs}, 945'388, p);
    st = check_sync(s, crossings, 500 * kPsPerUs, st);
    CHECK(st.deviation_ps == 700 * kPsPerUs);
    CHECK_FALSE(st.in_sync);
    CHECK(st.consecutive_lost == 1);
    st = check_sync(s, crossings, 500 * kPsPerUs, st);
    CHECK(st.consecutive_lost == 2);

    // Recovery resets the run.
    s = schedule_cycle(2, SimTime{16'666'666'667 + 10}, 945'388, p);
    st = check_sync(s, crossings, 500 * kPsPerUs, st);
    CHECK(st.deviation_ps == 10);
    CHECK(st.consecutive_lost == 0);

    CHECK_THROWS_AS(check_sync(s, std::span<const SimTime>{}, 1, st), StateError);
}

TEST_CASE("ring-rf clock latches on reset and rejects resets with beam") {
    RingRfClock c;
    CHECK_FALSE(c.latched());
    CHECK_THROWS_AS(c.origin(), StateError);
    c.reset(SimTime{1000}, 945'390);
    CHECK(c.latched());
    CHECK(c.origin().ps == 1000);
    CHECK(c.turn_boundary(5).ps == 1000 + 5 * 945'390);
    c.mark_injection();
    CHECK_THROWS_AS(c.reset(SimTime{2000}, 945'390), StateError);
    c.mark_extraction();
    CHECK_NOTHROW(c.reset(SimTime{2000}, 945'388));
    CHECK(c.ring_period_ps() == 945'388);
}

TEST_CASE("tick instants round to ps only at emission") {
    RingRfClock c;
    c.reset(SimTime{1000}, 945'390);
    CHECK(c.tick() == RationalPs{945'390, 16});
    // One tick is 59086.875 ps.
    CHECK(c.tick_instant(RationalPs{1, 1}).ps == 1000 + 59'087);
    CHECK(c.tick_instant(RationalPs{1, 2}).ps == 1000 + 29'543);  // 29543.4375
    CHECK(c.tick_instant(RationalPs{-1, 1}).ps == 1000 - 59'087);
    // Whole turns are exact, no rounding residue.
    CHECK(c.tick_instant(RationalPs{16, 1}).ps == 1000 + 945'390);
    CHECK(c.tick_instant(RationalPs{16 * 6000, 1}).ps == 1000 + 6000LL * 945'390);
}

TEST_CASE("calibration: zero target means pass-through") {
    GridConfig cfg;
    cfg.wander_sigma = 0.01;
    cfg.seed = 5;
    const CalibrationResult r = calibrate_coupling(cfg, 0);
    CHECK(r.kappa == doctest::Approx(1.0));
}

TEST_CASE("calibration meets a reachable target within 20%") {
    GridConfig cfg;
    cfg.wander_sigma = 0.003;
    cfg.wander_reversion = 0.02;
    cfg.seed = 20260824;
    const std::int64_t target = 125 * kPsPerUs;
    const CalibrationResult r = calibrate_coupling(cfg, target, 4000);
    CHECK(r.kappa > 0.0);
    CHECK(r.kappa <= 1.0);
    CHECK(r.measured_sigma_ps >= 0.8 * static_cast<double>(target));
    CHECK(r.measured_sigma_ps <= 1.2 * static_cast<double>(target));
    // Deterministic: the same call yields the same coupling.
    const CalibrationResult r2 = calibrate_coupling(cfg, target, 4000);
    CHECK(r.kappa == r2.kappa);
}

TEST_CASE("calibration rejects unreachable targets") {
    GridConfig cfg;
    cfg.wander_sigma = 0.003;
    cfg.wander_reversion = 0.02;
    cfg.seed = 20260824;
    CHECK_THROWS_AS(calibrate_coupling(cfg, 10 * kPsPerSec, 2000), CalibrationError);
    CHECK_THROWS_AS(calibrate_coupling(cfg, -1, 2000), ConfigError);
}
