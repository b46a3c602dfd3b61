#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "actsim/grid.hpp"
#include "actsim/time.hpp"

namespace actsim {

/// Second-order software PLL tracking the grid zero crossings. kappa is the
/// phase gain, kappa_f the period-correction gain; kappa = 1 makes the output
/// reference identical to the grid.
struct PllState {
    SimTime phase_estimate{0};        // predicted instant of the next crossing
    std::int64_t period_estimate_ps{0};
    double kappa{1.0};
    double kappa_f{0.25};
    std::int64_t period_min_ps{0};
    std::int64_t period_max_ps{0};
    bool primed{false};
};

/// kappa_f defaults to kappa^2/4 (critical-damping heuristic).
PllState make_pll(double kappa, double kappa_f, double f_min_hz, double f_max_hz,
                  double f_nominal_hz);
PllState make_pll(double kappa, double f_min_hz, double f_max_hz, double f_nominal_hz);

struct PllOutput {
    PllState state;
    SimTime reference;       // smoothed instant for this grid cycle
    std::int64_t error_ps;   // zc.at - predicted
};

PllOutput pll_update(PllState state, const ZeroCrossing& zc);

struct CycleParams {
    std::int64_t n_cs{6000};          // ring-rf cycles from Cycle Start to extraction
    std::int64_t fill_turns{1060};
    std::int64_t diag_pretrig_turns{5500};
    std::int64_t klystron_lead_ps{400 * kPsPerUs};
    std::int64_t rtdl_lead_ps{100 * kPsPerUs};
    std::int64_t extraction_offset_ps{0};  // shifts the whole cycle vs. the reference
};

/// One machine cycle's planned instants. All identities are exact integer
/// arithmetic: t_extraction - t_cycle_start == n_cs * ring_period, etc.
struct CycleSchedule {
    std::int64_t cycle_index{0};
    std::int64_t n_cs{0};
    std::int64_t fill_turns{0};
    std::int64_t ring_period_ps{0};
    SimTime t_rtdl_start;
    SimTime t_cycle_start;
    SimTime t_klystron;
    SimTime t_injection;
    SimTime t_diag_pretrig;
    SimTime t_extraction;
};

/// Anchors Cycle Start at the smoothed reference (plus the configured offset)
/// and derives every other instant. Throws ConfigError when n_cs does not
/// clear the pretrigger and fill leads.
CycleSchedule schedule_cycle(std::int64_t cycle_index, SimTime reference,
                             std::int64_t ring_period_ps, const CycleParams& params);

struct SyncStatus {
    std::int64_t deviation_ps{0};  // Cycle Start minus nearest zero crossing
    std::int64_t threshold_ps{500 * kPsPerUs};
    bool in_sync{true};
    std::int64_t consecutive_lost{0};
};

/// deviation = t_cycle_start - nearest crossing; out-of-window cycles extend
/// the consecutive_lost run carried in `previous`.
SyncStatus check_sync(const CycleSchedule& sched, std::span<const SimTime> crossings,
                      std::int64_t threshold_ps, const SyncStatus& previous);

/// Ring-rf phase origin: reset at Cycle Start latches the period for the
/// whole cycle; turn k boundary is exactly origin + k * period.
class RingRfClock {
public:
    /// Throws StateError if the beam is in the ring (between injection and
    /// extraction).
    void reset(SimTime at, std::int64_t ring_period_ps);

    void mark_injection() { beam_present_ = true; }
    void mark_extraction() { beam_present_ = false; }

    bool latched() const { return latched_; }
    SimTime origin() const;
    std::int64_t ring_period_ps() const;
    RationalPs tick() const;  // ring_period / 16

    SimTime turn_boundary(std::int64_t turn) const;
    /// Instant of carrier tick position `ticks` (may be fractional), rounded
    /// to ps only here.
    SimTime tick_instant(const RationalPs& ticks) const;

private:
    bool latched_{false};
    bool beam_present_{false};
    SimTime origin_{0};
    std::int64_t period_ps_{0};
};

struct CalibrationResult {
    double kappa{1.0};
    double kappa_f{0.25};
    double measured_sigma_ps{0.0};
};

/// Deterministic bisection over kappa in (0, 1] against a fixed-seed grid
/// realization; returns kappa whose measured deviation std is within +/-20%
/// of target_sigma_ps. target 0 maps to kappa = 1. Throws CalibrationError
/// when the target is outside the achievable range.
CalibrationResult calibrate_coupling(const GridConfig& grid, std::int64_t target_sigma_ps,
                                     int cycles = 10000);

/// Deviation std of a (kappa, kappa_f) loop over a fresh grid realization;
/// shared by calibration and its tests.
double measure_sigma_ps(const GridConfig& grid, double kappa, double kappa_f, int cycles,
                        int warmup = 200);

}  // namespace actsim
