#include "actsim/mtg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "actsim/error.hpp"

namespace actsim {

PllState make_pll(double kappa, double kappa_f, double f_min_hz, double f_max_hz,
                  double f_nominal_hz) {
    if (kappa <= 0.0 || kappa > 1.0) throw ConfigError("pll: kappa must be in (0, 1]");
    if (kappa_f < 0.0 || kappa_f > 1.0) throw ConfigError("pll: kappa_f must be in [0, 1]");
    PllState s;
    s.kappa = kappa;
    s.kappa_f = kappa_f;
    s.period_min_ps = GridModel::spacing_for(f_max_hz);
    s.period_max_ps = GridModel::spacing_for(f_min_hz);
    s.period_estimate_ps = GridModel::spacing_for(f_nominal_hz);
    return s;
}

PllState make_pll(double kappa, double f_min_hz, double f_max_hz, double f_nominal_hz) {
    return make_pll(kappa, kappa * kappa / 4.0, f_min_hz, f_max_hz, f_nominal_hz);
}

PllOutput pll_update(PllState state, const ZeroCrossing& zc) {
    if (!state.primed) {
        // First crossing primes the loop: reference coincides with the grid.
        state.primed = true;
        state.phase_estimate = zc.at + state.period_estimate_ps;
        return PllOutput{state, zc.at, 0};
    }
    const std::int64_t e = zc.at - state.phase_estimate;
    const SimTime reference =
        state.phase_estimate + static_cast<std::int64_t>(std::llround(state.kappa * e));
    state.period_estimate_ps +=
        static_cast<std::int64_t>(std::llround(state.kappa_f * e));
    state.period_estimate_ps =
        std::clamp(state.period_estimate_ps, state.period_min_ps, state.period_max_ps);
    state.phase_estimate = reference + state.period_estimate_ps;
    return PllOutput{state, reference, e};
}

CycleSchedule schedule_cycle(std::int64_t cycle_index, SimTime reference,
                             std::int64_t ring_period_ps, const CycleParams& params) {
    if (ring_period_ps <= 0) throw ConfigError("schedule_cycle: ring period must be positive");
    if (params.n_cs <= params.diag_pretrig_turns) {
        std::ostringstream os;
        os << "n_cs=" << params.n_cs << " must exceed the diagnostics pretrigger lead of "
           << params.diag_pretrig_turns << " turns";
        throw ConfigError(os.str());
    }
    if (params.n_cs <= params.fill_turns) {
        std::ostringstream os;
        os << "n_cs=" << params.n_cs << " must exceed fill_turns=" << params.fill_turns;
        throw ConfigError(os.str());
    }
    if (params.rtdl_lead_ps <= 0) throw ConfigError("rtdl_lead_ps must be positive");

    CycleSchedule s;
    s.cycle_index = cycle_index;
    s.n_cs = params.n_cs;
    s.fill_turns = params.fill_turns;
    s.ring_period_ps = ring_period_ps;
    s.t_cycle_start = reference + params.extraction_offset_ps;
    s.t_extraction = s.t_cycle_start + params.n_cs * ring_period_ps;
    s.t_injection = s.t_extraction - params.fill_turns * ring_period_ps;
    s.t_klystron = s.t_injection - params.klystron_lead_ps;
    s.t_diag_pretrig = s.t_extraction - params.diag_pretrig_turns * ring_period_ps;
    s.t_rtdl_start = s.t_cycle_start - params.rtdl_lead_ps;
    return s;
}

SyncStatus check_sync(const CycleSchedule& sched, std::span<const SimTime> crossings,
                      std::int64_t threshold_ps, const SyncStatus& previous) {
    if (crossings.empty()) throw StateError("check_sync: no zero crossings supplied");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (const SimTime& zc : crossings) {
        const std::int64_t d = sched.t_cycle_start - zc;
        if (std::llabs(d) < std::llabs(best)) best = d;
    }
    SyncStatus st;
    st.deviation_ps = best;
    st.threshold_ps = threshold_ps;
    st.in_sync = std::llabs(best) <= threshold_ps;
    st.consecutive_lost = st.in_sync ? 0 : previous.consecutive_lost + 1;
    return st;
}

void RingRfClock::reset(SimTime at, std::int64_t ring_period_ps) {
    if (beam_present_)
        throw StateError("ring-rf phase reset requested with beam in the ring");
    if (ring_period_ps <= 0) throw ConfigError("ring-rf reset: period must be positive");
    latched_ = true;
    origin_ = at;
    period_ps_ = ring_period_ps;
}

SimTime RingRfClock::origin() const {
    if (!latched_) throw StateError("ring-rf clock not latched");
    return origin_;
}

std::int64_t RingRfClock::ring_period_ps() const {
    if (!latched_) throw StateError("ring-rf clock not latched");
    return period_ps_;
}

RationalPs RingRfClock::tick() const { return RationalPs{ring_period_ps(), 16}; }

SimTime RingRfClock::turn_boundary(std::int64_t turn) const {
    return origin() + turn * period_ps_;
}

SimTime RingRfClock::tick_instant(const RationalPs& ticks) const {
    // ticks * (period/16), carried exactly, rounded to ps at the end.
    __int128 n = static_cast<__int128>(ticks.num) * ring_period_ps();
    // n / (ticks.den * 16), round to nearest
    const __int128 d = static_cast<__int128>(ticks.den) * 16;
    __int128 q = n / d;
    __int128 r = n % d;
    if (r < 0) r = -r;
    if (2 * r >= d) q += (n < 0 ? -1 : 1);
    return origin() + static_cast<std::int64_t>(q);
}

double measure_sigma_ps(const GridConfig& grid, double kappa, double kappa_f, int cycles,
                        int warmup) {
    GridModel model(grid);
    PllState pll = make_pll(kappa, kappa_f, grid.f_min, grid.f_max, grid.f_nominal);
    double sum = 0.0, sumsq = 0.0;
    std::int64_t n = 0;
    for (int k = 0; k < cycles; ++k) {
        const ZeroCrossing zc = model.next_zero_crossing();
        const PllOutput out = pll_update(pll, zc);
        pll = out.state;
        if (k < warmup) continue;
        const double dev = static_cast<double>(out.reference - zc.at);
        sum += dev;
        sumsq += dev * dev;
        ++n;
    }
    if (n < 2) return 0.0;
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    return std::sqrt(var);
}

CalibrationResult calibrate_coupling(const GridConfig& grid, std::int64_t target_sigma_ps,
                                     int cycles) {
    if (target_sigma_ps < 0) throw ConfigError("calibrate: target sigma must be >= 0");
    if (target_sigma_ps == 0)
        return CalibrationResult{1.0, 0.25, 0.0};  // pass-through: output == grid

    const auto sigma_at = [&](double kappa) {
        return measure_sigma_ps(grid, kappa, kappa * kappa / 4.0, cycles);
    };
    const double target = static_cast<double>(target_sigma_ps);

    // sigma(kappa) decreases as kappa rises toward 1 (tighter grid coupling).
    double lo = 1e-4, hi = 1.0;
    const double sigma_lo = sigma_at(lo);
    if (sigma_lo < 0.8 * target) {
        std::ostringstream os;
        os << "calibration target sigma " << target_sigma_ps
           << " ps unreachable: achievable range is [0, " << static_cast<std::int64_t>(sigma_lo)
           << "] ps for this grid scenario";
        throw CalibrationError(os.str());
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = std::sqrt(lo * hi);  // log-scale bisection
        if (sigma_at(mid) > target)
            lo = mid;
        else
            hi = mid;
        if (hi / lo < 1.0 + 1e-9) break;
    }
    const double kappa = std::sqrt(lo * hi);
    const double measured = sigma_at(kappa);
    if (measured < 0.8 * target || measured > 1.2 * target) {
        std::ostringstream os;
        os << "calibration could not meet sigma " << target_sigma_ps << " ps within 20% (best "
           << static_cast<std::int64_t>(measured) << " ps at kappa=" << kappa
           << "); target is below the scenario's quantization floor";
        throw CalibrationError(os.str());
    }
    return CalibrationResult{kappa, kappa * kappa / 4.0, measured};
}

}  // namespace actsim
