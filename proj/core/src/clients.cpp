#include "actsim/clients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "actsim/error.hpp"

namespace actsim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_pi(double x) {
    x = std::fmod(x + kTwoPi / 2.0, kTwoPi);
    if (x < 0) x += kTwoPi;
    return x - kTwoPi / 2.0;
}
}  // namespace

UtilityModule::UtilityModule(std::uint32_t reset_address, std::set<std::uint8_t> interrupt_codes,
                             std::uint8_t reset_frame_address)
    : reset_address_(reset_address),
      reset_frame_address_(reset_frame_address),
      interrupt_codes_(std::move(interrupt_codes)) {}

std::optional<InterruptRecord> UtilityModule::on_event(const TimedEvent& ev) {
    if (interrupt_codes_.count(ev.code) == 0) return std::nullopt;
    InterruptRecord rec{ev.at, ev.code};
    interrupts_.push_back(rec);
    return rec;
}

void UtilityModule::store_frame(const RtdlFrame& f) {
    memory_[f.address] = f.data;
    if (f.address == reset_frame_address_ && f.data == reset_address_) reset_asserted_ = true;
}

ChopperKind parse_chopper_kind(const std::string& s) {
    if (s == "fermi") return ChopperKind::Fermi;
    if (s == "t0") return ChopperKind::T0;
    if (s == "bandwidth") return ChopperKind::Bandwidth;
    throw ConfigError("unknown chopper kind: \"" + s + "\"");
}

ChopperRotor::ChopperRotor(ChopperConfig cfg, std::int64_t cycle_period_ps,
                           double initial_phase_rad, double initial_omega_rad_s)
    : cfg_(std::move(cfg)),
      cycle_period_ps_(cycle_period_ps),
      phase_(initial_phase_rad),
      omega_(initial_omega_rad_s) {
    if (cfg_.harmonic <= 0) throw ConfigError("chopper harmonic must be positive");
    if (cfg_.alpha_max <= 0) throw ConfigError("chopper alpha_max must be positive");
    if (cycle_period_ps_ <= 0) throw ConfigError("chopper cycle period must be positive");
}

void ChopperRotor::step(double dt_s, double ref_phase_rad) {
    if (dt_s <= 0) throw ConfigError("chopper step dt must be positive");
    // Coast through the substep first, then control on the end-of-step error;
    // measuring before the move bakes in a permanent one-substep lag.
    phase_ += omega_ * dt_s;
    const double e = wrap_pi(ref_phase_rad - phase_);
    const double de = have_prev_error_ ? (e - prev_error_) / dt_s : 0.0;
    prev_error_ = e;
    have_prev_error_ = true;
    integral_ += e * dt_s;
    double a = cfg_.kp * e + cfg_.ki * integral_ + cfg_.kd * de;
    if (a > cfg_.alpha_max) {
        a = cfg_.alpha_max;
        ++clamp_count_;
        integral_ -= e * dt_s;  // anti-windup: freeze the integral while clamped
    } else if (a < -cfg_.alpha_max) {
        a = -cfg_.alpha_max;
        ++clamp_count_;
        integral_ -= e * dt_s;
    }
    max_abs_accel_ = std::max(max_abs_accel_, std::abs(a));
    omega_ += a * dt_s;
}

ChopperRotor::ErrorReport ChopperRotor::evaluate(double ref_phase_rad) {
    const double phase_err = wrap_pi(ref_phase_rad - phase_);
    // One machine cycle is harmonic * 2*pi of rotor phase.
    const double time_err_ps =
        phase_err / (kTwoPi * static_cast<double>(cfg_.harmonic)) *
        static_cast<double>(cycle_period_ps_);
    ErrorReport rep;
    rep.time_error_ps = static_cast<std::int64_t>(std::llround(time_err_ps));
    const double abs_us = std::abs(time_err_ps) / static_cast<double>(kPsPerUs);
    if (abs_us <= cfg_.lock_threshold_us) {
        if (++lock_run_ >= cfg_.lock_cycles) locked_ = true;
    } else {
        lock_run_ = 0;
    }
    rep.locked = locked_;
    rep.pass_desired = std::llabs(rep.time_error_ps) <= kPsPerUs / 2;
    rep.pass_required = std::llabs(rep.time_error_ps) <= kPsPerUs;
    return rep;
}

KlystronResult klystron_check(SimTime t_cycle_start, std::span<const SimTime> crossings,
                              std::int64_t window_ps) {
    if (crossings.empty()) throw StateError("klystron check: no zero crossings supplied");
    std::int64_t best = t_cycle_start - crossings.front();
    for (const SimTime& zc : crossings) {
        const std::int64_t d = t_cycle_start - zc;
        if (std::llabs(d) < std::llabs(best)) best = d;
    }
    KlystronResult r;
    r.deviation_ps = best;
    r.margin_ps = window_ps - std::llabs(best);
    r.pass = r.margin_ps >= 0;
    return r;
}

BeamGateConfig make_beam_gate(std::int64_t gap_ticks, bool centered) {
    if (gap_ticks <= 0 || gap_ticks >= 16)
        throw ConfigError("beam gate: gap_ticks must be in (0, 16)");
    BeamGateConfig cfg;
    cfg.gap_ticks = gap_ticks;
    cfg.phase_offset_ticks = centered ? RationalPs{-gap_ticks, 2} : RationalPs{0, 1};
    return cfg;
}

std::vector<GateEdge> beam_gate_edges(const BeamGateConfig& cfg, std::int64_t fill_turns) {
    std::vector<GateEdge> edges;
    edges.reserve(static_cast<std::size_t>(fill_turns));
    for (std::int64_t t = 0; t < fill_turns; ++t) {
        const RationalPs base = cfg.phase_offset_ticks.plus(RationalPs{16 * t, 1});
        edges.push_back({t, base, base.plus(RationalPs{cfg.gap_ticks, 1})});
    }
    return edges;
}

RationalPs gap_center_tick(const BeamGateConfig& cfg, std::int64_t turn) {
    return cfg.phase_offset_ticks.plus(RationalPs{cfg.gap_ticks, 2})
        .plus(RationalPs{16 * turn, 1});
}

std::int64_t gap_alignment_error_ps(const BeamGateConfig& cfg, const RingRfClock& clock,
                                    SimTime instant) {
    const std::int64_t period = clock.ring_period_ps();
    const std::int64_t dt = instant - clock.origin();
    // Gap centers repeat every turn; pick the nearest turn index and check
    // its neighbors exactly.
    const double approx_turn =
        (static_cast<double>(dt) / static_cast<double>(period)) -
        gap_center_tick(cfg, 0).to_double() / 16.0;
    const std::int64_t t0 = static_cast<std::int64_t>(std::llround(approx_turn));
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::int64_t t = t0 - 1; t <= t0 + 1; ++t) {
        const SimTime center = clock.tick_instant(gap_center_tick(cfg, t));
        best = std::min<std::int64_t>(best, std::llabs(instant - center));
    }
    return best;
}

}  // namespace actsim
