#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "actsim/engine.hpp"
#include "actsim/mtg.hpp"
#include "actsim/rtdl.hpp"
#include "actsim/time.hpp"

namespace actsim {

struct InterruptRecord {
    SimTime at;
    std::uint8_t code;
};

/// Behavioral model of the per-IOC receiver: maps selected event codes to
/// logged interrupts, mirrors RTDL broadcasts into local memory, honors the
/// remote-reset frame.
class UtilityModule {
public:
    UtilityModule(std::uint32_t reset_address, std::set<std::uint8_t> interrupt_codes,
                  std::uint8_t reset_frame_address = rtdl_addr::IocResetAddress);

    std::optional<InterruptRecord> on_event(const TimedEvent& ev);
    void store_frame(const RtdlFrame& f);

    const std::array<std::uint32_t, 256>& memory() const { return memory_; }
    bool reset_asserted() const { return reset_asserted_; }
    const std::vector<InterruptRecord>& interrupt_log() const { return interrupts_; }
    std::uint32_t reset_address() const { return reset_address_; }

private:
    std::uint32_t reset_address_;
    std::uint8_t reset_frame_address_;
    std::set<std::uint8_t> interrupt_codes_;
    std::array<std::uint32_t, 256> memory_{};
    bool reset_asserted_{false};
    std::vector<InterruptRecord> interrupts_;
};

enum class ChopperKind { Fermi, T0, Bandwidth };
ChopperKind parse_chopper_kind(const std::string& s);  // throws ConfigError

struct ChopperConfig {
    ChopperKind kind{ChopperKind::T0};
    std::string name{"chopper"};
    std::int64_t harmonic{1};   // rotor revolutions per machine cycle
    double kp{1066.0};          // rad/s^2 per rad
    double ki{6700.0};          // rad/s^2 per rad*s
    double kd{56.5};            // rad/s^2 per rad/s
    double alpha_max{50.0};     // acceleration clamp, rad/s^2
    double lock_threshold_us{2.0};
    int lock_cycles{10};
};

/// High-inertia rotor under acceleration-clamped phase control. The
/// commanded acceleration is a PID on the wrapped phase error; the clamp
/// models the torque/inertia limit and every clamped step is counted.
class ChopperRotor {
public:
    ChopperRotor(ChopperConfig cfg, std::int64_t cycle_period_ps, double initial_phase_rad,
                 double initial_omega_rad_s);

    /// Advances dt seconds toward the reference phase (radians, unwrapped
    /// m*2*pi per machine cycle).
    void step(double dt_s, double ref_phase_rad);

    /// Equivalent time error at the given reference phase; also updates the
    /// lock detector (call once per cycle, at extraction).
    struct ErrorReport {
        std::int64_t time_error_ps{0};
        bool locked{false};
        bool pass_desired{false};   // |err| <= 0.5 us
        bool pass_required{false};  // |err| <= 1 us
    };
    ErrorReport evaluate(double ref_phase_rad);

    double phase() const { return phase_; }
    double omega() const { return omega_; }
    std::int64_t clamp_count() const { return clamp_count_; }
    double max_abs_accel() const { return max_abs_accel_; }
    const ChopperConfig& config() const { return cfg_; }

private:
    ChopperConfig cfg_;
    std::int64_t cycle_period_ps_;
    double phase_;
    double omega_;
    double integral_{0.0};
    double prev_error_{0.0};
    bool have_prev_error_{false};
    std::int64_t clamp_count_{0};
    double max_abs_accel_{0.0};
    int lock_run_{0};
    bool locked_{false};
};

struct KlystronResult {
    bool pass{true};
    std::int64_t deviation_ps{0};
    std::int64_t margin_ps{0};  // window - |deviation|
};

/// Grid-window check for the klystron modulators: fails exactly when Cycle
/// Start sits farther than `window_ps` from the nearest zero crossing.
KlystronResult klystron_check(SimTime t_cycle_start, std::span<const SimTime> crossings,
                              std::int64_t window_ps);

/// Per-turn LEBT/MEBT gate imprinting the beam gap: off for gap_ticks carrier
/// ticks each turn, on for the remainder. phase_offset_ticks places the gap
/// relative to the turn boundary; the default centers the gap on it so that
/// extraction on a turn boundary coincides with a gap center.
struct BeamGateConfig {
    std::int64_t gap_ticks{5};
    RationalPs phase_offset_ticks{-5, 2};
};

BeamGateConfig make_beam_gate(std::int64_t gap_ticks, bool centered);

struct GateEdge {
    std::int64_t turn;
    RationalPs off_tick;  // gate switches off (gap begins)
    RationalPs on_tick;   // gate switches on again
};

std::vector<GateEdge> beam_gate_edges(const BeamGateConfig& cfg, std::int64_t fill_turns);

RationalPs gap_center_tick(const BeamGateConfig& cfg, std::int64_t turn);

/// |instant - nearest gap center| in ps, exact.
std::int64_t gap_alignment_error_ps(const BeamGateConfig& cfg, const RingRfClock& clock,
                                    SimTime instant);

}  // namespace actsim
