#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "actsim/time.hpp"

namespace actsim {

enum class TransientKind { FrequencyStep, PhaseStep };

TransientKind parse_transient_kind(const std::string& s);  // throws ConfigError

struct GridTransient {
    SimTime at;
    TransientKind kind{TransientKind::FrequencyStep};
    double magnitude{0.0};  // Hz for frequency steps, ps for phase steps
};

struct GridConfig {
    double f_nominal{60.0};
    double wander_sigma{0.0};      // Hz per sqrt(cycle), random-walk step std
    double wander_reversion{0.0};  // per-cycle pull toward f_nominal
    double f_min{59.0};
    double f_max{61.0};
    std::vector<GridTransient> transients;
    std::uint64_t seed{0};
};

struct ZeroCrossing {
    SimTime at;
    std::int64_t cycle_index{0};
};

/// 60 Hz line model: instantaneous frequency follows a mean-reverting random
/// walk, clamped to [f_min, f_max]. One positive-going zero crossing per
/// cycle; spacing is round(1e12 / f) ps for the frequency in force.
class GridModel {
public:
    explicit GridModel(GridConfig cfg);

    ZeroCrossing next_zero_crossing();

    /// Applies a transient immediately (scripted transients in the config are
    /// applied automatically when simulated time reaches them).
    void apply_transient(TransientKind kind, double magnitude);

    double frequency() const { return f_; }
    SimTime last_crossing() const { return t_; }

    static std::int64_t spacing_for(double f_hz);

private:
    double gaussian();

    GridConfig cfg_;
    double f_;
    SimTime t_{0};
    std::int64_t index_{0};
    std::int64_t pending_phase_ps_{0};
    std::size_t next_transient_{0};
    std::mt19937_64 rng_;
};

}  // namespace actsim
