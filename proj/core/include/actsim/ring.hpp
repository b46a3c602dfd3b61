#pragma once

#include <cstdint>

#include "actsim/time.hpp"

namespace actsim {

struct RingParams {
    double circumference_m{248.0};
    double kinetic_energy_mev{1000.0};
    double proton_rest_mass_mev{938.272};
};

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kEnergyMinMev = 950.0;
inline constexpr double kEnergyMaxMev = 1300.0;

/// Revolution period in integer ps for a proton of the given kinetic energy:
/// gamma = 1 + Ek/m, beta = sqrt(1 - 1/gamma^2), T = C / (beta c).
/// Throws RangeError outside the supported 950..1300 MeV envelope.
std::int64_t revolution_period_ps(const RingParams& params);

/// Carrier tick: ring_period / 16, exact rational. 16 ticks = one turn.
RationalPs carrier_period(std::int64_t ring_period_ps);

/// Error of a fixed-time delay vs. the true beam arrival after n turns when
/// the revolution period is off by period_error_ps.
std::int64_t cumulative_drift_ps(std::int64_t n_turns, std::int64_t period_error_ps);

struct BeamStructure {
    std::int64_t gap_ns{300};
    std::int64_t minipulse_ns{645};
    std::int64_t fill_turns{1060};
    std::int64_t gap_tolerance_ps{5000};
};

}  // namespace actsim
