#include "actsim/ring.hpp"

#include <cmath>
#include <sstream>

#include "actsim/error.hpp"

namespace actsim {

std::int64_t revolution_period_ps(const RingParams& params) {
    if (params.kinetic_energy_mev < kEnergyMinMev || params.kinetic_energy_mev > kEnergyMaxMev) {
        std::ostringstream os;
        os << "kinetic energy " << params.kinetic_energy_mev << " MeV outside supported range ["
           << kEnergyMinMev << ", " << kEnergyMaxMev << "] MeV";
        throw RangeError(os.str());
    }
    if (params.circumference_m <= 0) throw RangeError("circumference must be positive");

    const double gamma = 1.0 + params.kinetic_energy_mev / params.proton_rest_mass_mev;
    const double beta = std::sqrt(1.0 - 1.0 / (gamma * gamma));
    const double period_s = params.circumference_m / (beta * kSpeedOfLight);
    return static_cast<std::int64_t>(std::llround(period_s * 1e12));
}

RationalPs carrier_period(std::int64_t ring_period_ps) {
    if (ring_period_ps <= 0) throw RangeError("ring period must be positive");
    return RationalPs{ring_period_ps, 16};
}

std::int64_t cumulative_drift_ps(std::int64_t n_turns, std::int64_t period_error_ps) {
    if (n_turns < 0) throw RangeError("turn count must be >= 0");
    return n_turns * period_error_ps;
}

}  // namespace actsim
