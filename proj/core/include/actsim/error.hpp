#pragma once

#include <stdexcept>
#include <string>

namespace actsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad scenario config or parameter combination; reported before anything runs.
struct ConfigError : Error {
    using Error::Error;
};

/// Event scheduled in the past, run_until backwards, RTDL broadcast overrun.
struct SchedulingError : Error {
    using Error::Error;
};

/// Physical parameter outside the supported envelope (e.g. beam energy).
struct RangeError : Error {
    using Error::Error;
};

/// Line-code / frame encoding rejected (overlap, unregistered code, overflow).
struct EncodingError : Error {
    using Error::Error;
};

/// PLL coupling search could not reach the requested smoothing target.
struct CalibrationError : Error {
    using Error::Error;
};

/// Operation called in a machine-cycle state that forbids it
/// (phase reset with beam in the ring, delay armed before reset, ...).
struct StateError : Error {
    using Error::Error;
};

}  // namespace actsim
