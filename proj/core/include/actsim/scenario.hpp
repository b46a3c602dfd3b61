#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "actsim/clients.hpp"
#include "actsim/grid.hpp"
#include "actsim/mtg.hpp"
#include "actsim/ring.hpp"
#include "actsim/time.hpp"

namespace actsim {

struct RingConfig {
    double circumference_m{248.0};
    double kinetic_energy_mev{1000.0};
    std::int64_t period_wobble_ps{0};  // per-cycle uniform period change in [-w, +w]
};

struct MtgConfig {
    CycleParams cycle;
    std::int64_t threshold_ps{500 * kPsPerUs};
    std::optional<double> kappa;
    std::optional<double> kappa_f;
    std::optional<std::int64_t> target_sigma_ps;  // alternative to explicit kappa
};

struct RtdlSection {
    std::int64_t bitrate_bps{10'000'000};
    std::vector<std::uint8_t> list;  // empty -> all registered defaults
    std::map<std::uint8_t, std::uint32_t> static_values;
    std::uint32_t tod_epoch_seconds{0};
};

struct UtilityModuleConfig {
    std::uint32_t reset_address{0};
    std::vector<std::uint8_t> interrupt_codes;
};

struct ClientsSection {
    std::vector<UtilityModuleConfig> utility_modules;
    std::vector<ChopperConfig> choppers;
    std::int64_t klystron_window_ps{500 * kPsPerUs};
    std::int64_t gap_ticks{5};
    bool gap_centered{true};
    int chopper_substeps{64};
};

struct ChecksSection {
    bool enabled{false};
    std::optional<double> sigma_min_ps;
    std::optional<double> sigma_max_ps;
    std::optional<std::int64_t> max_abs_deviation_ps;
    std::optional<std::int64_t> max_gap_error_ps;
    std::optional<std::int64_t> chopper_max_error_ps;
    bool require_all_in_sync{false};
};

struct Scenario {
    std::int64_t cycles{100};
    std::uint64_t seed{1};
    std::string name{"scenario"};
    GridConfig grid;
    RingConfig ring;
    MtgConfig mtg;
    RtdlSection rtdl;
    ClientsSection clients;
    ChecksSection checks;
    bool wire_check{true};  // loop each cycle's events through the link codec
};

/// Parses the JSON scenario text. Unknown keys anywhere are errors.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

/// Cross-module validation (n_cs bounds, RTDL lead, energy range, gains);
/// throws ConfigError naming section and field.
void validate_scenario(const Scenario& sc);

std::string scenario_schema_help();

}  // namespace actsim
