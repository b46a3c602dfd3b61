#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actsim/scenario.hpp"
#include "actsim/time.hpp"

namespace actsim {

struct CycleMetrics {
    std::int64_t cycle_index{0};
    std::int64_t deviation_ps{0};
    bool in_sync{true};
    bool klystron_pass{true};
    std::int64_t klystron_margin_ps{0};
    std::int64_t extraction_gap_error_ps{0};
    std::int64_t ring_period_ps{0};
    std::uint32_t tod_seconds{0};
    std::int64_t fraction_ticks{0};
    SimTime t_extraction;
    std::vector<std::int64_t> chopper_error_ps;  // parallel to scenario choppers
    std::vector<bool> chopper_locked;
};

struct ChopperSummary {
    std::string name;
    std::int64_t max_abs_error_ps{0};            // post-lock
    std::int64_t max_abs_error_any_ps{0};        // including acquisition
    std::int64_t post_lock_cycles{0};
    std::int64_t clamp_count{0};
    double pass_rate_half_us{0.0};  // post-lock cycles within +/-0.5 us
    bool locked{false};
};

struct RunSummary {
    std::int64_t cycles{0};
    double sigma_deviation_ps{0.0};
    std::int64_t max_abs_deviation_ps{0};
    std::int64_t sync_lost_count{0};
    std::int64_t klystron_fail_count{0};
    bool klystron_matches_sync{true};
    std::int64_t max_gap_error_ps{0};
    std::vector<ChopperSummary> choppers;
    bool timestamps_unique{true};
    bool rtdl_order_ok{true};
    bool rtdl_memory_ok{true};
    std::int64_t wire_cycles_checked{0};
    bool wire_ok{true};
    bool checks_enabled{false};
    bool checks_pass{true};
    std::vector<std::string> check_failures;
    double calibrated_kappa{0.0};  // 0 when kappa came straight from config
};

struct RunResult {
    std::vector<CycleMetrics> metrics;
    RunSummary summary;
    std::string event_log;
};

RunResult run_scenario(const Scenario& sc);

/// Fixed-ps delay vs. tick-domain delay for the same trigger, per period
/// change. The fixed delay is computed once at the nominal period; the tick
/// delay rides the latched ring-rf clock.
struct DelayComparison {
    std::int64_t delta_ps;
    std::int64_t fixed_error_ps;
    std::int64_t tick_error_ps;
};

struct DelayModeReport {
    std::int64_t turns{0};
    std::int64_t nominal_period_ps{0};
    std::vector<DelayComparison> rows;
    std::int64_t fixed_error_span_ps{0};
    std::int64_t max_abs_tick_error_ps{0};
};

DelayModeReport compare_delay_modes(const Scenario& sc, std::int64_t turns,
                                    const std::vector<std::int64_t>& deltas_ps);

std::string metrics_csv(const RunResult& r, const Scenario& sc);
std::string summary_text(const RunResult& r);

/// Minimal standalone vector plot of one series against cycle index.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& ys, const std::string& y_label);

/// Writes event log, metrics CSV, summary and plots under out_dir.
void write_outputs(const std::string& out_dir, const Scenario& sc, const RunResult& r);

}  // namespace actsim
