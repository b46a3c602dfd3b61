#include "actsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include "actsim/engine.hpp"
#include "actsim/error.hpp"
#include "actsim/eventlink.hpp"
#include "actsim/rtdl.hpp"

namespace actsim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct ChopperDriver {
    ChopperRotor rotor;
    double ref_phase_last;  // reference phase at t_last
    SimTime t_last;
    double slope;  // rad per ps, latest reference segment

    ChopperDriver(const ChopperConfig& cfg, std::int64_t cycle_period_ps, SimTime t0)
        : rotor(cfg, cycle_period_ps, 0.0,
                kTwoPi * static_cast<double>(cfg.harmonic) /
                    (static_cast<double>(cycle_period_ps) * 1e-12)),
          ref_phase_last(0.0),
          t_last(t0),
          slope(kTwoPi * static_cast<double>(cfg.harmonic) /
                static_cast<double>(cycle_period_ps)) {}

    /// Piecewise-linear reference: advance to (t_target, ref_target).
    void step_to(SimTime t_target, double ref_target, int substeps) {
        const std::int64_t span_ps = t_target - t_last;
        if (span_ps <= 0) return;
        slope = (ref_target - ref_phase_last) / static_cast<double>(span_ps);
        const double dt_s = static_cast<double>(span_ps) * 1e-12 / substeps;
        for (int i = 1; i <= substeps; ++i) {
            const double ref = ref_phase_last +
                               (ref_target - ref_phase_last) * (static_cast<double>(i) / substeps);
            rotor.step(dt_s, ref);
        }
        t_last = t_target;
        ref_phase_last = ref_target;
    }

    double extrapolate_ref(SimTime t) const {
        return ref_phase_last + slope * static_cast<double>(t - t_last);
    }
};

std::uint32_t encode_phase_diff(std::int64_t deviation_ps) {
    // Signed 24-bit two's complement, units of 0.1 us.
    std::int64_t v = deviation_ps / (kPsPerUs / 10);
    v = std::clamp<std::int64_t>(v, -(1 << 23), (1 << 23) - 1);
    return static_cast<std::uint32_t>(v & 0xFFFFFF);
}

std::int64_t tick_index(SimTime t, SimTime origin, std::int64_t period_ps) {
    const __int128 n = static_cast<__int128>(t - origin) * 16;
    __int128 q = n / period_ps;
    const __int128 r = n % period_ps;
    if (2 * (r < 0 ? -r : r) >= period_ps) q += (n < 0 ? -1 : 1);
    return static_cast<std::int64_t>(q);
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
    validate_scenario(sc);
    RunResult result;
    RunSummary& sum = result.summary;
    sum.cycles = sc.cycles;

    RingParams rp;
    rp.circumference_m = sc.ring.circumference_m;
    rp.kinetic_energy_mev = sc.ring.kinetic_energy_mev;
    const std::int64_t base_period = revolution_period_ps(rp);
    const std::int64_t nominal_cycle_ps = GridModel::spacing_for(sc.grid.f_nominal);

    double kappa;
    double kappa_f;
    if (sc.mtg.target_sigma_ps) {
        const CalibrationResult cal = calibrate_coupling(sc.grid, *sc.mtg.target_sigma_ps);
        kappa = cal.kappa;
        kappa_f = sc.mtg.kappa_f.value_or(cal.kappa_f);
        sum.calibrated_kappa = cal.kappa;
    } else {
        kappa = sc.mtg.kappa.value_or(1.0);
        kappa_f = sc.mtg.kappa_f.value_or(kappa * kappa / 4.0);
    }

    GridModel grid(sc.grid);
    PllState pll = make_pll(kappa, kappa_f, sc.grid.f_min, sc.grid.f_max, sc.grid.f_nominal);
    Engine engine;
    RingRfClock clock;
    const BeamGateConfig gate = make_beam_gate(sc.clients.gap_ticks, sc.clients.gap_centered);

    const FrameRegistry registry = FrameRegistry::defaults();
    std::vector<std::uint8_t> list_addrs = sc.rtdl.list;
    if (list_addrs.empty()) list_addrs = default_encoder_addresses();
    const EncoderList enc_list(list_addrs, registry);

    std::vector<UtilityModule> utils;
    if (sc.clients.utility_modules.empty()) {
        utils.emplace_back(1u, std::set<std::uint8_t>{codes::CycleStart, codes::SyncLost});
    } else {
        for (const auto& cfg : sc.clients.utility_modules)
            utils.emplace_back(cfg.reset_address,
                               std::set<std::uint8_t>(cfg.interrupt_codes.begin(),
                                                      cfg.interrupt_codes.end()));
    }

    // Per-cycle ring-period wobble, deterministic per seed.
    std::mt19937_64 wobble_rng(sc.seed ^ 0x9e3779b97f4a7c15ULL);
    auto wobble = [&]() -> std::int64_t {
        if (sc.ring.period_wobble_ps == 0) return 0;
        const std::uint64_t span = static_cast<std::uint64_t>(2 * sc.ring.period_wobble_ps + 1);
        return static_cast<std::int64_t>(wobble_rng() % span) - sc.ring.period_wobble_ps;
    };

    std::vector<ChopperDriver> choppers;
    sum.choppers.resize(sc.clients.choppers.size());
    for (std::size_t i = 0; i < sc.clients.choppers.size(); ++i)
        sum.choppers[i].name = sc.clients.choppers[i].name;

    double dev_sum = 0.0, dev_sumsq = 0.0;
    std::set<std::pair<std::uint32_t, std::int64_t>> seen_timestamps;
    std::vector<std::int64_t> half_us_hits(sc.clients.choppers.size(), 0);

    SyncStatus sync_prev;
    std::optional<ZeroCrossing> zc_prev;

    for (std::int64_t k = 0; k < sc.cycles; ++k) {
        const ZeroCrossing zc = grid.next_zero_crossing();
        const PllOutput pout = pll_update(pll, zc);
        pll = pout.state;

        const std::int64_t period_k = base_period + wobble();
        const CycleSchedule sched = schedule_cycle(k, pout.reference, period_k, sc.mtg.cycle);

        std::vector<SimTime> crossings;
        if (zc_prev) crossings.push_back(zc_prev->at);
        crossings.push_back(zc.at);
        zc_prev = zc;

        const SyncStatus sync = check_sync(sched, crossings, sc.mtg.threshold_ps, sync_prev);
        sync_prev = sync;
        const KlystronResult kly =
            klystron_check(sched.t_cycle_start, crossings, sc.clients.klystron_window_ps);

        // Lazily create choppers at the first cycle so their phase origin is
        // the first Cycle Start.
        if (choppers.empty() && !sc.clients.choppers.empty()) {
            for (const auto& cfg : sc.clients.choppers)
                choppers.emplace_back(cfg, nominal_cycle_ps, sched.t_cycle_start);
        }

        // RTDL values for this cycle.
        const std::uint32_t tod = sc.rtdl.tod_epoch_seconds +
                                  static_cast<std::uint32_t>(sched.t_rtdl_start.ps / kPsPerSec);
        std::map<std::uint8_t, std::uint32_t> values;
        for (std::uint8_t a : enc_list.addresses()) values[a] = 0;
        for (const auto& [a, v] : sc.rtdl.static_values) values[a] = v;
        values[rtdl_addr::TodSecondsHi] = tod_hi(tod);
        values[rtdl_addr::TodSecondsLo] = tod_lo(tod);
        values[rtdl_addr::RingRevolutionPeriod] = static_cast<std::uint32_t>(period_k);
        values[rtdl_addr::GridPhaseDiff] = encode_phase_diff(sync.deviation_ps);

        const std::vector<FrameDelivery> frames =
            broadcast_cycle(registry, enc_list, values, sched.t_rtdl_start, sched.t_cycle_start,
                            sc.rtdl.bitrate_bps);

        // Wire everything into the engine.
        auto deliver_to_utils = [&utils](const TimedEvent& ev) {
            for (auto& u : utils) u.on_event(ev);
        };
        engine.schedule({sched.t_rtdl_start, codes::RtdlStart, k, "mtg"}, deliver_to_utils);
        for (const FrameDelivery& fd : frames) {
            engine.schedule({fd.at, fd.frame.address,
                             static_cast<std::int64_t>(fd.frame.data), "rtdl"},
                            [&utils, frame = fd.frame](const TimedEvent&) {
                                for (auto& u : utils) u.store_frame(frame);
                            });
        }
        engine.schedule({sched.t_cycle_start, codes::CycleStart, k, "mtg"},
                        [&clock, &deliver_to_utils, period_k](const TimedEvent& ev) {
                            clock.reset(ev.at, period_k);
                            deliver_to_utils(ev);
                        });
        if (!sync.in_sync)
            engine.schedule({sched.t_cycle_start, codes::SyncLost, sync.consecutive_lost, "mtg"},
                            deliver_to_utils);
        engine.schedule({sched.t_klystron, codes::KlystronGate, k, "mtg"}, deliver_to_utils);
        engine.schedule({sched.t_injection, codes::InjectionStart, k, "mtg"},
                        [&clock, &deliver_to_utils](const TimedEvent& ev) {
                            clock.mark_injection();
                            deliver_to_utils(ev);
                        });
        engine.schedule({sched.t_diag_pretrig, codes::DiagPretrig, k, "mtg"}, deliver_to_utils);
        engine.schedule({sched.t_extraction, codes::Extraction, k, "mtg"},
                        [&clock, &deliver_to_utils](const TimedEvent& ev) {
                            clock.mark_extraction();
                            deliver_to_utils(ev);
                        });
        engine.schedule({sched.t_extraction + 100 * kPsPerNs, codes::EndCycle, k, "mtg"},
                        deliver_to_utils);

        engine.run_until(sched.t_extraction + kPsPerUs);

        // Beam-gap alignment of the extraction instant, exact.
        const std::int64_t gap_err = gap_alignment_error_ps(gate, clock, sched.t_extraction);

        // Timestamp for this machine cycle.
        TimestampContext tctx;
        tctx.have_reference = true;
        tctx.tod_seconds = tod;
        tctx.cycle_index = k;
        tctx.t_cycle_start = sched.t_cycle_start;
        tctx.ring_period_ps = period_k;
        const Timestamp ts = timestamp_now(tctx, sched.t_cycle_start);
        if (!seen_timestamps.insert({ts.tod_seconds, ts.cycle_index}).second)
            sum.timestamps_unique = false;

        // Choppers: track the Cycle Start train, then evaluate at extraction.
        CycleMetrics m;
        for (std::size_t ci = 0; ci < choppers.size(); ++ci) {
            ChopperDriver& cd = choppers[ci];
            const double target =
                kTwoPi * static_cast<double>(sc.clients.choppers[ci].harmonic) *
                static_cast<double>(k);
            if (k > 0) cd.step_to(sched.t_cycle_start, target, sc.clients.chopper_substeps);
            const double ref_at_ext = cd.extrapolate_ref(sched.t_extraction);
            cd.step_to(sched.t_extraction, ref_at_ext,
                       std::max(1, sc.clients.chopper_substeps / 4));
            const ChopperRotor::ErrorReport rep = cd.rotor.evaluate(ref_at_ext);
            m.chopper_error_ps.push_back(rep.time_error_ps);
            m.chopper_locked.push_back(rep.locked);
            ChopperSummary& cs = sum.choppers[ci];
            cs.max_abs_error_any_ps =
                std::max<std::int64_t>(cs.max_abs_error_any_ps, std::llabs(rep.time_error_ps));
            if (rep.locked) {
                cs.locked = true;
                ++cs.post_lock_cycles;
                cs.max_abs_error_ps = std::max<std::int64_t>(cs.max_abs_error_ps, std::llabs(rep.time_error_ps));
                if (rep.pass_desired) ++half_us_hits[ci];
            }
        }

        // RTDL ordering and utility-module memory coherence.
        if (!(frames.back().at < sched.t_cycle_start)) sum.rtdl_order_ok = false;
        for (const auto& u : utils) {
            for (std::uint8_t a : enc_list.addresses())
                if (u.memory()[a] != values[a]) sum.rtdl_memory_ok = false;
        }

        // Optional loopback of this cycle's signals through the link codec.
        if (sc.wire_check) {
            std::vector<LinkEvent> wire;
            const SimTime origin = sched.t_rtdl_start;
            wire.push_back({0, codes::RtdlStart});
            const std::int64_t cs_tick = tick_index(sched.t_cycle_start, origin, period_k);
            wire.push_back({cs_tick, codes::CycleStart});
            if (!sync.in_sync) wire.push_back({cs_tick + kFrameCells + 1, codes::SyncLost});
            wire.push_back({tick_index(sched.t_klystron, origin, period_k), codes::KlystronGate});
            wire.push_back({tick_index(sched.t_injection, origin, period_k), codes::InjectionStart});
            wire.push_back({tick_index(sched.t_diag_pretrig, origin, period_k), codes::DiagPretrig});
            wire.push_back({tick_index(sched.t_extraction, origin, period_k), codes::Extraction});
            std::sort(wire.begin(), wire.end(),
                      [](const LinkEvent& a, const LinkEvent& b) { return a.tick < b.tick; });
            const Bitstream bs = encode(wire, RationalPs{period_k, 16});
            const DecodedLink dec = decode(bs);
            ++sum.wire_cycles_checked;
            if (!dec.errors.empty() || dec.events != wire) sum.wire_ok = false;
        }

        m.cycle_index = k;
        m.deviation_ps = sync.deviation_ps;
        m.in_sync = sync.in_sync;
        m.klystron_pass = kly.pass;
        m.klystron_margin_ps = kly.margin_ps;
        m.extraction_gap_error_ps = gap_err;
        m.ring_period_ps = period_k;
        m.tod_seconds = ts.tod_seconds;
        m.fraction_ticks = ts.fraction_ticks;
        m.t_extraction = sched.t_extraction;
        result.metrics.push_back(std::move(m));

        dev_sum += static_cast<double>(sync.deviation_ps);
        dev_sumsq += static_cast<double>(sync.deviation_ps) * static_cast<double>(sync.deviation_ps);
        sum.max_abs_deviation_ps = std::max<std::int64_t>(sum.max_abs_deviation_ps, std::llabs(sync.deviation_ps));
        sum.max_gap_error_ps = std::max(sum.max_gap_error_ps, gap_err);
        if (!sync.in_sync) ++sum.sync_lost_count;
        if (!kly.pass) ++sum.klystron_fail_count;
        if (kly.pass != sync.in_sync) sum.klystron_matches_sync = false;
    }

    if (sc.cycles > 1) {
        const double n = static_cast<double>(sc.cycles);
        const double mean = dev_sum / n;
        sum.sigma_deviation_ps = std::sqrt(std::max(0.0, dev_sumsq / n - mean * mean));
    }
    for (std::size_t ci = 0; ci < sum.choppers.size(); ++ci) {
        ChopperSummary& cs = sum.choppers[ci];
        if (!choppers.empty()) cs.clamp_count = choppers[ci].rotor.clamp_count();
        if (cs.post_lock_cycles > 0)
            cs.pass_rate_half_us = static_cast<double>(half_us_hits[ci]) /
                                   static_cast<double>(cs.post_lock_cycles);
    }
    result.event_log = engine.format_log();

    // Scenario-level pass/fail checks (drive the CLI exit code).
    if (sc.checks.enabled) {
        sum.checks_enabled = true;
        auto fail = [&](const std::string& msg) {
            sum.checks_pass = false;
            sum.check_failures.push_back(msg);
        };
        std::ostringstream os;
        if (sc.checks.sigma_min_ps && sum.sigma_deviation_ps < *sc.checks.sigma_min_ps) {
            os.str("");
            os << "sigma " << sum.sigma_deviation_ps << " ps below minimum "
               << *sc.checks.sigma_min_ps;
            fail(os.str());
        }
        if (sc.checks.sigma_max_ps && sum.sigma_deviation_ps > *sc.checks.sigma_max_ps) {
            os.str("");
            os << "sigma " << sum.sigma_deviation_ps << " ps above maximum "
               << *sc.checks.sigma_max_ps;
            fail(os.str());
        }
        if (sc.checks.max_abs_deviation_ps &&
            sum.max_abs_deviation_ps > *sc.checks.max_abs_deviation_ps) {
            os.str("");
            os << "max |deviation| " << sum.max_abs_deviation_ps << " ps exceeds "
               << *sc.checks.max_abs_deviation_ps;
            fail(os.str());
        }
        if (sc.checks.max_gap_error_ps && sum.max_gap_error_ps > *sc.checks.max_gap_error_ps) {
            os.str("");
            os << "max gap alignment error " << sum.max_gap_error_ps << " ps exceeds "
               << *sc.checks.max_gap_error_ps;
            fail(os.str());
        }
        if (sc.checks.chopper_max_error_ps) {
            for (const auto& cs : sum.choppers) {
                if (!cs.locked) {
                    fail("chopper " + cs.name + " never locked");
                } else if (cs.max_abs_error_ps > *sc.checks.chopper_max_error_ps) {
                    os.str("");
                    os << "chopper " << cs.name << " post-lock error " << cs.max_abs_error_ps
                       << " ps exceeds " << *sc.checks.chopper_max_error_ps;
                    fail(os.str());
                }
            }
        }
        if (sc.checks.require_all_in_sync && sum.sync_lost_count > 0) {
            os.str("");
            os << sum.sync_lost_count << " sync-lost cycles";
            fail(os.str());
        }
        if (!sum.timestamps_unique) fail("timestamps not unique");
        if (!sum.rtdl_order_ok) fail("RTDL frames not all before Cycle Start");
        if (!sum.rtdl_memory_ok) fail("utility-module RTDL memory mismatch");
        if (!sum.klystron_matches_sync) fail("klystron pass/fail disagrees with sync status");
        if (!sum.wire_ok) fail("event-link loopback mismatch");
    }
    return result;
}

DelayModeReport compare_delay_modes(const Scenario& sc, std::int64_t turns,
                                    const std::vector<std::int64_t>& deltas_ps) {
    RingParams rp;
    rp.circumference_m = sc.ring.circumference_m;
    rp.kinetic_energy_mev = sc.ring.kinetic_energy_mev;
    DelayModeReport rep;
    rep.turns = turns;
    rep.nominal_period_ps = revolution_period_ps(rp);
    const std::int64_t fixed_delay = turns * rep.nominal_period_ps;
    std::int64_t fmin = 0, fmax = 0;
    bool first = true;
    for (std::int64_t d : deltas_ps) {
        RingRfClock clock;
        clock.reset(SimTime{0}, rep.nominal_period_ps + d);
        const DelayCounter counter{codes::CycleStart, 16 * turns};
        const SimTime tick_fire = arm_delay(counter, clock, SimTime{0});
        const std::int64_t true_arrival = turns * (rep.nominal_period_ps + d);
        DelayComparison row;
        row.delta_ps = d;
        row.fixed_error_ps = fixed_delay - true_arrival;  // = -turns * d
        row.tick_error_ps = tick_fire.ps - true_arrival;
        rep.max_abs_tick_error_ps = std::max<std::int64_t>(rep.max_abs_tick_error_ps,
                                             std::llabs(row.tick_error_ps));
        if (first || row.fixed_error_ps < fmin) fmin = row.fixed_error_ps;
        if (first || row.fixed_error_ps > fmax) fmax = row.fixed_error_ps;
        first = false;
        rep.rows.push_back(row);
    }
    rep.fixed_error_span_ps = fmax - fmin;
    return rep;
}

std::string metrics_csv(const RunResult& r, const Scenario& sc) {
    std::ostringstream os;
    os << "cycle,deviation_ps,in_sync,klystron_pass,klystron_margin_ps,gap_error_ps,"
          "ring_period_ps,tod_seconds,fraction_ticks,t_extraction_ps";
    for (const auto& ch : sc.clients.choppers)
        os << ',' << ch.name << "_error_ps," << ch.name << "_locked";
    os << '\n';
    for (const auto& m : r.metrics) {
        os << m.cycle_index << ',' << m.deviation_ps << ',' << (m.in_sync ? 1 : 0) << ','
           << (m.klystron_pass ? 1 : 0) << ',' << m.klystron_margin_ps << ','
           << m.extraction_gap_error_ps << ',' << m.ring_period_ps << ',' << m.tod_seconds << ','
           << m.fraction_ticks << ',' << m.t_extraction.ps;
        for (std::size_t i = 0; i < m.chopper_error_ps.size(); ++i)
            os << ',' << m.chopper_error_ps[i] << ',' << (m.chopper_locked[i] ? 1 : 0);
        os << '\n';
    }
    return os.str();
}

std::string summary_text(const RunResult& r) {
    const RunSummary& s = r.summary;
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    os << "cycles: " << s.cycles << '\n';
    if (s.calibrated_kappa > 0) os << "calibrated kappa: " << std::setprecision(6)
                                   << s.calibrated_kappa << std::setprecision(1) << '\n';
    os << "deviation sigma: " << s.sigma_deviation_ps / 1e6 << " us\n";
    os << "deviation max: " << static_cast<double>(s.max_abs_deviation_ps) / 1e6 << " us\n";
    os << "sync-lost cycles: " << s.sync_lost_count << '\n';
    os << "klystron failures: " << s.klystron_fail_count
       << (s.klystron_matches_sync ? " (matches sync status)" : " (MISMATCH vs sync status)")
       << '\n';
    os << "max extraction/gap error: " << s.max_gap_error_ps << " ps\n";
    for (const auto& c : s.choppers) {
        os << "chopper " << c.name << ": post-lock max |error| "
           << static_cast<double>(c.max_abs_error_ps) / 1e6 << " us over " << c.post_lock_cycles
           << " cycles, +/-0.5us pass rate " << std::setprecision(3) << c.pass_rate_half_us
           << std::setprecision(1) << ", clamp events " << c.clamp_count
           << (c.locked ? "" : " (never locked)") << '\n';
    }
    os << "timestamps unique: " << (s.timestamps_unique ? "yes" : "NO") << '\n';
    os << "rtdl before cycle start: " << (s.rtdl_order_ok ? "yes" : "NO") << '\n';
    os << "rtdl memory coherent: " << (s.rtdl_memory_ok ? "yes" : "NO") << '\n';
    if (s.wire_cycles_checked > 0)
        os << "event-link loopback: " << (s.wire_ok ? "ok" : "FAILED") << " over "
           << s.wire_cycles_checked << " cycles\n";
    if (s.checks_enabled) {
        os << "checks: " << (s.checks_pass ? "PASS" : "FAIL") << '\n';
        for (const auto& f : s.check_failures) os << "  - " << f << '\n';
    }
    return os.str();
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::vector<double>& ys, const std::string& y_label) {
    const int W = 900, H = 300, ml = 70, mr = 20, mt = 30, mb = 30;
    double ymin = 0, ymax = 1;
    if (!ys.empty()) {
        ymin = *std::min_element(ys.begin(), ys.end());
        ymax = *std::max_element(ys.begin(), ys.end());
        if (ymin == ymax) { ymin -= 1; ymax += 1; }
    }
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << title
       << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
       << H - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"8\" y=\"" << mt + 10 << "\" font-size=\"11\">" << y_label << "</text>\n";
    os << std::fixed << std::setprecision(1);
    os << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
       << "\" text-anchor=\"end\" font-size=\"10\">" << ymax << "</text>\n";
    os << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb
       << "\" text-anchor=\"end\" font-size=\"10\">" << ymin << "</text>\n";
    if (ys.size() > 1) {
        os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" points=\"";
        const double xs = static_cast<double>(W - ml - mr) / static_cast<double>(ys.size() - 1);
        for (std::size_t i = 0; i < ys.size(); ++i) {
            const double x = ml + xs * static_cast<double>(i);
            const double y = H - mb - (ys[i] - ymin) / (ymax - ymin) * (H - mt - mb);
            os << std::setprecision(2) << x << ',' << y << ' ';
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

void write_outputs(const std::string& out_dir, const Scenario& sc, const RunResult& r) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream os(fs::path(out_dir) / "events.log");
        os << r.event_log;
    }
    {
        std::ofstream os(fs::path(out_dir) / "metrics.csv");
        os << metrics_csv(r, sc);
    }
    {
        std::ofstream os(fs::path(out_dir) / "summary.txt");
        os << summary_text(r);
    }
    std::vector<double> dev;
    dev.reserve(r.metrics.size());
    for (const auto& m : r.metrics) dev.push_back(static_cast<double>(m.deviation_ps) / 1e6);
    write_svg_plot((fs::path(out_dir) / "deviation.svg").string(),
                   "Cycle Start deviation from grid zero crossing", dev, "us");
    for (std::size_t ci = 0; ci < sc.clients.choppers.size(); ++ci) {
        std::vector<double> err;
        err.reserve(r.metrics.size());
        for (const auto& m : r.metrics)
            err.push_back(static_cast<double>(m.chopper_error_ps[ci]) / 1e6);
        write_svg_plot((fs::path(out_dir) / ("chopper_" + sc.clients.choppers[ci].name + ".svg"))
                           .string(),
                       "Chopper " + sc.clients.choppers[ci].name + " time error", err, "us");
    }
}

}  // namespace actsim
