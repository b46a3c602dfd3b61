#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "actsim/error.hpp"
#include "actsim/eventlink.hpp"
#include "actsim/harness.hpp"
#include "actsim/mtg.hpp"
#include "actsim/rtdl.hpp"
#include "actsim/scenario.hpp"

namespace {

using namespace actsim;

Scenario load_with_overrides(const std::string& config, std::int64_t cycles, std::int64_t seed) {
    Scenario sc = load_scenario(config);
    if (cycles > 0) sc.cycles = cycles;
    if (seed >= 0) {
        sc.seed = static_cast<std::uint64_t>(seed);
        sc.grid.seed = sc.seed;
    }
    return sc;
}

int cmd_validate(const std::string& config) {
    validate_scenario(load_scenario(config));
    std::cout << "ok: " << config << " validates\n";
    return 0;
}

int cmd_run(const std::string& config, std::int64_t cycles, std::int64_t seed,
            const std::string& out_dir) {
    const Scenario sc = load_with_overrides(config, cycles, seed);
    const RunResult r = run_scenario(sc);
    if (!out_dir.empty()) write_outputs(out_dir, sc, r);
    std::cout << summary_text(r);
    if (r.summary.checks_enabled && !r.summary.checks_pass) return 1;
    return 0;
}

int cmd_compare(const std::string& config, std::int64_t turns, std::int64_t sweep,
                std::int64_t step) {
    const Scenario sc = load_scenario(config);
    std::vector<std::int64_t> deltas;
    for (std::int64_t d = -sweep; d <= sweep; d += step) deltas.push_back(d);
    const DelayModeReport rep = compare_delay_modes(sc, turns, deltas);
    std::cout << "turns: " << rep.turns << ", nominal period: " << rep.nominal_period_ps
              << " ps\n";
    std::cout << "delta_ps\tfixed_error_ps\ttick_error_ps\n";
    for (const auto& row : rep.rows)
        std::cout << row.delta_ps << '\t' << row.fixed_error_ps << '\t' << row.tick_error_ps
                  << '\n';
    std::cout << "fixed-delay error span: " << rep.fixed_error_span_ps << " ps\n";
    std::cout << "max |tick-delay error|: " << rep.max_abs_tick_error_ps << " ps\n";
    return 0;
}

int cmd_calibrate(const std::string& config, std::int64_t target_sigma_ps) {
    const Scenario sc = load_scenario(config);
    const std::int64_t target =
        target_sigma_ps >= 0 ? target_sigma_ps : sc.mtg.target_sigma_ps.value_or(125 * kPsPerUs);
    const CalibrationResult cal = calibrate_coupling(sc.grid, target);
    std::cout << "kappa: " << std::setprecision(9) << cal.kappa << '\n';
    std::cout << "kappa_f: " << cal.kappa_f << '\n';
    std::cout << "measured sigma: " << static_cast<std::int64_t>(cal.measured_sigma_ps)
              << " ps (target " << target << " ps)\n";
    return 0;
}

// Event schedule text: one "tick code" pair per line, code in any integer
// base (0x.. works); '#' starts a comment.
std::vector<LinkEvent> read_schedule(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open " + path);
    std::vector<LinkEvent> events;
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tick_s, code_s;
        if (!(ls >> tick_s >> code_s)) continue;
        LinkEvent ev;
        ev.tick = std::stoll(tick_s, nullptr, 0);
        ev.code = static_cast<std::uint8_t>(std::stoul(code_s, nullptr, 0));
        events.push_back(ev);
    }
    return events;
}

int cmd_evl_encode(const std::string& in, const std::string& out, std::int64_t cell_num,
                   std::int64_t cell_den, std::int64_t length) {
    const std::vector<LinkEvent> events = read_schedule(in);
    const Bitstream bs = encode(events, RationalPs{cell_num, cell_den}, length);
    save_bitstream(out, bs);
    std::cout << "wrote " << bs.cells() << " cells (" << bs.levels.size() << " half-cells) to "
              << out << '\n';
    return 0;
}

int cmd_evl_decode(const std::string& in) {
    const Bitstream bs = load_bitstream(in);
    const DecodedLink dec = decode(bs);
    std::cout << "recovered cell: " << dec.recovered_cell.num << '/' << dec.recovered_cell.den
              << " ps, " << dec.cells << " cells\n";
    for (const auto& ev : dec.events)
        std::cout << ev.tick << "\t0x" << std::hex << std::setw(2) << std::setfill('0')
                  << static_cast<int>(ev.code) << std::dec << std::setfill(' ') << '\t'
                  << code_name(ev.code) << '\n';
    for (const auto& err : dec.errors)
        std::cerr << "error at cell " << err.cell_index << ": " << err.detail << '\n';
    return dec.errors.empty() ? 0 : 1;
}

// RTDL frame text: one "address data" pair per line.
int cmd_rtdl_pack(const std::string& in, const std::string& out) {
    std::ifstream is(in);
    if (!is) throw Error("cannot open " + in);
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error("cannot open " + out + " for writing");
    std::string line;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string addr_s, data_s;
        if (!(ls >> addr_s >> data_s)) continue;
        RtdlFrame f;
        f.address = static_cast<std::uint8_t>(std::stoul(addr_s, nullptr, 0));
        f.data = static_cast<std::uint32_t>(std::stoul(data_s, nullptr, 0));
        const auto bytes = encode_frame(f);
        os.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
        ++n;
    }
    std::cout << "wrote " << n << " frames to " << out << '\n';
    return 0;
}

int cmd_rtdl_dump(const std::string& in) {
    std::ifstream is(in, std::ios::binary);
    if (!is) throw Error("cannot open " + in);
    const FrameRegistry reg = FrameRegistry::defaults();
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
    int bad = 0;
    for (std::size_t off = 0; off + kRtdlFrameBytes <= buf.size(); off += kRtdlFrameBytes) {
        try {
            const RtdlFrame f =
                decode_frame(std::span<const std::uint8_t>(buf.data() + off, kRtdlFrameBytes));
            std::cout << "0x" << std::hex << std::setw(2) << std::setfill('0')
                      << static_cast<int>(f.address) << std::dec << std::setfill(' ') << '\t'
                      << f.data << '\t'
                      << (reg.contains(f.address) ? reg.name(f.address) : "(unregistered)")
                      << '\n';
        } catch (const Error& e) {
            std::cerr << "frame at offset " << off << ": " << e.what() << '\n';
            ++bad;
        }
    }
    if (buf.size() % kRtdlFrameBytes != 0) {
        std::cerr << "trailing " << buf.size() % kRtdlFrameBytes << " bytes ignored\n";
        ++bad;
    }
    return bad == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Accelerator timing-system simulator"};
    app.require_subcommand(1);

    std::string config, out_dir, in_path, out_path;
    std::int64_t cycles = 0, seed = -1;
    std::int64_t turns = 1060, sweep = 1000, step = 100;
    std::int64_t target_sigma = -1;
    std::int64_t cell_num = 59087, cell_den = 1, length = 0;

    auto* validate = app.add_subcommand("validate", "Check a scenario config");
    validate->add_option("--config", config, "scenario JSON")->required();

    auto* run = app.add_subcommand("run", "Run a scenario");
    run->add_option("--config", config, "scenario JSON")->required();
    run->add_option("--cycles", cycles, "override cycle count");
    run->add_option("--seed", seed, "override seed");
    run->add_option("--out", out_dir, "output directory (events.log, metrics.csv, plots)");

    auto* cmp = app.add_subcommand("compare-delay-modes",
                                   "Fixed-ps vs tick-domain delay under period changes");
    cmp->add_option("--config", config, "scenario JSON")->required();
    cmp->add_option("--turns", turns, "trigger delay in turns");
    cmp->add_option("--sweep-ps", sweep, "sweep the period change over +/- this many ps");
    cmp->add_option("--step-ps", step, "sweep step");

    auto* cal = app.add_subcommand("calibrate", "Search the PLL coupling for a sigma target");
    cal->add_option("--config", config, "scenario JSON")->required();
    cal->add_option("--target-sigma-ps", target_sigma, "smoothing target (default from config)");

    auto* ee = app.add_subcommand("evl-encode", "Encode an event schedule to a bitstream file");
    ee->add_option("--in", in_path, "schedule text: 'tick code' per line")->required();
    ee->add_option("--out", out_path, "bitstream file")->required();
    ee->add_option("--cell-num", cell_num, "cell duration numerator (ps)");
    ee->add_option("--cell-den", cell_den, "cell duration denominator");
    ee->add_option("--length", length, "total cells (0 = auto)");

    auto* ed = app.add_subcommand("evl-decode", "Decode a bitstream file");
    ed->add_option("--in", in_path, "bitstream file")->required();

    auto* rp = app.add_subcommand("rtdl-pack", "Pack 'address data' lines into binary frames");
    rp->add_option("--in", in_path, "frame text")->required();
    rp->add_option("--out", out_path, "binary frame file")->required();

    auto* rd = app.add_subcommand("rtdl-dump", "Dump a binary RTDL frame file");
    rd->add_option("--in", in_path, "binary frame file")->required();

    auto* schema = app.add_subcommand("schema", "Print the scenario config schema");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config);
        if (run->parsed()) return cmd_run(config, cycles, seed, out_dir);
        if (cmp->parsed()) return cmd_compare(config, turns, sweep, step);
        if (cal->parsed()) return cmd_calibrate(config, target_sigma);
        if (ee->parsed()) return cmd_evl_encode(in_path, out_path, cell_num, cell_den, length);
        if (ed->parsed()) return cmd_evl_decode(in_path);
        if (rp->parsed()) return cmd_rtdl_pack(in_path, out_path);
        if (rd->parsed()) return cmd_rtdl_dump(in_path);
        if (schema->parsed()) {
            std::cout << scenario_schema_help();
            return 0;
        }
    } catch (const actsim::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
