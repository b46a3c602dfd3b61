#include "actsim/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actsim/error.hpp"
#include "actsim/rtdl.hpp"

namespace actsim {

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (allowed.count(it.key()) == 0)
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("bad value for \"" + key + "\": " + e.what());
    }
}

std::uint8_t parse_addr(const json& v, const std::string& where) {
    std::int64_t n = -1;
    if (v.is_number_integer()) {
        n = v.get<std::int64_t>();
    } else if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            n = std::stoll(s, nullptr, 0);
        } catch (...) {
            throw ConfigError(where + ": bad address \"" + s + "\"");
        }
    } else {
        throw ConfigError(where + ": address must be an integer or hex string");
    }
    if (n < 0 || n > 255) throw ConfigError(where + ": address out of 0..255 range");
    return static_cast<std::uint8_t>(n);
}

GridConfig parse_grid(const json& j) {
    require_keys(j, "grid",
                 {"f_nominal", "wander_sigma", "wander_reversion", "f_min", "f_max",
                  "transients", "seed"});
    GridConfig g;
    g.f_nominal = get_or(j, "f_nominal", g.f_nominal);
    g.wander_sigma = get_or(j, "wander_sigma", g.wander_sigma);
    g.wander_reversion = get_or(j, "wander_reversion", g.wander_reversion);
    g.f_min = get_or(j, "f_min", g.f_min);
    g.f_max = get_or(j, "f_max", g.f_max);
    g.seed = get_or(j, "seed", g.seed);
    if (j.contains("transients")) {
        for (const auto& t : j.at("transients")) {
            require_keys(t, "grid.transients[]", {"at_ps", "kind", "magnitude"});
            GridTransient tr;
            tr.at = SimTime{get_or<std::int64_t>(t, "at_ps", 0)};
            tr.kind = parse_transient_kind(get_or<std::string>(t, "kind", ""));
            tr.magnitude = get_or(t, "magnitude", 0.0);
            g.transients.push_back(tr);
        }
    }
    return g;
}

RingConfig parse_ring(const json& j) {
    require_keys(j, "ring", {"circumference_m", "kinetic_energy_mev", "period_wobble_ps"});
    RingConfig r;
    r.circumference_m = get_or(j, "circumference_m", r.circumference_m);
    r.kinetic_energy_mev = get_or(j, "kinetic_energy_mev", r.kinetic_energy_mev);
    r.period_wobble_ps = get_or(j, "period_wobble_ps", r.period_wobble_ps);
    return r;
}

MtgConfig parse_mtg(const json& j) {
    require_keys(j, "mtg",
                 {"n_cs", "fill_turns", "diag_pretrig_turns", "klystron_lead_ps",
                  "rtdl_lead_ps", "extraction_offset_ps", "threshold_ps", "kappa", "kappa_f",
                  "target_sigma_ps"});
    MtgConfig m;
    m.cycle.n_cs = get_or(j, "n_cs", m.cycle.n_cs);
    m.cycle.fill_turns = get_or(j, "fill_turns", m.cycle.fill_turns);
    m.cycle.diag_pretrig_turns = get_or(j, "diag_pretrig_turns", m.cycle.diag_pretrig_turns);
    m.cycle.klystron_lead_ps = get_or(j, "klystron_lead_ps", m.cycle.klystron_lead_ps);
    m.cycle.rtdl_lead_ps = get_or(j, "rtdl_lead_ps", m.cycle.rtdl_lead_ps);
    m.cycle.extraction_offset_ps = get_or(j, "extraction_offset_ps", m.cycle.extraction_offset_ps);
    m.threshold_ps = get_or(j, "threshold_ps", m.threshold_ps);
    if (j.contains("kappa")) m.kappa = j.at("kappa").get<double>();
    if (j.contains("kappa_f")) m.kappa_f = j.at("kappa_f").get<double>();
    if (j.contains("target_sigma_ps")) m.target_sigma_ps = j.at("target_sigma_ps").get<std::int64_t>();
    return m;
}

RtdlSection parse_rtdl(const json& j) {
    require_keys(j, "rtdl", {"bitrate_bps", "list", "static_values", "tod_epoch_seconds"});
    RtdlSection r;
    r.bitrate_bps = get_or(j, "bitrate_bps", r.bitrate_bps);
    r.tod_epoch_seconds = get_or(j, "tod_epoch_seconds", r.tod_epoch_seconds);
    if (j.contains("list"))
        for (const auto& v : j.at("list")) r.list.push_back(parse_addr(v, "rtdl.list"));
    if (j.contains("static_values")) {
        const auto& sv = j.at("static_values");
        if (!sv.is_object()) throw ConfigError("rtdl.static_values: expected an object");
        for (auto it = sv.begin(); it != sv.end(); ++it) {
            const std::uint8_t a = parse_addr(json(it.key()), "rtdl.static_values");
            const auto val = it.value().get<std::int64_t>();
            if (val < 0 || val >= (1 << 24))
                throw ConfigError("rtdl.static_values: value does not fit in 24 bits");
            r.static_values[a] = static_cast<std::uint32_t>(val);
        }
    }
    return r;
}

ClientsSection parse_clients(const json& j) {
    require_keys(j, "clients",
                 {"utility_modules", "choppers", "klystron_window_ps", "gap_ticks",
                  "gap_centered", "chopper_substeps"});
    ClientsSection c;
    c.klystron_window_ps = get_or(j, "klystron_window_ps", c.klystron_window_ps);
    c.gap_ticks = get_or(j, "gap_ticks", c.gap_ticks);
    c.gap_centered = get_or(j, "gap_centered", c.gap_centered);
    c.chopper_substeps = get_or(j, "chopper_substeps", c.chopper_substeps);
    if (j.contains("utility_modules")) {
        for (const auto& u : j.at("utility_modules")) {
            require_keys(u, "clients.utility_modules[]", {"reset_address", "interrupt_codes"});
            UtilityModuleConfig um;
            um.reset_address = get_or<std::uint32_t>(u, "reset_address", 0);
            if (u.contains("interrupt_codes"))
                for (const auto& v : u.at("interrupt_codes"))
                    um.interrupt_codes.push_back(parse_addr(v, "interrupt_codes"));
            c.utility_modules.push_back(um);
        }
    }
    if (j.contains("choppers")) {
        for (const auto& ch : j.at("choppers")) {
            require_keys(ch, "clients.choppers[]",
                         {"kind", "name", "harmonic", "kp", "ki", "kd", "alpha_max",
                          "lock_threshold_us", "lock_cycles"});
            ChopperConfig cc;
            cc.kind = parse_chopper_kind(get_or<std::string>(ch, "kind", "t0"));
            cc.name = get_or<std::string>(ch, "name", "chopper");
            cc.harmonic = get_or(ch, "harmonic", cc.harmonic);
            cc.kp = get_or(ch, "kp", cc.kp);
            cc.ki = get_or(ch, "ki", cc.ki);
            cc.kd = get_or(ch, "kd", cc.kd);
            cc.alpha_max = get_or(ch, "alpha_max", cc.alpha_max);
            cc.lock_threshold_us = get_or(ch, "lock_threshold_us", cc.lock_threshold_us);
            cc.lock_cycles = get_or(ch, "lock_cycles", cc.lock_cycles);
            c.choppers.push_back(cc);
        }
    }
    return c;
}

ChecksSection parse_checks(const json& j) {
    require_keys(j, "checks",
                 {"sigma_min_ps", "sigma_max_ps", "max_abs_deviation_ps", "max_gap_error_ps",
                  "chopper_max_error_ps", "require_all_in_sync"});
    ChecksSection c;
    c.enabled = true;
    if (j.contains("sigma_min_ps")) c.sigma_min_ps = j.at("sigma_min_ps").get<double>();
    if (j.contains("sigma_max_ps")) c.sigma_max_ps = j.at("sigma_max_ps").get<double>();
    if (j.contains("max_abs_deviation_ps"))
        c.max_abs_deviation_ps = j.at("max_abs_deviation_ps").get<std::int64_t>();
    if (j.contains("max_gap_error_ps"))
        c.max_gap_error_ps = j.at("max_gap_error_ps").get<std::int64_t>();
    if (j.contains("chopper_max_error_ps"))
        c.chopper_max_error_ps = j.at("chopper_max_error_ps").get<std::int64_t>();
    c.require_all_in_sync = get_or(j, "require_all_in_sync", false);
    return c;
}

}  // namespace

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    require_keys(j, "scenario",
                 {"name", "cycles", "seed", "grid", "ring", "mtg", "rtdl", "clients", "checks",
                  "wire_check"});
    Scenario sc;
    sc.name = get_or<std::string>(j, "name", sc.name);
    sc.cycles = get_or(j, "cycles", sc.cycles);
    sc.seed = get_or(j, "seed", sc.seed);
    sc.wire_check = get_or(j, "wire_check", sc.wire_check);
    if (j.contains("grid")) sc.grid = parse_grid(j.at("grid"));
    if (j.contains("ring")) sc.ring = parse_ring(j.at("ring"));
    if (j.contains("mtg")) sc.mtg = parse_mtg(j.at("mtg"));
    if (j.contains("rtdl")) sc.rtdl = parse_rtdl(j.at("rtdl"));
    if (j.contains("clients")) sc.clients = parse_clients(j.at("clients"));
    if (j.contains("checks")) sc.checks = parse_checks(j.at("checks"));
    if (sc.grid.seed == 0) sc.grid.seed = sc.seed;
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_scenario(buf.str());
}

void validate_scenario(const Scenario& sc) {
    if (sc.cycles <= 0) throw ConfigError("cycles must be positive");

    // grid: constructor performs its own validation
    GridModel probe(sc.grid);
    (void)probe;

    // ring: energy envelope
    RingParams rp;
    rp.circumference_m = sc.ring.circumference_m;
    rp.kinetic_energy_mev = sc.ring.kinetic_energy_mev;
    const std::int64_t period = revolution_period_ps(rp);
    if (sc.ring.period_wobble_ps < 0) throw ConfigError("ring.period_wobble_ps must be >= 0");

    // mtg: n_cs bounds via a dry scheduling pass
    (void)schedule_cycle(0, SimTime{sc.mtg.cycle.rtdl_lead_ps}, period, sc.mtg.cycle);
    if (sc.mtg.threshold_ps <= 0) throw ConfigError("mtg.threshold_ps must be positive");
    if (sc.mtg.kappa && sc.mtg.target_sigma_ps)
        throw ConfigError("mtg: give either kappa or target_sigma_ps, not both");
    if (sc.mtg.kappa && (*sc.mtg.kappa <= 0.0 || *sc.mtg.kappa > 1.0))
        throw ConfigError("mtg.kappa must be in (0, 1]");

    // rtdl: registration, duplicates and lead time
    const FrameRegistry reg = FrameRegistry::defaults();
    std::vector<std::uint8_t> list = sc.rtdl.list;
    if (list.empty()) list = default_encoder_addresses();
    const EncoderList el(list, reg);
    const std::int64_t need = broadcast_duration_ps(el.size(), sc.rtdl.bitrate_bps);
    if (need >= sc.mtg.cycle.rtdl_lead_ps) {
        std::ostringstream os;
        os << "rtdl: broadcasting " << el.size() << " frames takes " << need
           << " ps but mtg.rtdl_lead_ps is only " << sc.mtg.cycle.rtdl_lead_ps << " ps";
        throw ConfigError(os.str());
    }

    // clients
    if (sc.clients.chopper_substeps <= 0)
        throw ConfigError("clients.chopper_substeps must be positive");
    if (sc.clients.klystron_window_ps <= 0)
        throw ConfigError("clients.klystron_window_ps must be positive");
    (void)make_beam_gate(sc.clients.gap_ticks, sc.clients.gap_centered);
    for (const auto& ch : sc.clients.choppers) {
        if (ch.harmonic <= 0) throw ConfigError("chopper " + ch.name + ": harmonic must be > 0");
        if (ch.alpha_max <= 0) throw ConfigError("chopper " + ch.name + ": alpha_max must be > 0");
    }
}

std::string scenario_schema_help() {
    return "Scenario sections: name, cycles, seed, wire_check,\n"
           "  grid{f_nominal,wander_sigma,wander_reversion,f_min,f_max,seed,\n"
           "       transients[{at_ps,kind:frequency-step|phase-step,magnitude}]}\n"
           "  ring{circumference_m,kinetic_energy_mev,period_wobble_ps}\n"
           "  mtg{n_cs,fill_turns,diag_pretrig_turns,klystron_lead_ps,rtdl_lead_ps,\n"
           "      extraction_offset_ps,threshold_ps,kappa|target_sigma_ps,kappa_f}\n"
           "  rtdl{bitrate_bps,list[],static_values{},tod_epoch_seconds}\n"
           "  clients{utility_modules[{reset_address,interrupt_codes[]}],\n"
           "          choppers[{kind,name,harmonic,kp,ki,kd,alpha_max,...}],\n"
           "          klystron_window_ps,gap_ticks,gap_centered,chopper_substeps}\n"
           "  checks{sigma_min_ps,sigma_max_ps,max_abs_deviation_ps,max_gap_error_ps,\n"
           "         chopper_max_error_ps,require_all_in_sync}\n"
           "Unknown keys are rejected.\n";
}

}  // namespace actsim
