#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gasnet/config.hpp"
#include "gasnet/engine.hpp"
#include "gasnet/error.hpp"
#include "gasnet/network.hpp"
#include "gasnet/steady_init.hpp"

namespace gasnet::io {

using json = nlohmann::json;

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
    out << content;
}

// ---------------------------------------------------------------------------
// schedules
// ---------------------------------------------------------------------------

/// Parse a schedule node. A bare number is shorthand for a constant. `scale`
/// converts file units to SI (e.g. 1e6 for MPa fields).
inline Schedule parse_schedule(const json& j, double scale = 1.0) {
    if (j.is_number()) return Schedule::constant(j.get<double>() * scale);
    if (!j.is_object()) throw Error(ErrorKind::Io, "schedule must be a number or an object");
    std::string kind = j.at("kind").get<std::string>();
    double period = j.value("period_s", 0.0);
    if (kind == "constant") {
        return Schedule::constant(j.at("value").get<double>() * scale);
    } else if (kind == "sinusoid") {
        return Schedule::sinusoid(j.at("base").get<double>() * scale,
                                  j.at("amplitude_fraction").get<double>(),
                                  j.at("angular_frequency_rad_per_s").get<double>(),
                                  j.value("phase_rad", 0.0), period);
    } else if (kind == "piecewise_linear") {
        std::vector<std::pair<double, double>> pts;
        for (const auto& p : j.at("points"))
            pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>() * scale);
        return Schedule::piecewise_linear(std::move(pts), period);
    } else if (kind == "tanh_ramp") {
        return Schedule::tanh_ramp(j.at("base").get<double>() * scale,
                                   j.at("amplitude").get<double>() * scale,
                                   j.at("rate_per_s").get<double>(),
                                   j.at("center_s").get<double>(), period);
    }
    throw Error(ErrorKind::Io, "unknown schedule kind '" + kind + "'");
}

inline CompositionSchedule parse_composition(const json& j, const GasModel& gas) {
    CompositionSchedule comp;
    bool balance_seen = false;
    for (const auto& [key, value] : j.items()) {
        if (key == "balance") {
            comp.balance = gas.index_of(value.get<std::string>());
            balance_seen = true;
        } else {
            comp.given.emplace_back(gas.index_of(key), parse_schedule(value));
        }
    }
    if (!balance_seen) {
        if (comp.given.size() == gas.size()) {
            // fully specified: last species doubles as balance, which is
            // exact when the given fractions sum to one
            comp.balance = comp.given.back().first;
            comp.given.pop_back();
        } else {
            throw Error(ErrorKind::Io, "composition needs a 'balance' species");
        }
    }
    return comp;
}

// ---------------------------------------------------------------------------
// network file
// ---------------------------------------------------------------------------

inline Network load_network_json(const json& j) {
    Network net;
    net.title = j.value("title", "");
    double T = j.at("temperature_K").get<double>();

    std::vector<GasSpecies> species;
    for (const auto& s : j.at("species")) {
        GasSpecies g;
        g.name = s.at("name").get<std::string>();
        if (s.contains("R_J_per_kg_K"))
            g.R = s.at("R_J_per_kg_K").get<double>();
        else if (s.contains("wave_speed_m_per_s")) {
            double sigma = s.at("wave_speed_m_per_s").get<double>();
            g.R = sigma * sigma / T;
        } else
            throw Error(ErrorKind::Io, "species " + g.name +
                                           ": needs R_J_per_kg_K or wave_speed_m_per_s");
        g.a = s.value("a_per_Pa", 0.0);
        g.eps = s.value("diffusion_m2_per_s", 0.0);
        species.push_back(std::move(g));
    }
    net.gas = GasModel(std::move(species), T);

    for (const auto& n : j.at("nodes")) {
        Node node;
        node.id = n.at("id").get<std::string>();
        std::string type = n.at("type").get<std::string>();
        if (type == "slack")
            node.kind = NodeKind::Slack;
        else if (type == "flow")
            node.kind = NodeKind::Flow;
        else
            throw Error(ErrorKind::Io, "node " + node.id + ": unknown type '" + type + "'");
        net.nodes.push_back(std::move(node));
    }
    for (const auto& p : j.at("pipes")) {
        Pipe pipe;
        pipe.id = p.at("id").get<std::string>();
        pipe.from = net.node_index(p.at("from").get<std::string>());
        pipe.to = net.node_index(p.at("to").get<std::string>());
        pipe.diameter = p.at("diameter_m").get<double>();
        pipe.length = p.contains("length_km") ? p.at("length_km").get<double>() * 1.0e3
                                              : p.at("length_m").get<double>();
        pipe.friction = p.at("friction").get<double>();
        net.pipes.push_back(std::move(pipe));
    }
    if (j.contains("compressors")) {
        for (const auto& c : j.at("compressors")) {
            Compressor comp;
            comp.id = c.at("id").get<std::string>();
            comp.pipe = net.pipe_index(c.at("pipe").get<std::string>());
            comp.ratio = Schedule::constant(1.0);
            net.pipes[comp.pipe].compressor = net.compressors.size();
            net.compressors.push_back(std::move(comp));
        }
    }
    return net;
}

inline Network load_network(const std::string& path) {
    json j;
    try {
        j = json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "network file parse error: " + std::string(e.what()), path);
    }
    try {
        return load_network_json(j);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "network file schema error: " + std::string(e.what()), path);
    }
}

/// Canonical JSON form of the network topology: keys sorted, fixed field
/// set, SI units. serialize(parse(serialize(x))) == serialize(x).
inline json network_to_json(const Network& net) {
    json j;
    j["title"] = net.title;
    j["temperature_K"] = net.gas.temperature();
    j["species"] = json::array();
    for (const auto& s : net.gas.species()) {
        json e;
        e["name"] = s.name;
        e["R_J_per_kg_K"] = s.R;
        e["a_per_Pa"] = s.a;
        e["diffusion_m2_per_s"] = s.eps;
        j["species"].push_back(e);
    }
    j["nodes"] = json::array();
    for (const auto& n : net.nodes) {
        json e;
        e["id"] = n.id;
        e["type"] = n.kind == NodeKind::Slack ? "slack" : "flow";
        j["nodes"].push_back(e);
    }
    j["pipes"] = json::array();
    for (const auto& p : net.pipes) {
        json e;
        e["id"] = p.id;
        e["from"] = net.nodes[p.from].id;
        e["to"] = net.nodes[p.to].id;
        e["diameter_m"] = p.diameter;
        e["length_m"] = p.length;
        e["friction"] = p.friction;
        j["pipes"].push_back(e);
    }
    j["compressors"] = json::array();
    for (const auto& c : net.compressors) {
        json e;
        e["id"] = c.id;
        e["pipe"] = net.pipes[c.pipe].id;
        j["compressors"].push_back(e);
    }
    return j;
}

inline std::string serialize_network(const Network& net) { return network_to_json(net).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// scenario file
// ---------------------------------------------------------------------------

struct Scenario {
    std::string title;
    SimConfig config;
    std::vector<steady_init::PipeInitRow> init_rows;
    std::vector<double> init_composition;
};

/// Load a scenario and attach its boundary schedules, monitoring limits and
/// diffusion overrides to the network.
inline Scenario load_scenario_json(const json& j, Network& net) {
    Scenario sc;
    sc.title = j.value("title", "");
    sc.config.duration = j.at("duration_s").get<double>();
    sc.config.dt = j.value("dt_s", 0.0);
    sc.config.dx_target = j.value("dx_target_m", 1000.0);
    sc.config.monitoring = j.value("monitoring", false);
    sc.config.output_every = j.value("output_every", 0);
    std::string eos = j.value("eos", "ideal");
    if (eos == "ideal")
        sc.config.eos = EosMode::Ideal;
    else if (eos == "linear-z")
        sc.config.eos = EosMode::LinearZ;
    else
        throw Error(ErrorKind::Io, "unknown eos mode '" + eos + "'");

    if (j.contains("diffusion_m2_per_s")) {
        auto species = net.gas.species();
        for (const auto& [name, value] : j.at("diffusion_m2_per_s").items())
            species[net.gas.index_of(name)].eps = value.get<double>();
        net.gas = GasModel(std::move(species), net.gas.temperature(), net.gas.mode());
    }

    if (j.contains("boundary")) {
        for (const auto& [id, b] : j.at("boundary").items()) {
            Node& node = net.nodes[net.node_index(id)];
            if (b.contains("pressure_MPa"))
                node.pressure = parse_schedule(b.at("pressure_MPa"), 1.0e6);
            if (b.contains("pressure_Pa")) node.pressure = parse_schedule(b.at("pressure_Pa"));
            if (b.contains("supply_density_kg_per_m3"))
                node.supply_density = parse_schedule(b.at("supply_density_kg_per_m3"));
            if (b.contains("withdrawal_kg_per_s"))
                node.withdrawal = parse_schedule(b.at("withdrawal_kg_per_s"));
            if (b.contains("injection_kg_per_s"))
                node.injection = parse_schedule(b.at("injection_kg_per_s"));
            if (b.contains("composition"))
                node.composition = parse_composition(b.at("composition"), net.gas);
            if (b.contains("limits")) {
                const auto& lim = b.at("limits");
                if (lim.contains("max_fraction"))
                    for (const auto& [sp, v] : lim.at("max_fraction").items())
                        node.c_max.emplace_back(net.gas.index_of(sp), v.get<double>());
                if (lim.contains("min_pressure_MPa"))
                    node.p_min = lim.at("min_pressure_MPa").get<double>() * 1.0e6;
                if (lim.contains("min_pressure_Pa"))
                    node.p_min = lim.at("min_pressure_Pa").get<double>();
            }
        }
    }
    if (j.contains("compressor_schedules")) {
        for (const auto& [id, s] : j.at("compressor_schedules").items()) {
            bool found = false;
            for (auto& c : net.compressors)
                if (c.id == id) {
                    c.ratio = parse_schedule(s);
                    found = true;
                }
            if (!found) throw Error(ErrorKind::Io, "schedule for unknown compressor '" + id + "'");
        }
    }

    const auto& init = j.at("initial");
    sc.init_composition.assign(net.gas.size(), 0.0);
    double rest = 1.0;
    std::size_t last = 0;
    for (const auto& [name, v] : init.at("composition").items()) {
        std::size_t idx = net.gas.index_of(name);
        sc.init_composition[idx] = v.get<double>();
        rest -= v.get<double>();
        last = idx;
    }
    if (std::abs(rest) > 1.0e-9)
        throw Error(ErrorKind::Io, "initial composition must sum to one");
    sc.init_composition[last] += rest;  // absorb rounding
    for (const auto& r : init.at("pipes")) {
        steady_init::PipeInitRow row;
        row.pipe = r.at("pipe").get<std::string>();
        row.p_in = r.contains("pressure_in_MPa") ? r.at("pressure_in_MPa").get<double>() * 1.0e6
                                                 : r.at("pressure_in_Pa").get<double>();
        row.p_out = r.contains("pressure_out_MPa")
                        ? r.at("pressure_out_MPa").get<double>() * 1.0e6
                        : r.at("pressure_out_Pa").get<double>();
        row.flow = r.at("flow_kg_per_s").get<double>();
        sc.init_rows.push_back(std::move(row));
    }
    return sc;
}

inline Scenario load_scenario(const std::string& path, Network& net) {
    json j;
    try {
        j = json::parse(slurp(path));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "scenario file parse error: " + std::string(e.what()), path);
    }
    try {
        return load_scenario_json(j, net);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "scenario file schema error: " + std::string(e.what()), path);
    }
}

// ---------------------------------------------------------------------------
// CSV + manifest output
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_csv(const std::string& path, const Table& t) {
    std::ostringstream os;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << t.columns[c];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << format_double(row[c]);
        os << "\n";
    }
    spit(path, os.str());
}

/// Minimal CSV reader for the plotting front end (numeric tables with one
/// header row, as written by write_csv).
inline Table read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
    Table t;
    t.name = std::filesystem::path(path).stem().string();
    std::string line;
    if (!std::getline(in, line)) return t;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) t.columns.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::stod(cell));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table mass_table(const MassHistory& h, std::span<const std::string> species_names) {
    Table t;
    t.name = "mass_balance";
    t.columns = {"time_s"};
    for (const auto& n : species_names) t.columns.push_back("linepack_" + n + "_kg");
    for (const auto& n : species_names) t.columns.push_back("net_inflow_" + n + "_kg");
    for (const auto& n : species_names) t.columns.push_back("residual_" + n + "_kg");
    t.columns.push_back("residual_rel");
    auto res = mass_balance_residual(h);
    for (std::size_t s = 0; s < h.t.size(); ++s) {
        std::vector<double> row{h.t[s]};
        double lp_total = 0.0;
        for (double v : h.linepack[s]) {
            row.push_back(v);
            lp_total += v;
        }
        for (double v : h.net_inflow[s]) row.push_back(v);
        double worst = 0.0;
        for (double v : res[s]) {
            row.push_back(v);
            worst = std::max(worst, std::abs(v));
        }
        row.push_back(lp_total > 0.0 ? worst / lp_total : 0.0);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_events_csv(const std::string& path,
                             const std::vector<monitoring::PolicyEvent>& events) {
    std::ostringstream os;
    os << "time_s,node,policy,planned_kg_per_s,applied_kg_per_s,limit\n";
    for (const auto& e : events)
        os << format_double(e.time) << "," << e.node << "," << monitoring::to_string(e.policy)
           << "," << format_double(e.planned) << "," << format_double(e.applied) << ","
           << format_double(e.limit) << "\n";
    spit(path, os.str());
}

inline std::size_t output_every_of(const RunResult& result, const SimConfig& cfg) {
    if (cfg.output_every) return cfg.output_every;
    return result.steps > 0 && result.mass.t.size() > 1
               ? std::max<std::size_t>(1, result.steps / (result.mass.t.size() - 1))
               : 1;
}

/// Write a full artifact directory: per-entity CSVs, mass balance, policy
/// events and the manifest (raw input echo + resolved configuration), enough
/// to reproduce the run bit-identically.
inline void write_run(const std::string& dir, const RunResult& result, const Network& net,
                      const GridPlan& plan, const SimConfig& cfg, const json& manifest_extra) {
    std::filesystem::create_directories(dir);
    auto p = [&dir](const std::string& f) { return dir + "/" + f; };
    for (const auto& t : result.node_series) write_csv(p(t.name + ".csv"), t);
    for (const auto& t : result.pipe_series) write_csv(p(t.name + ".csv"), t);
    std::vector<std::string> names;
    for (const auto& s : net.gas.species()) names.push_back(s.name);
    write_csv(p("mass_balance.csv"), mass_table(result.mass, names));
    write_events_csv(p("policy_events.csv"), result.events);

    json m = manifest_extra;
    m["format_version"] = 1;
    m["resolved_config"] = {{"duration_s", cfg.duration},
                            {"dt_s", plan.dt},
                            {"dt_bound_s", plan.dt_bound},
                            {"dx_target_m", cfg.dx_target},
                            {"eos", to_string(cfg.eos)},
                            {"monitoring", cfg.monitoring},
                            {"permissive_reversals", cfg.permissive_reversals},
                            {"output_every", output_every_of(result, cfg)},
                            {"cfl_safety", cfg.cfl_safety},
                            {"wave_speed_bound_m_per_s", plan.wave_bound},
                            {"steps", result.steps}};
    m["grid"] = json::array();
    for (std::size_t k = 0; k < net.pipes.size(); ++k)
        m["grid"].push_back(
            {{"pipe", net.pipes[k].id}, {"cells", plan.cells[k]}, {"dx_m", plan.dx[k]}});
    m["network_canonical"] = network_to_json(net);
    spit(p("manifest.json"), m.dump(2) + "\n");
}

}  // namespace gasnet::io
