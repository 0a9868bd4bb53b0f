// gasnet command-line front end: validate input files, run transient
// simulations, check steady initial states, run grid-refinement studies and
// render plot files from run artifacts.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "gasnet/gasnet.hpp"
#include "gasnet/io.hpp"
#include "gasnet/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct CommonOpts {
    std::string network_path;
    std::string scenario_path;
    std::string out_dir = "out";
    double dt = -1.0;
    double dx = -1.0;
    std::string eos;
    std::string monitor;
    std::size_t output_every = 0;
    bool permissive = false;
    bool unsafe_dt = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_scenario) {
    cmd->add_option("--network", o.network_path, "network file (JSON)")->required();
    auto* s = cmd->add_option("--scenario", o.scenario_path, "scenario file (JSON)");
    if (needs_scenario) s->required();
    cmd->add_option("--dt", o.dt, "time step override (s)");
    cmd->add_option("--dx", o.dx, "target cell size override (m)");
    cmd->add_option("--eos", o.eos, "equation of state mode")
        ->check(CLI::IsMember({"ideal", "linear-z"}));
    cmd->add_option("--monitor", o.monitor, "monitoring policies")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--output-every", o.output_every, "record every k-th step");
    cmd->add_flag("--permissive-reversals", o.permissive,
                  "downgrade flow-reversal errors to warnings");
    cmd->add_flag("--unsafe-dt", o.unsafe_dt, "accept a dt override beyond the stability bound");
}

struct LoadedCase {
    gasnet::Network net;
    gasnet::io::Scenario scenario;
    std::string network_raw;
    std::string scenario_raw;
};

LoadedCase load_case(const CommonOpts& o) {
    LoadedCase lc;
    lc.network_raw = gasnet::io::slurp(o.network_path);
    lc.net = gasnet::io::load_network(o.network_path);
    lc.scenario_raw = gasnet::io::slurp(o.scenario_path);
    lc.scenario = gasnet::io::load_scenario(o.scenario_path, lc.net);
    auto& cfg = lc.scenario.config;
    if (o.dt >= 0.0) cfg.dt = o.dt;
    if (o.dx > 0.0) cfg.dx_target = o.dx;
    if (!o.eos.empty())
        cfg.eos = o.eos == "ideal" ? gasnet::EosMode::Ideal : gasnet::EosMode::LinearZ;
    if (!o.monitor.empty()) cfg.monitoring = o.monitor == "on";
    if (o.output_every) cfg.output_every = o.output_every;
    cfg.permissive_reversals = o.permissive;
    cfg.unsafe_dt = o.unsafe_dt;
    return lc;
}

int report_error(const gasnet::Error& e) {
    nlohmann::json err{{"error", e.what()}, {"kind", gasnet::to_string(e.kind())}};
    std::cerr << err.dump(2) << "\n";
    return e.kind() == gasnet::ErrorKind::Validation || e.kind() == gasnet::ErrorKind::Io ||
                   e.kind() == gasnet::ErrorKind::Argument
               ? kExitValidation
               : kExitRuntime;
}

int cmd_validate(const CommonOpts& o) {
    gasnet::Network net = gasnet::io::load_network(o.network_path);
    if (!o.scenario_path.empty()) gasnet::io::load_scenario(o.scenario_path, net);
    auto rep = gasnet::validate(net);
    if (rep.ok()) {
        std::cout << "valid: " << net.nodes.size() << " nodes, " << net.pipes.size()
                  << " pipes, " << net.compressors.size() << " compressors\n";
        return kExitOk;
    }
    nlohmann::json out{{"violations", rep.violations}};
    std::cerr << out.dump(2) << "\n";
    return kExitValidation;
}

int cmd_simulate(const CommonOpts& o, const std::string& command_line) {
    LoadedCase lc = load_case(o);
    gasnet::Engine eng(lc.net, lc.scenario.config, lc.scenario.init_rows,
                       lc.scenario.init_composition);
    gasnet::RunResult result = eng.run();
    nlohmann::json manifest{{"command", command_line},
                            {"gasnet_version", gasnet::kVersion},
                            {"network_file", o.network_path},
                            {"scenario_file", o.scenario_path},
                            {"network_raw", lc.network_raw},
                            {"scenario_raw", lc.scenario_raw}};
    gasnet::io::write_run(o.out_dir, result, eng.network(), eng.plan(), eng.config(), manifest);
    std::cout << "simulated " << result.steps << " steps (dt = " << eng.plan().dt
              << " s) -> " << o.out_dir << "\n";
    if (result.reversal_warnings)
        std::cout << "warning: " << result.reversal_warnings
                  << " flow-reversal events at junction-adjacent edges\n";
    if (!result.events.empty())
        std::cout << result.events.size() << " policy events logged\n";
    return kExitOk;
}

int cmd_steady_check(const CommonOpts& o, std::size_t steps) {
    LoadedCase lc = load_case(o);
    gasnet::Engine eng(lc.net, lc.scenario.config, lc.scenario.init_rows,
                       lc.scenario.init_composition);
    auto compat = gasnet::steady_init::check_compatibility(eng.state(), eng.network(), eng.plan(),
                                                           eng.config().eos);
    for (const auto& v : compat.violations) std::cout << "compatibility: " << v << "\n";
    double drift = eng.steady_hold_drift(steps);
    std::cout << "max relative drift over " << steps << " steps: " << drift << "\n";
    if (!compat.ok() || drift > 1.0e-6) return kExitRuntime;
    return kExitOk;
}

int cmd_converge(const CommonOpts& o, int levels, int ref_extra) {
    LoadedCase lc = load_case(o);
    auto res = gasnet::convergence_study(lc.net, lc.scenario.config, lc.scenario.init_rows,
                                         lc.scenario.init_composition, levels, ref_extra);
    if (!res.sufficient) {
        std::cout << "insufficient refinement levels for an order estimate (need >= 2)\n";
        return kExitOk;
    }
    std::printf("%-12s", "dx (m)");
    for (const auto& f : res.fields) std::printf(" %14s", f.c_str());
    std::printf(" %14s\n", "total");
    for (std::size_t l = 0; l < res.dx.size(); ++l) {
        std::printf("%-12g", res.dx[l]);
        for (double e : res.field_errors[l]) std::printf(" %14.6e", e);
        std::printf(" %14.6e\n", res.total_error[l]);
    }
    std::printf("observed orders (log2 of successive error ratios):");
    for (double o2 : res.orders) std::printf(" %.3f", o2);
    std::printf("\n");
    return kExitOk;
}

// chart bundles mirroring the usual way these runs are inspected
int cmd_plot(const std::string& run_dir) {
    namespace fs = std::filesystem;
    using gasnet::svg::Panel;
    if (!fs::exists(run_dir)) {
        std::cerr << "no such run directory: " << run_dir << "\n";
        return kExitValidation;
    }
    std::vector<gasnet::Table> nodes, pipes;
    gasnet::Table mass;
    for (const auto& e : fs::directory_iterator(run_dir)) {
        auto name = e.path().filename().string();
        if (e.path().extension() != ".csv") continue;
        if (name.rfind("node_", 0) == 0) nodes.push_back(gasnet::io::read_csv(e.path().string()));
        if (name.rfind("pipe_", 0) == 0) pipes.push_back(gasnet::io::read_csv(e.path().string()));
        if (name == "mass_balance.csv") mass = gasnet::io::read_csv(e.path().string());
    }
    std::sort(nodes.begin(), nodes.end(), [](auto& a, auto& b) { return a.name < b.name; });
    std::sort(pipes.begin(), pipes.end(), [](auto& a, auto& b) { return a.name < b.name; });
    if (nodes.empty() && pipes.empty()) {
        std::cout << "warning: no series found in " << run_dir << ", nothing to plot\n";
        return kExitOk;
    }
    int written = 0;
    auto out = [&run_dir](const std::string& f) { return run_dir + "/" + f; };

    std::vector<Panel> node_panels;
    for (const auto& t : nodes) {
        Panel p;
        p.title = t.name + " pressure";
        p.y_label = "pressure (Pa)";
        p.series.push_back(gasnet::svg::table_series(t, "time_s", "pressure_Pa", t.name));
        node_panels.push_back(std::move(p));
    }
    if (!node_panels.empty()) {
        gasnet::svg::write_chart(out("fig_node_pressures.svg"), node_panels);
        ++written;
    }

    std::vector<Panel> frac_panels;
    for (const auto& t : nodes) {
        Panel p;
        p.title = t.name + " composition";
        p.y_label = "mass fraction";
        for (const auto& col : t.columns)
            if (col.rfind("frac_", 0) == 0)
                p.series.push_back(gasnet::svg::table_series(t, "time_s", col, col.substr(5)));
        if (!p.series.empty()) frac_panels.push_back(std::move(p));
    }
    if (!frac_panels.empty()) {
        gasnet::svg::write_chart(out("fig_node_fractions.svg"), frac_panels);
        ++written;
    }

    std::vector<Panel> flow_panels;
    for (const auto& t : nodes) {
        Panel p;
        p.title = t.name + " boundary flow";
        p.y_label = "mass flow (kg/s)";
        p.series.push_back(gasnet::svg::table_series(t, "time_s", "inflow_kg_per_s", "inflow"));
        p.series.push_back(
            gasnet::svg::table_series(t, "time_s", "withdrawal_kg_per_s", "withdrawal"));
        flow_panels.push_back(std::move(p));
    }
    if (!flow_panels.empty()) {
        gasnet::svg::write_chart(out("fig_node_flows.svg"), flow_panels);
        ++written;
    }

    std::vector<Panel> pipe_panels;
    for (const auto& t : pipes) {
        Panel p;
        p.title = t.name + " endpoint flux";
        p.y_label = "flux (kg/m^2/s)";
        p.series.push_back(gasnet::svg::table_series(t, "time_s", "phi_in_kg_per_m2_s", "inlet"));
        p.series.push_back(
            gasnet::svg::table_series(t, "time_s", "phi_out_kg_per_m2_s", "outlet"));
        pipe_panels.push_back(std::move(p));
        Panel d;
        d.title = t.name + " endpoint densities";
        d.y_label = "partial density (kg/m^3)";
        for (const auto& col : t.columns)
            if (col.rfind("d_", 0) == 0)
                d.series.push_back(gasnet::svg::table_series(t, "time_s", col, col.substr(2)));
        pipe_panels.push_back(std::move(d));
    }
    if (!pipe_panels.empty()) {
        gasnet::svg::write_chart(out("fig_pipe_endpoints.svg"), pipe_panels, 2);
        ++written;
    }

    if (!mass.columns.empty()) {
        std::vector<Panel> mp;
        Panel p;
        p.title = "mass-balance residual";
        p.y_label = "residual (kg)";
        for (const auto& col : mass.columns)
            if (col.rfind("residual_", 0) == 0 && col != "residual_rel")
                p.series.push_back(gasnet::svg::table_series(mass, "time_s", col, col));
        mp.push_back(std::move(p));
        Panel lp;
        lp.title = "linepack";
        lp.y_label = "stored mass (kg)";
        for (const auto& col : mass.columns)
            if (col.rfind("linepack_", 0) == 0)
                lp.series.push_back(gasnet::svg::table_series(mass, "time_s", col, col));
        mp.push_back(std::move(lp));
        gasnet::svg::write_chart(out("fig_mass_balance.svg"), mp, 2);
        ++written;
    } else {
        std::cout << "warning: mass_balance.csv missing, residual chart skipped\n";
    }
    std::cout << "wrote " << written << " chart files to " << run_dir << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transient gas-mixture pipeline network simulator"};
    app.require_subcommand(1);

    CommonOpts sim_o, val_o, steady_o, conv_o;
    std::string plot_dir;
    std::size_t steady_steps = 1000;
    int levels = 3, ref_extra = 2;

    auto* sim = app.add_subcommand("simulate", "run a transient simulation");
    add_common(sim, sim_o, true);
    sim->add_option("--out", sim_o.out_dir, "artifact directory");

    auto* val = app.add_subcommand("validate", "check network/scenario files");
    add_common(val, val_o, false);

    auto* steady = app.add_subcommand("steady-check",
                                      "initialize steady state and test the frozen-schedule hold");
    add_common(steady, steady_o, true);
    steady->add_option("--steps", steady_steps, "number of frozen steps");

    auto* conv = app.add_subcommand("converge", "grid-refinement convergence study");
    add_common(conv, conv_o, true);
    conv->add_option("--levels", levels, "measured refinement levels");
    conv->add_option("--ref-extra", ref_extra, "extra refinements for the reference grid");

    auto* plot = app.add_subcommand("plot", "render SVG charts from a run directory");
    plot->add_option("--run", plot_dir, "run artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    std::string command_line;
    for (int i = 0; i < argc; ++i) command_line += std::string(i ? " " : "") + argv[i];

    try {
        if (sim->parsed()) return cmd_simulate(sim_o, command_line);
        if (val->parsed()) return cmd_validate(val_o);
        if (steady->parsed()) return cmd_steady_check(steady_o, steady_steps);
        if (conv->parsed()) return cmd_converge(conv_o, levels, ref_extra);
        if (plot->parsed()) return cmd_plot(plot_dir);
    } catch (const gasnet::Error& e) {
        return report_error(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
