#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "gasnet/config.hpp"
#include "gasnet/eos.hpp"
#include "gasnet/error.hpp"
#include "gasnet/grid.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/monitoring.hpp"
#include "gasnet/network.hpp"
#include "gasnet/pipe_solver.hpp"
#include "gasnet/state.hpp"
#include "gasnet/steady_init.hpp"

namespace gasnet {

/// Column-oriented time series destined for one CSV file.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Recorded linepack and accumulated boundary inflow per species, the raw
/// material of the mass-conservation audit.
struct MassHistory {
    std::vector<double> t;
    std::vector<std::vector<double>> linepack;    // [sample][species], kg
    std::vector<std::vector<double>> net_inflow;  // [sample][species], kg since t0
};

/// Mass-balance residual per sample and species:
///   residual(t) = (linepack(t) - linepack(0)) - net_inflow(t)
/// A conservative scheme keeps this at accumulated rounding.
inline std::vector<std::vector<double>> mass_balance_residual(const MassHistory& h) {
    std::vector<std::vector<double>> res(h.t.size());
    if (h.t.empty()) return res;
    for (std::size_t s = 0; s < h.t.size(); ++s) {
        res[s].resize(h.linepack[s].size());
        for (std::size_t a = 0; a < h.linepack[s].size(); ++a)
            res[s][a] = (h.linepack[s][a] - h.linepack[0][a]) - h.net_inflow[s][a];
    }
    return res;
}

struct RunResult {
    std::vector<Table> node_series;
    std::vector<Table> pipe_series;
    MassHistory mass;
    std::vector<monitoring::PolicyEvent> events;
    std::size_t steps = 0;
    std::size_t reversal_warnings = 0;
};

class Engine {
  public:
    Engine(Network net, SimConfig cfg, std::vector<steady_init::PipeInitRow> init_rows,
           std::vector<double> init_composition)
        : net_(std::move(net)), cfg_(cfg) {
        auto rep = gasnet::validate(net_);
        if (!rep.ok()) {
            std::string msg = "network validation failed:";
            for (const auto& v : rep.violations) msg += "\n  - " + v;
            throw Error(ErrorKind::Validation, msg);
        }
        plan_ = plan_grids(net_, cfg_);
        state_ = steady_init::init_network_steady(net_, plan_, init_rows, init_composition,
                                                  cfg_.eos);
        const std::size_t ns = net_.gas.size();
        eps_.resize(ns);
        for (std::size_t a = 0; a < ns; ++a) eps_[a] = net_.gas[a].eps;
        use_diffusion_ = std::any_of(eps_.begin(), eps_.end(), [](double e) { return e > 0.0; });
        adj_.resize(net_.nodes.size());
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) adj_[q] = net_.adjacent(q);
        near_d_.resize(net_.nodes.size());
        for (std::size_t q = 0; q < net_.nodes.size(); ++q)
            near_d_[q].assign(adj_[q].size(), std::vector<double>(ns, 0.0));
        flux_buf_.resize(net_.pipes.size());
        for (std::size_t k = 0; k < net_.pipes.size(); ++k)
            flux_buf_[k].assign(ns, std::vector<double>(state_.pipes[k].edges(), 0.0));
        inflow_integral_.assign(ns, 0.0);
        Fs_.assign(net_.nodes.size(), 0.0);
        Fd_.assign(net_.nodes.size(), 0.0);
        cs_.assign(net_.nodes.size(), std::vector<double>(ns, 0.0));
        p_node_.assign(net_.nodes.size(), 0.0);
        mu_.assign(net_.pipes.size(), 1.0);
        clamp_active_.assign(net_.nodes.size(), false);
        node_inflow_.assign(net_.nodes.size(), 0.0);
        node_outflow_.assign(net_.nodes.size(), 0.0);
    }

    const Network& network() const { return net_; }
    const GridPlan& plan() const { return plan_; }
    const NetworkState& state() const { return state_; }
    NetworkState& mutable_state() { return state_; }
    double time() const { return state_.time; }
    const SimConfig& config() const { return cfg_; }
    std::span<const double> accumulated_inflow() const { return inflow_integral_; }
    const std::vector<monitoring::PolicyEvent>& events() const { return events_; }
    std::size_t reversal_warnings() const { return reversal_warnings_; }

    /// Evaluate schedules at a fixed time instead of the running clock
    /// (steady-hold checks).
    void freeze_schedules(bool on) { frozen_ = on; }

    /// Linepack per species: sum over pipes of S dx sum_i d_a, in kg.
    std::vector<double> linepack() const {
        std::vector<double> lp(net_.gas.size(), 0.0);
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            double w = net_.pipes[k].area() * state_.pipes[k].dx;
            for (std::size_t a = 0; a < net_.gas.size(); ++a) {
                double s = 0.0;
                for (double v : state_.pipes[k].d[a]) s += v;
                lp[a] += w * s;
            }
        }
        return lp;
    }

    /// One staggered step: fluxes advance to the next half level, densities
    /// to the next integer level.
    void step() {
        const double dt = plan_.dt;
        const double tn = eval_time(state_.time);
        const double tm = eval_time(state_.time + 0.5 * dt);
        const std::size_t ns = net_.gas.size();
        const EosMode mode = cfg_.eos;

        // (1) schedules
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            mu_[k] = 1.0;
            if (net_.pipes[k].compressor) {
                mu_[k] = net_.compressors[*net_.pipes[k].compressor].ratio(tn);
                if (mu_[k] < 1.0)
                    throw Error(ErrorKind::Validation, "compression ratio below one",
                                context(net_.pipes[k].id));
            }
        }
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            const Node& n = net_.nodes[q];
            if (n.composition)
                cs_[q] = n.composition->evaluate(tm, ns);
            else
                cs_[q] = state_.nodes[q].c;
            if (n.kind == NodeKind::Slack) {
                Fs_[q] = Fd_[q] = 0.0;
                if (n.pressure) {
                    p_node_[q] = (*n.pressure)(tn);
                } else {
                    auto c_now = n.composition ? n.composition->evaluate(tn, ns)
                                               : state_.nodes[q].c;
                    std::vector<double> d(ns);
                    double total = (*n.supply_density)(tn);
                    for (std::size_t a = 0; a < ns; ++a) d[a] = total * c_now[a];
                    p_node_[q] = pressure(d, net_.gas, mode);
                }
            } else {
                Fd_[q] = n.withdrawal ? std::max(0.0, (*n.withdrawal)(tm)) : 0.0;
                Fs_[q] = n.injection ? std::max(0.0, (*n.injection)(tm)) : 0.0;
            }
        }

        // (2) node-local pipe-end views at the previous levels
        build_ends(mode);

        // (3) monitoring clamps ahead of the nodal solve
        if (cfg_.monitoring) apply_policies(state_.time + 0.5 * dt, dt);

        // (4) nodal pressures (slack uses the schedule verbatim)
        for (std::size_t q = 0; q < net_.nodes.size(); ++q)
            if (net_.nodes[q].kind != NodeKind::Slack)
                p_node_[q] = junction::nodal_pressure(ends_[q], Fs_[q], Fd_[q], dt);

        // (5) boundary fluxes, then interior fluxes (quadratic solve)
        std::vector<std::pair<double, double>> prev_boundary(net_.pipes.size());
        for (std::size_t k = 0; k < net_.pipes.size(); ++k)
            prev_boundary[k] = {state_.pipes[k].phi.front(), state_.pipes[k].phi.back()};

        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            const bool slack = net_.nodes[q].kind == NodeKind::Slack;
            for (std::size_t i = 0; i < adj_[q].size(); ++i) {
                junction::PipeEnd e = ends_[q][i];
                double p_eff = p_node_[q];
                if (slack) {
                    // realize the scheduled pressure at the node position to
                    // second order: ghost value 2 mu p - p_near over a full dx
                    p_eff = 2.0 * e.mu * p_node_[q] - e.p_near;
                    e.mu = 1.0;
                }
                double phi_local = junction::boundary_flux(e, p_eff, dt);
                auto& ps = state_.pipes[adj_[q][i].pipe];
                if (adj_[q][i].at_start)
                    ps.phi.front() = phi_local;
                else
                    ps.phi.back() = -phi_local;
            }
        }
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            const Pipe& p = net_.pipes[k];
            try {
                pipe_solver::update_fluxes(state_.pipes[k], net_.gas, mode, p.friction,
                                           p.diameter, dt);
            } catch (const Error& err) {
                throw Error(err.kind(), err.what(), context(p.id));
            }
        }

        // reversal guard at the junction-adjacent edges
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            auto& ps = state_.pipes[k];
            check_reversal(prev_boundary[k].first, ps.phi.front(), net_.pipes[k].id, "inlet");
            check_reversal(prev_boundary[k].second, ps.phi.back(), net_.pipes[k].id, "outlet");
        }

        // (6) nodal mixing on the new half level
        std::vector<NodeState> mixed(net_.nodes.size());
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            std::vector<junction::MixingEnd> mix(adj_[q].size());
            double net_out = 0.0;
            for (std::size_t i = 0; i < adj_[q].size(); ++i) {
                const auto& a = adj_[q][i];
                const auto& ps = state_.pipes[a.pipe];
                double phi_local = a.at_start ? ps.phi.front() : -ps.phi.back();
                mix[i] = {net_.pipes[a.pipe].area(), phi_local, near_d_[q][i]};
                net_out += mix[i].S * phi_local;
            }
            double F_s = Fs_[q];
            double F_d = Fd_[q];
            if (net_.nodes[q].kind == NodeKind::Slack) {
                F_s = std::max(net_out, 0.0);
                F_d = std::max(-net_out, 0.0);
            }
            mixed[q] = junction::nodal_mixture(mix, F_s, cs_[q], F_d, p_node_[q], net_.gas, mode,
                                               state_.nodes[q].c, cfg_.flow_floor);
            node_inflow_[q] = F_s;
            node_outflow_[q] = F_d;
            for (std::size_t a = 0; a < ns; ++a)
                inflow_integral_[a] += dt * (F_s * cs_[q][a] - F_d * mixed[q].c[a]);
        }
        state_.nodes = std::move(mixed);

        // (7) conservative species sweep over every cell, boundary edges
        // upwinding against the freshly mixed nodal state
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            auto& ps = state_.pipes[k];
            const auto& nd_from = state_.nodes[net_.pipes[k].from].d;
            const auto& nd_to = state_.nodes[net_.pipes[k].to].d;
            auto& f = flux_buf_[k];
            const std::size_t n = ps.cells();
            std::vector<double> left(ns), right(ns);
            for (std::size_t j = 0; j <= n; ++j) {
                std::span<const double> dl, dr;
                if (j == 0) {
                    dl = nd_from;
                } else {
                    for (std::size_t a = 0; a < ns; ++a) left[a] = ps.d[a][j - 1];
                    dl = left;
                }
                if (j == n) {
                    dr = nd_to;
                } else {
                    for (std::size_t a = 0; a < ns; ++a) right[a] = ps.d[a][j];
                    dr = right;
                }
                for (std::size_t a = 0; a < ns; ++a)
                    f[a][j] = pipe_solver::upwind_species_flux(ps.phi[j], dl, dr, a);
            }
            try {
                pipe_solver::update_densities(ps, f, dt,
                                              use_diffusion_ ? std::span<const double>(eps_)
                                                             : std::span<const double>());
            } catch (const Error& err) {
                throw Error(err.kind(), err.what(), context(net_.pipes[k].id));
            }
        }

        state_.time += dt;
        ++step_index_;
    }

    /// Run for the configured duration, recording every `output_every` steps.
    RunResult run() {
        if (!(cfg_.duration > 0.0))
            throw Error(ErrorKind::Argument, "run requires a positive duration");
        auto steps = static_cast<std::size_t>(std::llround(cfg_.duration / plan_.dt));
        if (steps * plan_.dt < cfg_.duration - 1.0e-9 * cfg_.duration) ++steps;
        steps = std::max<std::size_t>(steps, 1);
        std::size_t every = cfg_.output_every;
        if (every == 0) every = std::max<std::size_t>(1, steps / 1440);
        output_every_ = every;

        RunResult out;
        init_tables(out);
        record(out);
        for (std::size_t s = 1; s <= steps; ++s) {
            step();
            if (s % every == 0 || s == steps) record(out);
        }
        out.steps = steps;
        out.events = events_;
        out.reversal_warnings = reversal_warnings_;
        return out;
    }

    /// Advance with schedules frozen at t = 0 and report the largest relative
    /// drift over any state variable.
    double steady_hold_drift(std::size_t steps) {
        NetworkState ref = state_;
        freeze_schedules(true);
        for (std::size_t s = 0; s < steps; ++s) step();
        freeze_schedules(false);
        double drift = 0.0;
        auto rel = [](double now, double then) {
            double scale = std::max(std::abs(then), 1.0e-300);
            return std::abs(now - then) / scale;
        };
        for (std::size_t k = 0; k < ref.pipes.size(); ++k) {
            for (std::size_t a = 0; a < ref.pipes[k].d.size(); ++a)
                for (std::size_t i = 0; i < ref.pipes[k].d[a].size(); ++i)
                    drift = std::max(drift, rel(state_.pipes[k].d[a][i], ref.pipes[k].d[a][i]));
            for (std::size_t j = 0; j < ref.pipes[k].phi.size(); ++j)
                drift = std::max(drift, rel(state_.pipes[k].phi[j], ref.pipes[k].phi[j]));
        }
        for (std::size_t q = 0; q < ref.nodes.size(); ++q)
            drift = std::max(drift, rel(state_.nodes[q].p, ref.nodes[q].p));
        return drift;
    }

  private:
    double eval_time(double t) const { return frozen_ ? 0.0 : t; }

    std::string context(const std::string& entity) const {
        return entity + ", t = " + std::to_string(state_.time) + " s";
    }

    void build_ends(EosMode mode) {
        ends_.assign(net_.nodes.size(), {});
        const std::size_t ns = net_.gas.size();
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            ends_[q].resize(adj_[q].size());
            for (std::size_t i = 0; i < adj_[q].size(); ++i) {
                const auto& a = adj_[q][i];
                const Pipe& pipe = net_.pipes[a.pipe];
                const PipeState& ps = state_.pipes[a.pipe];
                std::size_t cell = a.at_start ? 0 : ps.cells() - 1;
                auto& nd = near_d_[q][i];
                for (std::size_t sp = 0; sp < ns; ++sp) nd[sp] = ps.d[sp][cell];
                junction::PipeEnd& e = ends_[q][i];
                e.S = pipe.area();
                e.diameter = pipe.diameter;
                e.lambda = pipe.friction;
                e.dx = plan_.dx[a.pipe];
                e.mu = a.at_start && pipe.compressor ? mu_[a.pipe] : 1.0;
                e.phi_prev = a.at_start ? ps.phi.front() : -ps.phi.back();
                e.d_near = nd;
                e.p_near = pressure(nd, net_.gas, mode);
            }
        }
    }

    void apply_policies(double tm, double dt) {
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            const Node& n = net_.nodes[q];
            if (n.kind != NodeKind::Flow) continue;
            bool clamped_now = false;
            if (!n.c_max.empty() && Fs_[q] > 0.0 && Fd_[q] == 0.0) {
                double f_max = std::numeric_limits<double>::infinity();
                double active_limit = 0.0;
                for (const auto& [alpha, limit] : n.c_max) {
                    double f;
                    try {
                        f = monitoring::max_injection(ends_[q], alpha, limit, cs_[q], dt);
                    } catch (const Error&) {
                        f = 0.0;  // degenerate denominator: fall back to no injection
                    }
                    if (f < f_max) {
                        f_max = f;
                        active_limit = limit;
                    }
                }
                auto dec = monitoring::clamp_flow(Fs_[q], f_max);
                if (dec.clamped) {
                    log_event(tm, q, monitoring::PolicyKind::MaxConcentration, Fs_[q],
                              dec.applied, active_limit);
                    Fs_[q] = dec.applied;
                    clamped_now = true;
                }
            }
            if (n.p_min && Fd_[q] > 0.0 && Fs_[q] == 0.0) {
                double f_max = monitoring::max_withdrawal(ends_[q], *n.p_min, dt);
                auto dec = monitoring::clamp_flow(Fd_[q], f_max);
                if (dec.clamped) {
                    log_event(tm, q, monitoring::PolicyKind::MinPressure, Fd_[q], dec.applied,
                              *n.p_min);
                    Fd_[q] = dec.applied;
                    clamped_now = true;
                }
            }
            clamp_active_[q] = clamped_now;
        }
    }

    void log_event(double tm, std::size_t q, monitoring::PolicyKind kind, double planned,
                   double applied, double limit) {
        // thin the stream: transitions always, sustained clamping at the
        // output cadence
        bool output_step = output_every_ == 0 || step_index_ % output_every_ == 0;
        if (!clamp_active_[q] || output_step)
            events_.push_back({tm, net_.nodes[q].id, kind, planned, applied, limit});
    }

    void check_reversal(double prev, double now, const std::string& pipe, const char* end) {
        if (prev * now < 0.0 && std::abs(prev) > 1.0e-12 && std::abs(now) > 1.0e-12) {
            if (cfg_.permissive_reversals) {
                ++reversal_warnings_;
                return;
            }
            throw Error(ErrorKind::Physics,
                        std::string("flow reversal at junction-adjacent edge (") + end +
                            "); the nodal mixing assumes fixed flow direction",
                        context(pipe));
        }
    }

    void init_tables(RunResult& out) {
        const std::size_t ns = net_.gas.size();
        for (const Node& n : net_.nodes) {
            Table t;
            t.name = "node_" + n.id;
            t.columns = {"time_s", "pressure_Pa"};
            for (std::size_t a = 0; a < ns; ++a) t.columns.push_back("frac_" + net_.gas[a].name);
            t.columns.push_back("inflow_kg_per_s");
            t.columns.push_back("withdrawal_kg_per_s");
            out.node_series.push_back(std::move(t));
        }
        for (const Pipe& p : net_.pipes) {
            Table t;
            t.name = "pipe_" + p.id;
            t.columns = {"time_s", "phi_in_kg_per_m2_s", "phi_out_kg_per_m2_s",
                         "flow_in_kg_per_s", "flow_out_kg_per_s"};
            for (std::size_t a = 0; a < ns; ++a)
                t.columns.push_back("d_" + net_.gas[a].name + "_in_kg_per_m3");
            for (std::size_t a = 0; a < ns; ++a)
                t.columns.push_back("d_" + net_.gas[a].name + "_out_kg_per_m3");
            out.pipe_series.push_back(std::move(t));
        }
    }

    void record(RunResult& out) {
        const std::size_t ns = net_.gas.size();
        for (std::size_t q = 0; q < net_.nodes.size(); ++q) {
            std::vector<double> row{state_.time, state_.nodes[q].p};
            for (std::size_t a = 0; a < ns; ++a) row.push_back(state_.nodes[q].c[a]);
            row.push_back(node_inflow_.empty() ? 0.0 : node_inflow_[q]);
            row.push_back(node_outflow_.empty() ? 0.0 : node_outflow_[q]);
            out.node_series[q].rows.push_back(std::move(row));
        }
        for (std::size_t k = 0; k < net_.pipes.size(); ++k) {
            const auto& ps = state_.pipes[k];
            double S = net_.pipes[k].area();
            std::vector<double> row{state_.time, ps.phi.front(), ps.phi.back(),
                                    S * ps.phi.front(), S * ps.phi.back()};
            for (std::size_t a = 0; a < ns; ++a) row.push_back(ps.d[a].front());
            for (std::size_t a = 0; a < ns; ++a) row.push_back(ps.d[a].back());
            out.pipe_series[k].rows.push_back(std::move(row));
        }
        out.mass.t.push_back(state_.time);
        out.mass.linepack.push_back(linepack());
        out.mass.net_inflow.push_back(
            std::vector<double>(inflow_integral_.begin(), inflow_integral_.end()));
    }

    Network net_;
    SimConfig cfg_;
    GridPlan plan_;
    NetworkState state_;
    std::vector<std::vector<Adjacency>> adj_;
    std::vector<std::vector<junction::PipeEnd>> ends_;
    std::vector<std::vector<std::vector<double>>> near_d_;  // [node][adjacency][species]
    std::vector<std::vector<std::vector<double>>> flux_buf_;
    std::vector<double> eps_;
    bool use_diffusion_ = false;
    bool frozen_ = false;
    std::vector<double> inflow_integral_;
    std::vector<double> Fs_, Fd_, p_node_;
    std::vector<std::vector<double>> cs_;
    std::vector<double> mu_;
    std::vector<double> node_inflow_, node_outflow_;
    std::vector<monitoring::PolicyEvent> events_;
    std::vector<bool> clamp_active_;
    std::size_t step_index_ = 0;
    std::size_t output_every_ = 0;
    std::size_t reversal_warnings_ = 0;
};

/// Self-refinement convergence study: run the same scenario on grids with
/// dx, dt halved together, compare each level against a finer reference in
/// relative L2, and report the observed orders log2(E_l / E_{l+1}).
struct ConvergenceResult {
    std::vector<double> dx;                          // measured levels
    std::vector<std::vector<double>> field_errors;   // [level][field]
    std::vector<std::string> fields;
    std::vector<double> total_error;                 // [level]
    std::vector<double> orders;                      // size levels-1
    bool sufficient = false;
};

inline ConvergenceResult convergence_study(const Network& net, SimConfig cfg,
                                           const std::vector<steady_init::PipeInitRow>& rows,
                                           const std::vector<double>& comp, int levels,
                                           int ref_extra = 2) {
    ConvergenceResult res;
    if (levels < 2) return res;  // insufficient data for an order estimate
    for (const Pipe& p : net.pipes) {
        double n0 = p.length / cfg.dx_target;
        if (std::abs(n0 - std::round(n0)) > 1.0e-9)
            throw Error(ErrorKind::Argument,
                        "convergence study needs dx_target dividing every pipe length");
    }

    const int total_levels = levels + ref_extra;
    std::vector<NetworkState> finals;
    std::vector<double> dts;
    // base time step from the coarsest CFL bound, then exact halving
    SimConfig base = cfg;
    base.dt = 0.0;
    GridPlan plan0 = plan_grids(net, base);
    auto steps0 = static_cast<std::size_t>(std::ceil(cfg.duration / plan0.dt - 1.0e-12));
    for (int l = 0; l < total_levels; ++l) {
        SimConfig c = cfg;
        c.dx_target = cfg.dx_target / static_cast<double>(1 << l);
        std::size_t steps = steps0 << l;
        c.dt = cfg.duration / static_cast<double>(steps);
        c.output_every = steps;  // final state only
        Engine eng(net, c, rows, comp);
        for (std::size_t s = 0; s < steps; ++s) eng.step();
        NetworkState at_T = eng.state();
        // fluxes live on half levels T -+ dt/2, which differ across
        // refinements; average the two flanking levels to sample phi at T
        eng.step();
        for (std::size_t k = 0; k < at_T.pipes.size(); ++k)
            for (std::size_t j = 0; j < at_T.pipes[k].phi.size(); ++j)
                at_T.pipes[k].phi[j] =
                    0.5 * (at_T.pipes[k].phi[j] + eng.state().pipes[k].phi[j]);
        finals.push_back(std::move(at_T));
        dts.push_back(c.dt);
        if (l < levels) res.dx.push_back(c.dx_target);
    }

    const std::size_t ns = net.gas.size();
    for (std::size_t a = 0; a < ns; ++a) res.fields.push_back("d_" + net.gas[a].name);
    res.fields.push_back("phi");

    const NetworkState& ref = finals.back();
    auto restrict_cells = [](const std::vector<double>& fine, std::size_t factor) {
        std::vector<double> out(fine.size() / factor, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < factor; ++r) acc += fine[i * factor + r];
            out[i] = acc / static_cast<double>(factor);
        }
        return out;
    };

    for (int l = 0; l < levels; ++l) {
        std::size_t factor = 1ull << (total_levels - 1 - l);
        std::vector<double> err2(res.fields.size(), 0.0), norm2(res.fields.size(), 0.0);
        for (std::size_t k = 0; k < net.pipes.size(); ++k) {
            const PipeState& coarse = finals[l].pipes[k];
            const PipeState& fine = ref.pipes[k];
            double dx = coarse.dx;
            for (std::size_t a = 0; a < ns; ++a) {
                auto rf = restrict_cells(fine.d[a], factor);
                for (std::size_t i = 0; i < rf.size(); ++i) {
                    double e = coarse.d[a][i] - rf[i];
                    err2[a] += dx * e * e;
                    norm2[a] += dx * rf[i] * rf[i];
                }
            }
            for (std::size_t j = 0; j < coarse.phi.size(); ++j) {
                double e = coarse.phi[j] - fine.phi[j * factor];
                err2[ns] += dx * e * e;
                norm2[ns] += dx * fine.phi[j * factor] * fine.phi[j * factor];
            }
        }
        std::vector<double> rel(res.fields.size(), 0.0);
        double tot = 0.0;
        for (std::size_t f = 0; f < res.fields.size(); ++f) {
            rel[f] = norm2[f] > 0.0 ? std::sqrt(err2[f] / norm2[f]) : 0.0;
            tot += rel[f] * rel[f];
        }
        res.field_errors.push_back(rel);
        res.total_error.push_back(std::sqrt(tot));
    }
    for (int l = 0; l + 1 < levels; ++l)
        res.orders.push_back(std::log2(res.total_error[l] / res.total_error[l + 1]));
    res.sufficient = true;
    return res;
}

}  // namespace gasnet
