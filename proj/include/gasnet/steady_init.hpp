#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gasnet/eos.hpp"
#include "gasnet/error.hpp"
#include "gasnet/grid.hpp"
#include "gasnet/network.hpp"
#include "gasnet/state.hpp"

namespace gasnet::steady_init {

/// Isothermal steady density profile of a single ideal-gas species, sampled
/// at the staggered cell centers x_i = (i + 1/2) dx:
///
///   d(x) = sqrt(d0^2 - (lambda / (R T D)) phi |phi| x)
///
/// Fails with a pressure-collapse error when the radicand is not positive
/// everywhere on [0, L].
inline std::vector<double> steady_pipe_profile(double inlet_density, double flux, double length,
                                               double diameter, double lambda, double RT,
                                               std::size_t cells) {
    double beta = lambda / (RT * diameter) * flux * std::abs(flux);
    if (!(inlet_density * inlet_density - beta * length > 0.0))
        throw Error(ErrorKind::Physics,
                    "pressure collapse: steady profile radicand non-positive at pipe outlet");
    std::vector<double> d(cells);
    double dx = length / static_cast<double>(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        double x = (static_cast<double>(i) + 0.5) * dx;
        d[i] = std::sqrt(inlet_density * inlet_density - beta * x);
    }
    return d;
}

/// Per-pipe row of the scenario's initial-state table (SI units).
struct PipeInitRow {
    std::string pipe;
    double p_in = 0.0;   // Pa, discharge side of any start compressor
    double p_out = 0.0;  // Pa
    double flow = 0.0;   // kg/s
};

struct InitOptions {
    // covers table rounding plus small boundary-flow step changes at t = 0
    // (the polish then folds those flows into the compatible steady state)
    double consistency_tol = 0.02;
    double newton_tol = 1.0e-13;  // scaled residual tolerance of the polish
    int max_iterations = 60;
};

namespace detail {

// mixture pressure at fixed composition: p(dtot) with RTC = sum c_a R_a T and
// RTAC = sum c_a R_a T a_a (RTAC unused in ideal mode)
struct CompositionEos {
    double RTC = 0.0;
    double RTAC = 0.0;
    bool linear_z = false;

    CompositionEos(const GasModel& gas, std::span<const double> c, EosMode mode) {
        for (std::size_t a = 0; a < gas.size(); ++a) {
            RTC += c[a] * gas.RT()[a];
            RTAC += c[a] * gas.RTa()[a];
        }
        linear_z = mode == EosMode::LinearZ;
    }

    double pressure(double dtot) const {
        double num = dtot * RTC;
        if (!linear_z) return num;
        double den = 1.0 - dtot * RTAC;
        if (!(den > 0.0))
            throw Error(ErrorKind::Physics, "inadmissible density in steady profile");
        return num / den;
    }

    double dpressure(double dtot) const {
        if (!linear_z) return RTC;
        double den = 1.0 - dtot * RTAC;
        return RTC / (den * den);
    }

    double density(double p) const {
        if (!linear_z) return p / RTC;
        return p / (RTC + p * RTAC);
    }
};

// next cell density from the discrete steady momentum balance
// p(x) - p(d_i) + dx (lambda/D) q|q| / (d_i + x) = 0
inline double steady_cell_step(const CompositionEos& eos, double d_prev, double q, double dx,
                               double lambda, double diameter) {
    double drop = dx * lambda / diameter * q * std::abs(q);
    // ideal closed form doubles as the Newton seed
    double rad = d_prev * d_prev - drop / eos.RTC;
    if (!(rad > 0.0))
        throw Error(ErrorKind::Physics, "pressure collapse while marching steady profile");
    double x = std::sqrt(rad);
    if (!eos.linear_z) return x;
    double p_prev = eos.pressure(d_prev);
    for (int it = 0; it < 60; ++it) {
        double g = eos.pressure(x) - p_prev + drop / (d_prev + x);
        double gp = eos.dpressure(x) - drop / ((d_prev + x) * (d_prev + x));
        double step = g / gp;
        x -= step;
        if (!(x > 0.0))
            throw Error(ErrorKind::Physics, "pressure collapse while marching steady profile");
        if (std::abs(step) < 1.0e-15 * (1.0 + x)) break;
    }
    return x;
}

inline std::vector<double> march_profile(const CompositionEos& eos, double dc0, double q,
                                         std::size_t cells, double dx, double lambda,
                                         double diameter) {
    std::vector<double> d(cells);
    d[0] = dc0;
    for (std::size_t i = 1; i < cells; ++i)
        d[i] = steady_cell_step(eos, d[i - 1], q, dx, lambda, diameter);
    return d;
}

// dense Gaussian elimination with partial pivoting (the polish systems are
// a handful of unknowns)
inline std::vector<double> solve_dense(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1.0e-300)
            throw Error(ErrorKind::Physics, "singular system in steady-state polish");
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (std::size_t c2 = col; c2 < n; ++c2) A[r][c2] -= f * A[col][c2];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double acc = b[ri];
        for (std::size_t c2 = ri + 1; c2 < n; ++c2) acc -= A[ri][c2] * x[c2];
        x[ri] = acc / A[ri][ri];
    }
    return x;
}

}  // namespace detail

struct SteadyProblem {
    const Network* net = nullptr;
    const GridPlan* plan = nullptr;
    EosMode mode = EosMode::Ideal;
    std::vector<double> composition;       // uniform initial mass fractions
    std::vector<double> slack_pressure;    // schedule value at t=0 per node (slack only)
    std::vector<double> mu0;               // mu_k(0) per pipe (1 without compressor)
    std::vector<double> F0;                // F_d(0) - F_s(0) per node
};

namespace detail {

// residual layout: [per pipe: from-end, to-end] + [per flow node: mass balance]
// unknown layout:  [per pipe: first-cell density, flux] + [per flow node: pressure]
struct PolishWorkspace {
    std::vector<std::size_t> flow_node_slot;  // node -> slot among flow nodes (or npos)
    std::size_t n_unknowns = 0;
    double p_scale = 1.0;
    double f_scale = 1.0;
};

inline std::vector<double> polish_residual(const SteadyProblem& prob,
                                           const PolishWorkspace& ws,
                                           std::span<const double> x) {
    const Network& net = *prob.net;
    const GridPlan& plan = *prob.plan;
    const std::size_t P = net.pipes.size();
    detail::CompositionEos eos(net.gas, prob.composition, prob.mode);

    auto node_pressure = [&](std::size_t q) {
        if (net.nodes[q].kind == NodeKind::Slack) return prob.slack_pressure[q];
        return x[2 * P + ws.flow_node_slot[q]];
    };

    std::vector<double> r;
    r.reserve(ws.n_unknowns);
    std::vector<double> balance(net.nodes.size(), 0.0);
    for (std::size_t q = 0; q < net.nodes.size(); ++q) balance[q] = prob.F0[q];

    for (std::size_t k = 0; k < P; ++k) {
        const Pipe& pipe = net.pipes[k];
        double dc0 = x[2 * k];
        double q = x[2 * k + 1];
        double dx = plan.dx[k];
        auto prof = detail::march_profile(eos, dc0, q, plan.cells[k], dx, pipe.friction,
                                          pipe.diameter);
        double dcN = prof.back();
        // ghost-extrapolation factor: half cell at slack boundaries, full
        // cell at solved junction/flow nodes
        double kf = net.nodes[pipe.from].kind == NodeKind::Slack ? 0.5 : 1.0;
        double kt = net.nodes[pipe.to].kind == NodeKind::Slack ? 0.5 : 1.0;
        double fric0 = kf * pipe.friction * dx / (2.0 * pipe.diameter) * q * std::abs(q) / dc0;
        double fricN = kt * pipe.friction * dx / (2.0 * pipe.diameter) * q * std::abs(q) / dcN;
        double r_from = prob.mu0[k] * node_pressure(pipe.from) - eos.pressure(dc0) - fric0;
        double r_to = node_pressure(pipe.to) - eos.pressure(dcN) + fricN;
        r.push_back(r_from / ws.p_scale);
        r.push_back(r_to / ws.p_scale);
        balance[pipe.from] += pipe.area() * q;
        balance[pipe.to] -= pipe.area() * q;
    }
    for (std::size_t q = 0; q < net.nodes.size(); ++q)
        if (net.nodes[q].kind == NodeKind::Flow) r.push_back(balance[q] / ws.f_scale);
    return r;
}

}  // namespace detail

/// Build a network steady state from the tabulated per-pipe endpoint data.
///
/// The table seeds per-pipe profiles and fluxes; a small Newton polish then
/// enforces the discrete stationarity conditions of the staggered scheme
/// exactly (per-pipe end conditions plus nodal mass balance), so the engine
/// holds the state to rounding when schedules are frozen. The polish is not a
/// general steady solver: it needs the table as a starting point and fails if
/// the data is inconsistent beyond `consistency_tol`.
inline NetworkState init_network_steady(const Network& net, const GridPlan& plan,
                                        std::span<const PipeInitRow> rows,
                                        std::span<const double> composition, EosMode mode,
                                        const InitOptions& opt = {}) {
    const std::size_t P = net.pipes.size();
    if (rows.size() != P)
        throw Error(ErrorKind::Validation, "initial table must cover every pipe exactly once");
    if (composition.size() != net.gas.size())
        throw Error(ErrorKind::Validation, "initial composition size mismatch");

    SteadyProblem prob;
    prob.net = &net;
    prob.plan = &plan;
    prob.mode = mode;
    prob.composition.assign(composition.begin(), composition.end());

    // schedule values at t = 0
    prob.mu0.assign(P, 1.0);
    for (std::size_t k = 0; k < P; ++k)
        if (net.pipes[k].compressor)
            prob.mu0[k] = net.compressors[*net.pipes[k].compressor].ratio(0.0);
    prob.F0.assign(net.nodes.size(), 0.0);
    prob.slack_pressure.assign(net.nodes.size(), 0.0);
    detail::CompositionEos eos(net.gas, prob.composition, mode);
    for (std::size_t q = 0; q < net.nodes.size(); ++q) {
        const Node& n = net.nodes[q];
        if (n.kind == NodeKind::Slack) {
            if (n.pressure)
                prob.slack_pressure[q] = (*n.pressure)(0.0);
            else if (n.supply_density)
                prob.slack_pressure[q] = eos.pressure((*n.supply_density)(0.0));
            else
                throw Error(ErrorKind::Validation, "slack node without boundary data: " + n.id);
        } else {
            double fd = n.withdrawal ? (*n.withdrawal)(0.0) : 0.0;
            double fs = n.injection ? (*n.injection)(0.0) : 0.0;
            prob.F0[q] = fd - fs;
        }
    }

    // table rows in pipe order
    std::vector<const PipeInitRow*> row(P, nullptr);
    for (const auto& r : rows) row[net.pipe_index(r.pipe)] = &r;
    for (std::size_t k = 0; k < P; ++k)
        if (!row[k])
            throw Error(ErrorKind::Validation, "initial table misses pipe " + net.pipes[k].id);

    // --- consistency of the tabulated data -------------------------------
    std::vector<std::string> inconsistencies;
    auto check = [&](bool ok, const std::string& what, double residual) {
        if (!ok) {
            std::ostringstream os;
            os << what << " (residual " << residual << ")";
            inconsistencies.push_back(os.str());
        }
    };
    // implied nodal pressures agree across adjacent table entries
    std::vector<double> implied_p(net.nodes.size(), 0.0);
    for (std::size_t q = 0; q < net.nodes.size(); ++q) {
        double ref = 0.0;
        for (const auto& adj : net.adjacent(q)) {
            double p = adj.at_start ? row[adj.pipe]->p_in / prob.mu0[adj.pipe]
                                    : row[adj.pipe]->p_out;
            if (ref == 0.0) ref = p;
            double rel = std::abs(p - ref) / ref;
            check(rel <= opt.consistency_tol,
                  "node " + net.nodes[q].id + ": endpoint pressures disagree", rel);
        }
        if (net.nodes[q].kind == NodeKind::Slack && ref > 0.0) {
            double rel = std::abs(ref - prob.slack_pressure[q]) / prob.slack_pressure[q];
            check(rel <= opt.consistency_tol,
                  "slack node " + net.nodes[q].id + ": table pressure vs schedule", rel);
        }
        implied_p[q] = ref > 0.0 ? ref : prob.slack_pressure[q];
    }
    // nodal mass balance of the tabulated flows
    for (std::size_t q = 0; q < net.nodes.size(); ++q) {
        if (net.nodes[q].kind == NodeKind::Slack) continue;
        double bal = prob.F0[q];
        double scale = std::abs(prob.F0[q]);
        for (const auto& adj : net.adjacent(q)) {
            double f = row[adj.pipe]->flow;
            bal += adj.at_start ? f : -f;
            scale = std::max(scale, std::abs(f));
        }
        if (scale > 0.0)
            check(std::abs(bal) / scale <= opt.consistency_tol,
                  "node " + net.nodes[q].id + ": tabulated flows do not balance",
                  std::abs(bal) / scale);
    }
    if (!inconsistencies.empty()) {
        std::string msg = "initial data inconsistent:";
        for (const auto& s : inconsistencies) msg += "\n  - " + s;
        throw Error(ErrorKind::Validation, msg);
    }

    // --- Newton polish to the discrete steady manifold -------------------
    detail::PolishWorkspace ws;
    ws.flow_node_slot.assign(net.nodes.size(), static_cast<std::size_t>(-1));
    std::size_t n_flow = 0;
    for (std::size_t q = 0; q < net.nodes.size(); ++q)
        if (net.nodes[q].kind == NodeKind::Flow) ws.flow_node_slot[q] = n_flow++;
    ws.n_unknowns = 2 * P + n_flow;
    for (std::size_t q = 0; q < net.nodes.size(); ++q)
        ws.p_scale = std::max(ws.p_scale, implied_p[q]);
    for (std::size_t k = 0; k < P; ++k)
        ws.f_scale = std::max(ws.f_scale, std::abs(row[k]->flow));
    ws.f_scale = std::max(ws.f_scale, 1.0);

    std::vector<double> x(ws.n_unknowns, 0.0);
    for (std::size_t k = 0; k < P; ++k) {
        x[2 * k] = eos.density(row[k]->p_in);
        x[2 * k + 1] = row[k]->flow / net.pipes[k].area();
    }
    for (std::size_t q = 0; q < net.nodes.size(); ++q)
        if (net.nodes[q].kind == NodeKind::Flow) x[2 * P + ws.flow_node_slot[q]] = implied_p[q];

    auto norm_inf = [](std::span<const double> v) {
        double m = 0.0;
        for (double e : v) m = std::max(m, std::abs(e));
        return m;
    };

    std::vector<double> r = detail::polish_residual(prob, ws, x);
    for (int it = 0; it < opt.max_iterations && norm_inf(r) > opt.newton_tol; ++it) {
        // finite-difference Jacobian; the systems stay tiny
        std::vector<std::vector<double>> J(ws.n_unknowns, std::vector<double>(ws.n_unknowns));
        for (std::size_t c = 0; c < ws.n_unknowns; ++c) {
            double h = 1.0e-7 * std::max(1.0, std::abs(x[c]));
            std::vector<double> xp(x.begin(), x.end());
            xp[c] += h;
            auto rp = detail::polish_residual(prob, ws, xp);
            for (std::size_t rr = 0; rr < ws.n_unknowns; ++rr) J[rr][c] = (rp[rr] - r[rr]) / h;
        }
        std::vector<double> rhs(r.begin(), r.end());
        for (double& v : rhs) v = -v;
        auto dx = detail::solve_dense(std::move(J), std::move(rhs));
        for (std::size_t c = 0; c < ws.n_unknowns; ++c) x[c] += dx[c];
        r = detail::polish_residual(prob, ws, x);
    }
    if (norm_inf(r) > 1.0e3 * opt.newton_tol)
        throw Error(ErrorKind::Validation,
                    "steady-state polish did not converge; initial table is inconsistent "
                    "with the discrete scheme (scaled residual " +
                        std::to_string(norm_inf(r)) + ")");

    // --- assemble the state ----------------------------------------------
    NetworkState state;
    state.time = 0.0;
    for (std::size_t k = 0; k < P; ++k) {
        PipeState ps = PipeState::zeros(net.gas.size(), plan.cells[k], plan.dx[k]);
        auto prof = detail::march_profile(eos, x[2 * k], x[2 * k + 1], plan.cells[k], plan.dx[k],
                                          net.pipes[k].friction, net.pipes[k].diameter);
        for (std::size_t a = 0; a < net.gas.size(); ++a)
            for (std::size_t i = 0; i < prof.size(); ++i)
                ps.d[a][i] = prob.composition[a] * prof[i];
        // steady flux doubles as the cold-start half-level value
        std::fill(ps.phi.begin(), ps.phi.end(), x[2 * k + 1]);
        state.pipes.push_back(std::move(ps));
    }
    for (std::size_t q = 0; q < net.nodes.size(); ++q) {
        NodeState ns;
        ns.p = net.nodes[q].kind == NodeKind::Slack ? prob.slack_pressure[q]
                                                    : x[2 * P + ws.flow_node_slot[q]];
        ns.c = prob.composition;
        double denom = 0.0;
        for (std::size_t b = 0; b < net.gas.size(); ++b) {
            double Z = mode == EosMode::LinearZ ? 1.0 + net.gas[b].a * ns.p : 1.0;
            denom += ns.c[b] * net.gas.RT()[b] * Z;
        }
        ns.d.resize(net.gas.size());
        for (std::size_t a = 0; a < net.gas.size(); ++a) ns.d[a] = ns.p * ns.c[a] / denom;
        state.nodes.push_back(std::move(ns));
    }
    return state;
}

/// Compatibility report for an assembled initial state: slack pressures match
/// their schedules, compressor/momentum end conditions are stationary, and
/// outgoing-pipe boundary compositions equal the nodal compositions.
inline ValidationReport check_compatibility(const NetworkState& state, const Network& net,
                                            const GridPlan& plan, EosMode mode,
                                            double tol = 1.0e-6) {
    ValidationReport rep;
    auto flag = [&rep](const std::string& s) { rep.violations.push_back(s); };

    for (std::size_t q = 0; q < net.nodes.size(); ++q) {
        const Node& n = net.nodes[q];
        const NodeState& ns = state.nodes[q];
        double csum = 0.0;
        for (double c : ns.c) csum += c;
        if (std::abs(csum - 1.0) > 1.0e-9)
            flag("node " + n.id + ": nodal fractions do not sum to one");
        if (n.kind == NodeKind::Slack && n.pressure) {
            double sched = (*n.pressure)(0.0);
            if (std::abs(ns.p - sched) > tol * sched)
                flag("slack node " + n.id + ": state pressure differs from schedule");
        }
        for (const auto& adj : net.adjacent(q)) {
            const Pipe& pipe = net.pipes[adj.pipe];
            const PipeState& ps = state.pipes[adj.pipe];
            std::size_t cell = adj.at_start ? 0 : ps.cells() - 1;
            std::size_t edge = adj.at_start ? 0 : ps.edges() - 1;
            auto dcell = ps.cell_densities(cell);
            double dtot = total_density(dcell);
            double p_near = pressure(dcell, net.gas, mode);
            double mu = net.mu_at(adj, 0.0);
            double q_local = (adj.at_start ? 1.0 : -1.0) * ps.phi[edge];
            double kf = n.kind == NodeKind::Slack ? 0.5 : 1.0;
            double fric = kf * pipe.friction * plan.dx[adj.pipe] / (2.0 * pipe.diameter) *
                          q_local * std::abs(q_local) / dtot;
            double resid = mu * ns.p - p_near - fric;
            if (std::abs(resid) > tol * ns.p)
                flag("pipe " + pipe.id + " at node " + n.id +
                     ": boundary momentum condition violated (compressor relation)");
            // outgoing pipes must carry the nodal composition at their first cell
            if (adj.at_start && dtot > 0.0) {
                for (std::size_t a = 0; a < net.gas.size(); ++a) {
                    if (std::abs(dcell[a] / dtot - ns.c[a]) > 1.0e-9) {
                        flag("pipe " + pipe.id + ": boundary composition differs from node " +
                             n.id);
                        break;
                    }
                }
            }
        }
    }
    return rep;
}

}  // namespace gasnet::steady_init
