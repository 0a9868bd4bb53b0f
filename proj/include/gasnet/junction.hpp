#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "gasnet/eos.hpp"
#include "gasnet/error.hpp"
#include "gasnet/pipe_solver.hpp"
#include "gasnet/state.hpp"

namespace gasnet::junction {

/// One pipe end viewed from a node in the local all-outgoing frame: the local
/// coordinate starts at the node, so phi_prev > 0 means flow from the node
/// into the pipe. For a pipe that arrives at the node, local values are the
/// native outlet values with the flux sign flipped.
struct PipeEnd {
    double S = 0.0;         // cross-section (m^2)
    double diameter = 0.0;  // m
    double lambda = 0.0;    // friction factor
    double dx = 0.0;        // cell size of this pipe (m)
    double mu = 1.0;        // compression ratio at this end (1 unless compressor at pipe start)
    double phi_prev = 0.0;  // boundary flux at the previous half level, local sign
    std::span<const double> d_near;  // node-adjacent cell partial densities, density level
    double p_near = 0.0;    // EOS pressure of that cell in the configured mode
};

/// Upwinded friction contribution of the boundary momentum balance,
/// dt (lambda/2D) phi|phi| / d using the adjacent cell's total density.
inline double friction_term(const PipeEnd& e, double dt) {
    double dn = total_density(e.d_near);
    if (dn < pipe_solver::kDensityFloor)
        throw Error(ErrorKind::Physics, "degenerate state: boundary cell density below floor");
    return dt * e.lambda / (2.0 * e.diameter) * e.phi_prev * std::abs(e.phi_prev) / dn;
}

/// Pressure-independent part of the explicit boundary-flux update:
/// theta = phi_prev - friction - (dt/dx) p_near.
inline double theta(const PipeEnd& e, double dt) {
    return e.phi_prev - friction_term(e, dt) - dt / e.dx * e.p_near;
}

/// Linear response of a node: every adjacent boundary flux is affine in the
/// nodal pressure, phi_k(p) = theta_k + w_k p with w_k = mu_k dt / dx_k, and
/// total mass balance picks p = (F_s - F_d - sum S theta) / (sum S w).
/// Keeping dx inside w generalizes the uniform-grid formula to pipes with
/// different cell sizes meeting at one node.
struct NodalResponse {
    std::vector<double> theta;
    std::vector<double> w;
    std::vector<double> S;
    double area_theta = 0.0;  // sum_k S_k theta_k
    double area_w = 0.0;      // sum_k S_k w_k

    double pressure(double F_s, double F_d) const { return (F_s - F_d - area_theta) / area_w; }
    double flux(std::size_t k, double p) const { return theta[k] + w[k] * p; }
};

inline NodalResponse build_response(std::span<const PipeEnd> ends, double dt) {
    if (ends.empty())
        throw Error(ErrorKind::Argument, "nodal solve requires at least one adjacent pipe");
    NodalResponse r;
    r.theta.reserve(ends.size());
    r.w.reserve(ends.size());
    r.S.reserve(ends.size());
    for (const PipeEnd& e : ends) {
        double th = theta(e, dt);
        double w = e.mu * dt / e.dx;
        r.theta.push_back(th);
        r.w.push_back(w);
        r.S.push_back(e.S);
        r.area_theta += e.S * th;
        r.area_w += e.S * w;
    }
    if (!(r.area_w > 0.0))
        throw Error(ErrorKind::Physics, "degenerate node: sum of S mu dt/dx is not positive");
    return r;
}

/// Explicit nodal pressure from flow balance over the adjacent pipe ends.
inline double nodal_pressure(std::span<const PipeEnd> ends, double F_s, double F_d, double dt) {
    return build_response(ends, dt).pressure(F_s, F_d);
}

/// Explicit boundary-flux update at a pipe end given the nodal pressure:
/// phi_new = phi_prev - friction - (dt/dx)(p_near - mu p_node), local sign.
inline double boundary_flux(const PipeEnd& e, double p_node, double dt) {
    return theta(e, dt) + dt / e.dx * e.mu * p_node;
}

/// Compressor action on the suction pressure. mu must stay >= 1.
inline double apply_compressor(double mu, double p_node) {
    if (mu < 1.0) throw Error(ErrorKind::Validation, "compression ratio below one");
    return mu * p_node;
}

/// Inputs of the nodal mixing update: new local boundary fluxes plus the
/// adjacent cells' compositions.
struct MixingEnd {
    double S = 0.0;
    double phi_new = 0.0;            // local all-outgoing sign, new half level
    std::span<const double> d_near;  // node-adjacent cell partial densities
};

/// Mix incoming boundary flows with any injection and derive the nodal
/// composition and the partial densities consistent with the nodal pressure:
///
///   c_a = (sum_in S |phi| c_a,near + F_s c_a,s) / total inflow
///   d_a(p) = p c_a / sum_b c_b R_b T (1 + a_b p)        (ideal: drop 1+ap)
///
/// When the node throughflow falls below `flow_floor` the previous fractions
/// are held (stagnant-node fallback).
inline NodeState nodal_mixture(std::span<const MixingEnd> ends, double F_s,
                               std::span<const double> c_s, double F_d, double p_node,
                               const GasModel& gas, EosMode mode, std::span<const double> c_prev,
                               double flow_floor = 1.0e-12) {
    const std::size_t ns = gas.size();
    std::vector<double> num(ns, 0.0);
    double outflow = F_d;
    for (const MixingEnd& e : ends) {
        if (e.phi_new < 0.0) {
            double dn = total_density(e.d_near);
            if (dn < pipe_solver::kDensityFloor)
                throw Error(ErrorKind::Physics, "degenerate inflow state at node");
            double q = e.S * (-e.phi_new) / dn;
            for (std::size_t a = 0; a < ns; ++a) num[a] += q * e.d_near[a];
        } else {
            outflow += e.S * e.phi_new;
        }
    }
    if (F_s > 0.0)
        for (std::size_t a = 0; a < ns; ++a) num[a] += F_s * c_s[a];

    double inflow = 0.0;
    for (double v : num) inflow += v;

    NodeState st;
    st.p = p_node;
    st.c.resize(ns);
    if (inflow <= flow_floor || outflow <= flow_floor) {
        for (std::size_t a = 0; a < ns; ++a) st.c[a] = c_prev[a];
    } else {
        for (std::size_t a = 0; a < ns; ++a) st.c[a] = num[a] / inflow;
    }

    double denom = 0.0;
    for (std::size_t b = 0; b < ns; ++b) {
        double Z = mode == EosMode::LinearZ ? 1.0 + gas[b].a * p_node : 1.0;
        denom += st.c[b] * gas.RT()[b] * Z;
    }
    if (!(denom > 0.0))
        throw Error(ErrorKind::Physics, "inadmissible nodal mixture at pressure",
                    "p = " + std::to_string(p_node));
    st.d.resize(ns);
    for (std::size_t a = 0; a < ns; ++a) st.d[a] = p_node * st.c[a] / denom;
    return st;
}

/// Per-species share of a withdrawal, split by the nodal composition:
/// F_a = (d_a / d) F_d.
inline std::vector<double> split_withdrawal(double F_d, const NodeState& node) {
    if (F_d < 0.0) throw Error(ErrorKind::Argument, "withdrawal must be non-negative");
    double total = total_density(node.d);
    if (!(total > 0.0))
        throw Error(ErrorKind::Physics, "degenerate nodal state: zero total density");
    std::vector<double> out(node.d.size());
    for (std::size_t a = 0; a < node.d.size(); ++a) out[a] = F_d * (node.d[a] / total);
    return out;
}

/// First-cell species update at a pipe's from-end. The inflow at edge 0 uses
/// the nodal composition (upwind ghost) while the interior edge 1 upwinds
/// between the first two cells as usual.
inline void update_boundary_densities(std::vector<std::vector<double>>& d, std::size_t cell,
                                      std::span<const double> node_d, double phi0, double phi1,
                                      double dt, double dx) {
    const std::size_t ns = d.size();
    std::vector<double> first(ns), second(ns);
    for (std::size_t a = 0; a < ns; ++a) {
        first[a] = d[a][cell];
        second[a] = d[a][cell + 1];
    }
    const double r = dt / dx;
    for (std::size_t a = 0; a < ns; ++a) {
        double f0 = pipe_solver::upwind_species_flux(phi0, node_d, first, a);
        double f1 = pipe_solver::upwind_species_flux(phi1, first, second, a);
        double v = d[a][cell] - r * (f1 - f0);
        if (v < 0.0) {
            if (v < -1.0e-12)
                throw Error(ErrorKind::Physics, "negative partial density at boundary cell");
            v = 0.0;
        }
        d[a][cell] = v;
    }
}

}  // namespace gasnet::junction
