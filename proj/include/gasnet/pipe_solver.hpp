#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gasnet/eos.hpp"
#include "gasnet/error.hpp"
#include "gasnet/state.hpp"

namespace gasnet::pipe_solver {

/// Total density below this floor makes the upwind ratio d_a/d meaningless;
/// instead of returning NaN we fail loudly.
inline constexpr double kDensityFloor = 1.0e-8;

/// Series-expansion threshold for the quadratic flux solve: for
/// 4 a |c| below this, -1 + sqrt(1 + x) loses most of its digits.
inline constexpr double kQuadraticSeriesThreshold = 1.0e-8;

/// Relevant root of  a sign(phi) phi^2 + phi - c = 0  with a >= 0:
///
///   phi = sign(c) (-1 + sqrt(1 + 4 a |c|)) / (2 a)
///     = sign(c) 2 |c| / (1 + sqrt(1 + 4 a |c|))
///
/// so sign(phi) = sign(c) always. The rationalized form avoids the -1 + sqrt
/// cancellation; below the series threshold the two-term expansion
/// c (1 - a |c|) is used (frictionless limit phi -> c).
inline double solve_flux_quadratic(double a, double c) {
    if (c == 0.0) return 0.0;
    double ac = a * std::abs(c);
    if (4.0 * ac < kQuadraticSeriesThreshold) return c * (1.0 - ac);
    return 2.0 * c / (1.0 + std::sqrt(1.0 + 4.0 * ac));
}

/// Upwinded per-area component mass flux through an edge:
/// phi_a = phi * (d_a / d) of the upstream state (left if phi >= 0).
inline double upwind_species_flux(double phi, std::span<const double> d_left,
                                  std::span<const double> d_right, std::size_t alpha,
                                  double floor = kDensityFloor) {
    if (phi == 0.0) return 0.0;
    std::span<const double> up = phi >= 0.0 ? d_left : d_right;
    double total = total_density(up);
    if (total < floor)
        throw Error(ErrorKind::Physics, "degenerate state: upwind total density below floor");
    return phi * (up[alpha] / total);
}

/// Conservative species update over all cells:
///   d_a(n+1, i) = d_a(n, i) - (dt/dx) (phi_a(m, i+1) - phi_a(m, i))
/// plus optional explicit diffusion eps_a (dt/dx^2) (d_{i+1} - 2 d_i + d_{i-1})
/// with copied ghost values at the pipe ends. `fluxes` holds the upwinded
/// component fluxes per species at every edge (boundary edges included).
/// Partial densities in [-1e-12, 0) are clamped to zero; anything below that
/// raises a negative-density error naming the offending cell.
inline void update_densities(PipeState& state,
                             const std::vector<std::vector<double>>& fluxes, double dt,
                             std::span<const double> eps = {}) {
    const std::size_t n = state.cells();
    const double r = dt / state.dx;
    for (std::size_t a = 0; a < state.n_species(); ++a) {
        auto& d = state.d[a];
        const auto& f = fluxes[a];
        std::vector<double> diff;
        if (!eps.empty() && eps[a] > 0.0) {
            diff.resize(n);
            const double k = eps[a] * dt / (state.dx * state.dx);
            for (std::size_t i = 0; i < n; ++i) {
                double dm = i == 0 ? d[i] : d[i - 1];
                double dp = i + 1 == n ? d[i] : d[i + 1];
                diff[i] = k * (dp - 2.0 * d[i] + dm);
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            double v = d[i] - r * (f[i + 1] - f[i]);
            if (!diff.empty()) v += diff[i];
            if (v < 0.0) {
                if (v < -1.0e-12)
                    throw Error(ErrorKind::Physics, "negative partial density",
                                "species " + std::to_string(a) + ", cell " + std::to_string(i));
                v = 0.0;
            }
            d[i] = v;
        }
    }
}

/// Flux update on the interior edges j = 1..N-1 via the closed-form quadratic:
///   a = dt (lambda / 2D) / (d_{i} + d_{i+1})
///   c = phi_m - (dt/dx)(p_{i+1} - p_i) - a sign(phi_m) phi_m^2
/// with pressures taken from the flanking cells at the new density level.
/// Boundary edges are owned by the junction solver and left untouched.
inline void update_fluxes(PipeState& state, const GasModel& gas, EosMode mode, double lambda,
                          double diameter, double dt) {
    const std::size_t n = state.cells();
    if (n < 2) return;
    const double r = dt / state.dx;
    const double fric = lambda / (2.0 * diameter);

    std::vector<double> p(n), dtot(n);
    std::vector<double> cell(state.n_species());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < state.n_species(); ++a) cell[a] = state.d[a][i];
        p[i] = pressure(cell, gas, mode);
        dtot[i] = total_density(cell);
    }

    for (std::size_t j = 1; j < n; ++j) {
        double sum_d = dtot[j - 1] + dtot[j];
        double a = dt * fric / sum_d;
        double phi = state.phi[j];
        double c = phi - r * (p[j] - p[j - 1]) - a * std::copysign(phi * phi, phi);
        state.phi[j] = solve_flux_quadratic(a, c);
    }
}

}  // namespace gasnet::pipe_solver
