#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gasnet/junction.hpp"

namespace gasnet::monitoring {

/// Decomposition of the nodal linear response used by the real-time policies:
/// per-pipe Theta (the pressure-independent flux part) and the scalar
/// Upsilon = -sum(S Theta) / sum(S mu), so that with uniform cell size the
/// boundary flux under injection F reads
///   phi_k(F) = mu_k F / sum(mu S) + Theta_k + mu_k Upsilon.
struct ThetaUpsilon {
    std::vector<double> theta;
    double upsilon = 0.0;
};

inline ThetaUpsilon theta_upsilon(std::span<const junction::PipeEnd> ends, double dt) {
    ThetaUpsilon out;
    double area_theta = 0.0;
    double area_mu = 0.0;
    for (const auto& e : ends) {
        double th = junction::theta(e, dt);
        out.theta.push_back(th);
        area_theta += e.S * th;
        area_mu += e.S * e.mu;
    }
    if (!(area_mu > 0.0))
        throw Error(ErrorKind::Physics, "degenerate node: no adjacent pipe area");
    out.upsilon = -area_theta / area_mu;
    return out;
}

/// Maximum injection at a node that keeps the mixed nodal mass fraction of
/// species `alpha` at `c_max` after this step. Derived by writing every
/// adjacent boundary flux as an affine function of the injection and solving
/// the mixing balance for the injection that lands exactly on the limit.
/// Inflow/outflow membership follows the current flow direction (no
/// reversals). Requires zero withdrawal at the node. Result is floored at 0;
/// a vanishing denominator raises a degenerate-denominator error.
inline double max_injection(std::span<const junction::PipeEnd> ends, std::size_t alpha,
                            double c_max, std::span<const double> c_s, double dt) {
    auto r = junction::build_response(ends, dt);
    const double A = r.area_theta;
    const double B = r.area_w;

    double n0 = 0.0, n1 = c_s[alpha];
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t k = 0; k < ends.size(); ++k) {
        const auto& e = ends[k];
        if (e.phi_prev < 0.0) {
            double ck = e.d_near[alpha] / total_density(e.d_near);
            n0 += e.S * ck * (r.w[k] * A / B - r.theta[k]);
            n1 -= e.S * ck * r.w[k] / B;
        } else {
            d0 += e.S * (r.theta[k] - r.w[k] * A / B);
            d1 += e.S * r.w[k] / B;
        }
    }

    double den = n1 - c_max * d1;
    double scale = std::abs(n1) + std::abs(c_max * d1) + 1.0e-300;
    if (std::abs(den) < 1.0e-12 * scale)
        throw Error(ErrorKind::Physics, "degenerate denominator in max-injection policy");
    double F = (c_max * d0 - n0) / den;
    return std::max(F, 0.0);
}

/// Maximum withdrawal that keeps the nodal pressure at exactly `p_min`:
/// the nodal pressure is affine in F_d, p = (-F_d - sum S theta)/(sum S w),
/// so F_max = -sum(S theta) - p_min sum(S w). Floored at 0; requires zero
/// injection at the node.
inline double max_withdrawal(std::span<const junction::PipeEnd> ends, double p_min, double dt) {
    auto r = junction::build_response(ends, dt);
    double F = -r.area_theta - r.area_w * p_min;
    return std::max(F, 0.0);
}

enum class PolicyKind { MaxConcentration, MinPressure };

inline const char* to_string(PolicyKind p) {
    return p == PolicyKind::MaxConcentration ? "max-concentration" : "min-pressure";
}

struct PolicyEvent {
    double time = 0.0;
    std::string node;
    PolicyKind policy{};
    double planned = 0.0;
    double applied = 0.0;
    double limit = 0.0;
};

struct PolicyDecision {
    double applied = 0.0;
    bool clamped = false;
};

/// Memoryless clamp: the applied flow is min(planned, F_max).
inline PolicyDecision clamp_flow(double planned, double f_max) {
    if (planned > f_max) return {f_max, true};
    return {planned, false};
}

}  // namespace gasnet::monitoring
