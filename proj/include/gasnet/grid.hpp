#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gasnet/config.hpp"
#include "gasnet/eos.hpp"
#include "gasnet/network.hpp"

namespace gasnet {

struct GridPlan {
    std::vector<std::size_t> cells;  // N_k per pipe
    std::vector<double> dx;          // L_k / N_k
    double dt = 0.0;
    double dt_bound = 0.0;     // cfl_safety * min dx / wave bound
    double wave_bound = 0.0;   // m/s
    bool dt_exceeds_bound = false;
};

/// Size the grids: N_k = ceil(L_k / dx_target) with at least two cells per
/// pipe, and a single global time step bounded by the fastest wave. An
/// explicit dt override beyond the bound is a stability error unless the
/// config says unsafe_dt.
inline GridPlan plan_grids(const Network& net, const SimConfig& cfg) {
    GridPlan plan;
    double min_dx = std::numeric_limits<double>::max();
    for (const Pipe& p : net.pipes) {
        auto n = static_cast<std::size_t>(std::ceil(p.length / cfg.dx_target));
        n = std::max<std::size_t>(n, 2);
        plan.cells.push_back(n);
        plan.dx.push_back(p.length / static_cast<double>(n));
        min_dx = std::min(min_dx, plan.dx.back());
    }
    GasModel bounded = net.gas;
    bounded.set_mode(cfg.eos);
    plan.wave_bound = wave_speed_bound(bounded, cfg.p_max_wave_bound);
    plan.dt_bound = cfg.cfl_safety * min_dx / plan.wave_bound;
    if (cfg.dt > 0.0) {
        plan.dt = cfg.dt;
        if (cfg.dt > plan.dt_bound) {
            plan.dt_exceeds_bound = true;
            if (!cfg.unsafe_dt)
                throw Error(ErrorKind::Stability,
                            "dt override " + std::to_string(cfg.dt) +
                                " s exceeds the stability bound " +
                                std::to_string(plan.dt_bound) + " s (pass the unsafe flag to force)");
        }
    } else {
        plan.dt = plan.dt_bound;
    }
    return plan;
}

}  // namespace gasnet
