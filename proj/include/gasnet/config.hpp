#pragma once

#include <cstddef>
#include <string>

#include "gasnet/species.hpp"

namespace gasnet {

/// Run configuration. Time step 0 means "derive from the CFL bound".
struct SimConfig {
    double duration = 0.0;       // s
    double dt = 0.0;             // s, explicit override when > 0
    double dx_target = 1000.0;   // m, target cell size
    EosMode eos = EosMode::Ideal;
    bool monitoring = false;
    bool permissive_reversals = false;
    bool unsafe_dt = false;      // accept a dt override beyond the CFL bound
    std::size_t output_every = 0;  // record every k-th step; 0 = pick from dt
    double cfl_safety = 0.8;
    double p_max_wave_bound = 1.0e7;  // Pa, cap used by the wave-speed bound
    double flow_floor = 1.0e-12;      // kg/s, stagnant-node mixing fallback
};

}  // namespace gasnet
