#pragma once

// gasnet: transient simulation of heterogeneous gas mixtures in pipeline
// networks on an explicit staggered grid, with nodal mixing, compressors and
// real-time concentration/pressure monitoring policies.

#include "gasnet/config.hpp"
#include "gasnet/engine.hpp"
#include "gasnet/eos.hpp"
#include "gasnet/error.hpp"
#include "gasnet/grid.hpp"
#include "gasnet/junction.hpp"
#include "gasnet/monitoring.hpp"
#include "gasnet/network.hpp"
#include "gasnet/pipe_solver.hpp"
#include "gasnet/schedule.hpp"
#include "gasnet/species.hpp"
#include "gasnet/state.hpp"
#include "gasnet/steady_init.hpp"

namespace gasnet {
inline constexpr const char* kVersion = "0.1.0";
}
