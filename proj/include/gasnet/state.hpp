#pragma once

#include <vector>

#include "gasnet/species.hpp"

namespace gasnet {

/// Staggered state of one pipe. Partial densities live at the N cell centers
/// x_i = (i + 1/2) dx on integer time levels; the total mass flux lives at the
/// N+1 cell edges x_j = j dx on the interleaved half levels.
struct PipeState {
    std::vector<std::vector<double>> d;  // [species][cell], kg/m^3
    std::vector<double> phi;             // [edge], kg/m^2/s
    double dx = 0.0;

    std::size_t cells() const { return d.empty() ? 0 : d.front().size(); }
    std::size_t edges() const { return phi.size(); }
    std::size_t n_species() const { return d.size(); }

    static PipeState zeros(std::size_t n_species, std::size_t n_cells, double dx) {
        PipeState s;
        s.d.assign(n_species, std::vector<double>(n_cells, 0.0));
        s.phi.assign(n_cells + 1, 0.0);
        s.dx = dx;
        return s;
    }

    std::vector<double> cell_densities(std::size_t i) const {
        std::vector<double> out(d.size());
        for (std::size_t a = 0; a < d.size(); ++a) out[a] = d[a][i];
        return out;
    }

    double cell_total(std::size_t i) const {
        double t = 0.0;
        for (const auto& da : d) t += da[i];
        return t;
    }
};

/// Nodal mixing result on the staggered half level: pressure, per-species
/// densities consistent with that pressure, and the mixed mass fractions.
struct NodeState {
    double p = 0.0;
    std::vector<double> d;
    std::vector<double> c;
};

struct NetworkState {
    std::vector<PipeState> pipes;
    std::vector<NodeState> nodes;
    double time = 0.0;  // density level; fluxes sit at time - dt/2
};

}  // namespace gasnet
