#pragma once

#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/species.hpp"

namespace gasnet {

/// Mixture pressure from partial densities:
///
///   p(d) = sum_a d_a R_a T / (1 - sum_a d_a R_a T a_a)
///
/// In ideal mode every slope a_a is treated as zero, so p = sum_a d_a R_a T.
/// Throws on an empty mixture (sum d = 0) and when the linear-Z denominator
/// becomes non-positive (inadmissible density).
inline double pressure(std::span<const double> d, const GasModel& gas, EosMode mode) {
    double num = 0.0;
    auto RT = gas.RT();
    for (std::size_t a = 0; a < d.size(); ++a) num += d[a] * RT[a];
    if (!(num > 0.0))
        throw Error(ErrorKind::Physics, "degenerate mixture state: total density is zero");
    if (mode == EosMode::Ideal) return num;
    double den = 1.0;
    auto RTa = gas.RTa();
    for (std::size_t a = 0; a < d.size(); ++a) den -= d[a] * RTa[a];
    if (!(den > 0.0))
        throw Error(ErrorKind::Physics,
                    "non-physical density: linear-Z admissibility 1 - sum(d R T a) <= 0");
    return num / den;
}

inline double pressure(std::span<const double> d, const GasModel& gas) {
    return pressure(d, gas, gas.mode());
}

inline double pressure(const MixtureState& mix, const std::vector<GasSpecies>& species,
                       EosMode mode) {
    if (mix.d.size() != species.size())
        throw Error(ErrorKind::Argument, "mixture/species size mismatch");
    GasModel gas(species, mix.T, mode);
    return pressure(mix.d, gas, mode);
}

/// Individual density of one constituent at the common pressure:
/// rho_a = p / (R_a T (1 + a_a p)). Strictly increasing in p over the
/// admissible range 1 + a_a p > 0.
inline double individual_density(double p, const GasSpecies& s, double T,
                                 EosMode mode = EosMode::LinearZ) {
    if (!(p > 0.0)) throw Error(ErrorKind::Physics, "pressure must be positive");
    double Z = mode == EosMode::Ideal ? 1.0 : 1.0 + s.a * p;
    if (!(Z > 0.0))
        throw Error(ErrorKind::Physics, "non-physical pressure: 1 + a p <= 0",
                    "species " + s.name);
    return p / (s.R * T * Z);
}

/// Fit the slope of Z(p) = 1 + a p from (pressure, Z) samples as the mean of
/// (Z - 1)/p over the table. Pressures in Pa.
inline double fit_linear_compressibility(std::span<const std::pair<double, double>> samples) {
    if (samples.empty())
        throw Error(ErrorKind::Argument, "compressibility fit needs at least one sample");
    double acc = 0.0;
    for (const auto& [p, Z] : samples) {
        if (!(p > 0.0))
            throw Error(ErrorKind::Argument, "compressibility fit requires positive pressures");
        acc += (Z - 1.0) / p;
    }
    return acc / static_cast<double>(samples.size());
}

/// Upper bound on the mixture wave speed, used only for CFL sizing:
/// max over species of sqrt(R_a T Z_cap) with Z_cap = max(1, 1 + a_a p_max).
inline double wave_speed_bound(const GasModel& gas, double p_max = 1.0e7) {
    double best = 0.0;
    for (std::size_t a = 0; a < gas.size(); ++a) {
        double Zcap = 1.0;
        if (gas.mode() == EosMode::LinearZ)
            Zcap = std::max(1.0, 1.0 + gas[a].a * p_max);
        best = std::max(best, std::sqrt(gas.RT()[a] * Zcap));
    }
    return best;
}

}  // namespace gasnet
