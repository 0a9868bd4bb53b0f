#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "gasnet/error.hpp"

namespace gasnet {

/// Equation-of-state closure used to map partial densities to pressure.
/// Ideal treats every compressibility slope as zero; LinearZ uses
/// Z_a(p) = 1 + a_a * p per constituent.
enum class EosMode { Ideal, LinearZ };

inline const char* to_string(EosMode m) { return m == EosMode::Ideal ? "ideal" : "linear-z"; }

/// One gas constituent. `R` is the specific gas constant (J/kg/K), `a` the
/// linear compressibility slope (1/Pa; 0 for an ideal gas, may be negative),
/// `eps` an optional diffusion coefficient (m^2/s).
struct GasSpecies {
    std::string name;
    double R = 0.0;
    double a = 0.0;
    double eps = 0.0;
};

/// Mixture sample: partial densities (kg/m^3) per species at temperature T (K).
struct MixtureState {
    std::vector<double> d;
    double T = 288.15;
};

/// Species table plus the run-wide constant temperature and EOS mode.
/// Precomputes R_a*T and R_a*T*a_a so per-cell pressure evaluation stays cheap.
class GasModel {
  public:
    GasModel() = default;

    GasModel(std::vector<GasSpecies> species, double temperature, EosMode mode = EosMode::Ideal)
        : species_(std::move(species)), T_(temperature), mode_(mode) {
        if (species_.empty())
            throw Error(ErrorKind::Argument, "gas model needs at least one species");
        if (!(T_ > 0.0))
            throw Error(ErrorKind::Argument, "temperature must be positive");
        for (const auto& s : species_) {
            if (!(s.R > 0.0))
                throw Error(ErrorKind::Argument, "specific gas constant must be positive",
                            "species " + s.name);
            if (s.eps < 0.0)
                throw Error(ErrorKind::Argument, "diffusion coefficient must be non-negative",
                            "species " + s.name);
            if (!std::isfinite(s.a))
                throw Error(ErrorKind::Argument, "compressibility slope must be finite",
                            "species " + s.name);
            RT_.push_back(s.R * T_);
            RTa_.push_back(s.R * T_ * s.a);
        }
    }

    std::size_t size() const { return species_.size(); }
    const std::vector<GasSpecies>& species() const { return species_; }
    const GasSpecies& operator[](std::size_t i) const { return species_[i]; }
    double temperature() const { return T_; }
    EosMode mode() const { return mode_; }
    void set_mode(EosMode m) { mode_ = m; }

    /// R_a * T per species.
    std::span<const double> RT() const { return RT_; }
    /// R_a * T * a_a per species (zero effect in ideal mode).
    std::span<const double> RTa() const { return RTa_; }

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < species_.size(); ++i)
            if (species_[i].name == name) return i;
        throw Error(ErrorKind::Argument, "unknown species '" + name + "'");
    }

    bool has(const std::string& name) const {
        return std::any_of(species_.begin(), species_.end(),
                           [&](const GasSpecies& s) { return s.name == name; });
    }

  private:
    std::vector<GasSpecies> species_;
    double T_ = 288.15;
    EosMode mode_ = EosMode::Ideal;
    std::vector<double> RT_;
    std::vector<double> RTa_;
};

inline double total_density(std::span<const double> d) {
    return std::accumulate(d.begin(), d.end(), 0.0);
}

/// Mass fractions c_a = d_a / sum(d). Sums to one up to rounding.
inline std::vector<double> mass_fractions(std::span<const double> d) {
    double total = total_density(d);
    if (!(total > 0.0))
        throw Error(ErrorKind::Physics, "mass fractions undefined for zero total density");
    std::vector<double> c(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) c[i] = d[i] / total;
    return c;
}

}  // namespace gasnet
