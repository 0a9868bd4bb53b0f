#pragma once

#include <random>
#include <string>

#include "gasnet/gasnet.hpp"
#include "gasnet/io.hpp"

namespace testsupport {

inline std::string data_path(const std::string& f) {
    return std::string(GASNET_DATA_DIR) + "/" + f;
}

struct Case {
    gasnet::Network net;
    gasnet::io::Scenario scenario;
};

inline Case load_case(const std::string& network, const std::string& scenario) {
    Case c;
    c.net = gasnet::io::load_network(data_path(network));
    c.scenario = gasnet::io::load_scenario(data_path(scenario), c.net);
    return c;
}

/// Two-species model matching the bundled network fixtures (ideal slopes).
inline gasnet::GasModel two_gas_ideal() {
    double T = 298.15;
    return gasnet::GasModel({{"natural_gas", 377.9683 * 377.9683 / T, 0.0, 0.0},
                             {"hydrogen", 1320.0 * 1320.0 / T, 0.0, 0.0}},
                            T, gasnet::EosMode::Ideal);
}

inline gasnet::GasModel two_gas_linear_z() {
    double T = 298.15;
    return gasnet::GasModel({{"natural_gas", 377.9683 * 377.9683 / T, -2.5e-8, 0.0},
                             {"hydrogen", 1320.0 * 1320.0 / T, 5.9e-9, 0.0}},
                            T, gasnet::EosMode::LinearZ);
}

}  // namespace testsupport
