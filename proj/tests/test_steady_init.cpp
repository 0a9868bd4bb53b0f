#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace gasnet;
using testsupport::load_case;
using testsupport::two_gas_ideal;

TEST_CASE("steady pipe profile matches the closed form", "[steady_init]") {
    auto gas = two_gas_ideal();
    double RT = gas.RT()[0];
    double lambda = 0.011, D = 0.5, L = 100.0e3;
    double phi0 = 289.0, rho0 = 45.4990786148;
    std::size_t n = 200;
    auto prof = steady_init::steady_pipe_profile(rho0, phi0, L, D, lambda, RT, n);

    REQUIRE(prof.size() == n);
    double beta = lambda / (RT * D) * phi0 * phi0;
    double dx = L / static_cast<double>(n);
    for (std::size_t i = 0; i < n; i += 37) {
        double x = (static_cast<double>(i) + 0.5) * dx;
        CHECK(prof[i] == Catch::Approx(std::sqrt(rho0 * rho0 - beta * x)).epsilon(1e-14));
    }
    // endpoint values extrapolate to the stated boundary densities
    CHECK(std::sqrt(prof.front() * prof.front() + beta * dx / 2.0) ==
          Catch::Approx(rho0).epsilon(1e-14));
    CHECK(std::sqrt(prof.back() * prof.back() - beta * dx / 2.0) ==
          Catch::Approx(std::sqrt(rho0 * rho0 - beta * L)).epsilon(1e-12));
}

TEST_CASE("zero flow gives a constant profile", "[steady_init]") {
    auto prof = steady_init::steady_pipe_profile(30.0, 0.0, 50.0e3, 0.5, 0.01, 142860.0, 25);
    for (double v : prof) CHECK(v == 30.0);
}

TEST_CASE("profile collapses when friction drains the pressure", "[steady_init]") {
    CHECK_THROWS_AS(
        steady_init::steady_pipe_profile(10.0, 500.0, 500.0e3, 0.3, 0.02, 142860.0, 50), Error);
}

TEST_CASE("steady profile satisfies the discrete momentum balance", "[steady_init][oracle]") {
    auto gas = two_gas_ideal();
    double RT = gas.RT()[0];
    double lambda = 0.011, D = 0.5, L = 100.0e3, phi0 = 289.0, rho0 = 45.4990786148;
    std::size_t n = 100;
    double dx = L / static_cast<double>(n);
    auto prof = steady_init::steady_pipe_profile(rho0, phi0, L, D, lambda, RT, n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double grad = (prof[i + 1] - prof[i]) * RT / dx;
        double fric = lambda / (2.0 * D) * 2.0 * phi0 * phi0 / (prof[i] + prof[i + 1]);
        CHECK(std::abs(grad + fric) <= 1.0e-8 * std::abs(fric));
    }
}

TEST_CASE("five-node initial table is accepted and polished", "[steady_init]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    GridPlan plan = plan_grids(c.net, cfg);
    auto state = steady_init::init_network_steady(c.net, plan, c.scenario.init_rows,
                                                  c.scenario.init_composition, cfg.eos);
    REQUIRE(state.pipes.size() == 5);
    // node pressures land near the tabulated values; the nodal coupling
    // carries an O(dx) ghost-cell offset, so the gap scales with the grid
    CHECK(state.nodes[0].p == Catch::Approx(3.447378645e6).epsilon(1e-12));  // slack, exact
    CHECK(state.nodes[1].p == Catch::Approx(4.6112053e6).epsilon(1e-2));
    CHECK(state.nodes[3].p == Catch::Approx(3.5043953e6).epsilon(5e-2));
    // tabulated compressor relation: p_in(P1) = mu1(0) p1(0) within 1e-6
    double mu1 = c.net.compressors[0].ratio(0.0);
    CHECK(mu1 * 3.447378645e6 == Catch::Approx(5.2710811e6).epsilon(1.0e-6));
    // fluxes are uniform per pipe and near the tabulated flows
    for (std::size_t k = 0; k < 5; ++k) {
        double S = c.net.pipes[k].area();
        double f = state.pipes[k].phi.front() * S;
        CHECK(f == Catch::Approx(c.scenario.init_rows[k].flow).epsilon(2e-2));
        for (double phi : state.pipes[k].phi)
            CHECK(phi == Catch::Approx(state.pipes[k].phi.front()).epsilon(1e-12));
    }
    // compatibility report is clean
    auto rep = steady_init::check_compatibility(state, c.net, plan, cfg.eos);
    for (const auto& v : rep.violations) UNSCOPED_INFO(v);
    CHECK(rep.ok());
}

TEST_CASE("polished pressures approach the table at first order in dx", "[steady_init]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    auto gap_at = [&](double dxt) {
        SimConfig cfg = c.scenario.config;
        cfg.dx_target = dxt;
        GridPlan plan = plan_grids(c.net, cfg);
        auto state = steady_init::init_network_steady(c.net, plan, c.scenario.init_rows,
                                                      c.scenario.init_composition, cfg.eos);
        return std::abs(state.nodes[4].p - 3.4473786e6);
    };
    double g1 = gap_at(1000.0), g2 = gap_at(500.0), g3 = gap_at(250.0);
    CHECK(g1 / g2 == Catch::Approx(2.0).epsilon(0.25));
    CHECK(g2 / g3 == Catch::Approx(2.0).epsilon(0.25));
}

TEST_CASE("tabulated nodal balance at N3 holds within table rounding", "[steady_init][paper]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    // 233.3 into N3, 83.33 onward, 150 withdrawn
    double residual = 233.3 - 83.33 - 150.0;
    CHECK(std::abs(residual) / 233.3 < 1.0e-3);
}

TEST_CASE("inconsistent initial data is rejected with a residual report", "[steady_init]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    GridPlan plan = plan_grids(c.net, cfg);

    SECTION("endpoint pressure off by five percent") {
        auto rows = c.scenario.init_rows;
        rows[2].p_out *= 1.05;
        try {
            steady_init::init_network_steady(c.net, plan, rows, c.scenario.init_composition,
                                             cfg.eos);
            FAIL("expected an inconsistency error");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Validation);
            CHECK(std::string(e.what()).find("residual") != std::string::npos);
        }
    }
    SECTION("flow balance broken at a junction") {
        auto rows = c.scenario.init_rows;
        rows[1].flow = 180.0;  // N2/N3 balances now off by far more than 1%
        CHECK_THROWS_AS(steady_init::init_network_steady(c.net, plan, rows,
                                                         c.scenario.init_composition, cfg.eos),
                        Error);
    }
}

TEST_CASE("single pipe with zero flow and uniform pressure is accepted", "[steady_init]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_baseline.json");
    // replace the boundary data with a no-flow configuration
    Node& in = c.net.nodes[0];
    in.supply_density = Schedule::constant(40.0);
    Node& out = c.net.nodes[1];
    out.withdrawal = Schedule::constant(0.0);

    double RT = c.net.gas.RT()[0];
    std::vector<steady_init::PipeInitRow> rows{{"P1", 40.0 * RT, 40.0 * RT, 0.0}};
    SimConfig cfg = c.scenario.config;
    cfg.dx_target = 10000.0;
    GridPlan plan = plan_grids(c.net, cfg);
    std::vector<double> comp{1.0, 0.0};
    auto state = steady_init::init_network_steady(c.net, plan, rows, comp, EosMode::Ideal);
    for (double v : state.pipes[0].d[0]) CHECK(v == Catch::Approx(40.0).epsilon(1e-12));
    for (double v : state.pipes[0].phi) CHECK(v == 0.0);
}

TEST_CASE("compatibility check flags a perturbed boundary density", "[steady_init]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    GridPlan plan = plan_grids(c.net, cfg);
    auto state = steady_init::init_network_steady(c.net, plan, c.scenario.init_rows,
                                                  c.scenario.init_composition, cfg.eos);
    state.pipes[1].d[0][0] *= 1.01;
    auto rep = steady_init::check_compatibility(state, c.net, plan, cfg.eos);
    CHECK_FALSE(rep.ok());
    bool momentum = false;
    for (const auto& v : rep.violations)
        if (v.find("momentum") != std::string::npos) momentum = true;
    CHECK(momentum);
}

TEST_CASE("pure natural gas network passes compatibility with unit fractions",
          "[steady_init]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    GridPlan plan = plan_grids(c.net, cfg);
    auto state = steady_init::init_network_steady(c.net, plan, c.scenario.init_rows,
                                                  c.scenario.init_composition, cfg.eos);
    for (const auto& ns : state.nodes) {
        CHECK(ns.c[0] == 1.0);
        CHECK(ns.c[1] == 0.0);
        CHECK(std::abs(ns.c[0] + ns.c[1] - 1.0) <= 1e-15);
    }
    CHECK(steady_init::check_compatibility(state, c.net, plan, cfg.eos).ok());
}

TEST_CASE("single-pipe steady state holds under frozen schedules", "[steady_init][engine]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_blend.json");
    SimConfig cfg = c.scenario.config;
    cfg.dt = 0.25;
    cfg.dx_target = 2000.0;
    Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
    double drift = eng.steady_hold_drift(1000);
    CHECK(drift < 1.0e-6);
}
