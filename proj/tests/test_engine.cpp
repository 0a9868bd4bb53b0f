#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace gasnet;
using testsupport::load_case;

namespace {

// programmatic single-pipe case with a chosen species table
struct MiniCase {
    Network net;
    std::vector<steady_init::PipeInitRow> rows;
    std::vector<double> comp;
};

MiniCase mini_pipe(std::vector<GasSpecies> species, std::vector<double> comp) {
    MiniCase mc;
    double T = 298.15;
    mc.net.gas = GasModel(std::move(species), T);
    Node in;
    in.id = "IN";
    in.kind = NodeKind::Slack;
    in.supply_density =
        Schedule::sinusoid(45.4990786148, 0.1, 0.0004363323129985824, 0.0);
    CompositionSchedule cs;
    cs.balance = 0;
    if (mc.net.gas.size() > 1) {
        // uniform halves across two species
        cs.given.emplace_back(1, Schedule::constant(0.5));
    }
    in.composition = cs;
    Node out;
    out.id = "OUT";
    out.kind = NodeKind::Flow;
    out.withdrawal = Schedule::sinusoid(56.74501730546564, 0.1, 0.0002908882086657216, 0.0);
    mc.net.nodes = {in, out};
    Pipe p;
    p.id = "P1";
    p.from = 0;
    p.to = 1;
    p.diameter = 0.5;
    p.length = 100.0e3;
    p.friction = 0.011;
    mc.net.pipes = {p};
    mc.rows = {{"P1", 6499999.999999833, 4000001.41112292, 56.74501730546564}};
    mc.comp = std::move(comp);
    return mc;
}

}  // namespace

TEST_CASE("grid planning on the single-pipe benchmark", "[engine][grid]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_blend.json");
    SimConfig cfg = c.scenario.config;  // dx_target 500

    SECTION("cell count and spacing") {
        GridPlan plan = plan_grids(c.net, cfg);
        CHECK(plan.cells[0] == 200);
        CHECK(plan.dx[0] == Catch::Approx(500.0));
        CHECK(plan.wave_bound == Catch::Approx(1320.0).epsilon(1e-12));
        CHECK(plan.dt == Catch::Approx(0.8 * 500.0 / 1320.0).epsilon(1e-12));
    }
    SECTION("the benchmark 1.08 s step exceeds the two-species bound") {
        cfg.dt = 1.08;
        CHECK_THROWS_AS(plan_grids(c.net, cfg), Error);
        cfg.unsafe_dt = true;
        GridPlan plan = plan_grids(c.net, cfg);
        CHECK(plan.dt == 1.08);
        CHECK(plan.dt_exceeds_bound);
    }
    SECTION("pure natural gas bound at 500 m cells") {
        double T = 298.15;
        Network ng;
        ng.gas = GasModel({{"natural_gas", 377.9683 * 377.9683 / T, 0.0, 0.0}}, T);
        Pipe p;
        p.id = "P";
        p.from = 0;
        p.to = 1;
        p.diameter = 0.5;
        p.length = 10.0e3;
        p.friction = 0.01;
        ng.pipes = {p};
        ng.nodes.resize(2);
        SimConfig c2;
        c2.dx_target = 500.0;
        GridPlan plan = plan_grids(ng, c2);
        CHECK(plan.dt == Catch::Approx(0.8 * 500.0 / 377.9683).epsilon(1e-12));
        CHECK(plan.dt == Catch::Approx(1.058).epsilon(1e-3));
    }
    SECTION("the network benchmark dt = 0.02 s is accepted") {
        auto c5 = load_case("five_node_network.json", "five_node_baseline.json");
        SimConfig cfg5 = c5.scenario.config;
        cfg5.dt = 0.02;
        GridPlan plan = plan_grids(c5.net, cfg5);
        CHECK(plan.dt == 0.02);
        CHECK_FALSE(plan.dt_exceeds_bound);
    }
}

TEST_CASE("five-node steady state holds under frozen schedules", "[engine][steady]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    cfg.dt = 0.02;
    cfg.dx_target = 4000.0;
    Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
    CHECK(eng.steady_hold_drift(1000) < 1.0e-6);
}

TEST_CASE("pure natural gas boundaries never create hydrogen", "[engine]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    cfg.dx_target = 5000.0;
    cfg.duration = 1800.0;
    Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
    auto result = eng.run();
    for (const auto& ps : eng.state().pipes)
        for (double v : ps.d[1]) CHECK(v == 0.0);
    for (const auto& ns : eng.state().nodes) CHECK(ns.d[1] == 0.0);
    (void)result;
}

TEST_CASE("two identical species reduce exactly to the homogeneous gas", "[engine][reduction]") {
    double T = 298.15;
    double R = 377.9683 * 377.9683 / T;
    auto twin = mini_pipe({{"g1", R, 0.0, 0.0}, {"g2", R, 0.0, 0.0}}, {0.5, 0.5});
    auto solo = mini_pipe({{"g", R, 0.0, 0.0}}, {1.0});

    SimConfig cfg;
    cfg.dx_target = 2000.0;
    cfg.dt = 2.0;
    cfg.duration = 3600.0;
    Engine a(twin.net, cfg, twin.rows, twin.comp);
    Engine b(solo.net, cfg, solo.rows, solo.comp);
    std::size_t steps = 1800;
    for (std::size_t s = 0; s < steps; ++s) {
        a.step();
        b.step();
    }
    const auto& pa = a.state().pipes[0];
    const auto& pb = b.state().pipes[0];
    for (std::size_t i = 0; i < pa.cells(); ++i) {
        double total = pa.d[0][i] + pa.d[1][i];
        REQUIRE(total == Catch::Approx(pb.d[0][i]).epsilon(1.0e-12));
        REQUIRE(pa.d[0][i] / total == Catch::Approx(0.5).epsilon(1.0e-12));
    }
    for (std::size_t j = 0; j < pa.phi.size(); ++j)
        REQUIRE(pa.phi[j] == Catch::Approx(pb.phi[j]).epsilon(1.0e-12));
    REQUIRE(a.state().nodes[1].p == Catch::Approx(b.state().nodes[1].p).epsilon(1.0e-12));
}

TEST_CASE("mass balance residual stays at rounding level", "[engine][conservation]") {
    auto c = load_case("five_node_network.json", "five_node_blend.json");
    SimConfig cfg = c.scenario.config;
    cfg.dx_target = 5000.0;
    cfg.dt = 0.5;
    cfg.duration = 3600.0;
    Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
    auto result = eng.run();
    auto res = mass_balance_residual(result.mass);
    double lp0 = 0.0;
    for (double v : result.mass.linepack[0]) lp0 += v;
    for (const auto& sample : res)
        for (double r : sample) CHECK(std::abs(r) <= 1.0e-9 * lp0);
}

TEST_CASE("zero-flow network has an exactly zero residual", "[engine][conservation]") {
    double T = 298.15;
    double R = 377.9683 * 377.9683 / T;
    auto mc = mini_pipe({{"g", R, 0.0, 0.0}}, {1.0});
    mc.net.nodes[0].supply_density = Schedule::constant(40.0);
    mc.net.nodes[1].withdrawal = Schedule::constant(0.0);
    mc.rows = {{"P1", 40.0 * R * T, 40.0 * R * T, 0.0}};
    SimConfig cfg;
    cfg.dx_target = 10000.0;
    cfg.dt = 5.0;
    cfg.duration = 3600.0;
    Engine eng(mc.net, cfg, mc.rows, mc.comp);
    auto result = eng.run();
    auto res = mass_balance_residual(result.mass);
    for (const auto& sample : res)
        for (double r : sample) CHECK(r == 0.0);
}

TEST_CASE("a corrupted boundary-flow record shows up in the residual", "[engine][conservation]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    cfg.dx_target = 5000.0;
    cfg.dt = 0.5;
    cfg.duration = 1800.0;
    Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
    auto result = eng.run();
    double tamper = 0.01 * result.mass.net_inflow.back()[0];
    REQUIRE(std::abs(tamper) > 0.0);
    auto corrupted = result.mass;
    for (auto& sample : corrupted.net_inflow) sample[0] += tamper;
    auto res = mass_balance_residual(corrupted);
    CHECK(std::abs(res.back()[0]) == Catch::Approx(std::abs(tamper)).epsilon(1e-6));
}

TEST_CASE("flow reversal at a junction edge is caught", "[engine][reversal]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_baseline.json");
    // sink the inlet density below the outlet pressure level so the feed
    // edge gently reverses without draining any cell
    Node& in = c.net.nodes[0];
    in.supply_density = Schedule::tanh_ramp(45.4990786148, -9.75, 0.01, 600.0);
    SimConfig cfg = c.scenario.config;
    cfg.dx_target = 5000.0;
    cfg.duration = 1500.0;

    SECTION("strict mode raises") {
        Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
        bool raised = false;
        try {
            auto r = eng.run();
        } catch (const Error& e) {
            raised = true;
            CHECK(std::string(e.what()).find("reversal") != std::string::npos);
        }
        CHECK(raised);
    }
    SECTION("permissive mode warns and continues") {
        cfg.permissive_reversals = true;
        Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
        auto r = eng.run();
        CHECK(r.reversal_warnings > 0);
        CHECK(r.steps > 0);
    }
}

TEST_CASE("runs are deterministic", "[engine]") {
    auto run_once = [] {
        auto c = load_case("five_node_network.json", "five_node_blend.json");
        SimConfig cfg = c.scenario.config;
        cfg.dx_target = 5000.0;
        cfg.dt = 0.5;
        cfg.duration = 900.0;
        cfg.output_every = 100;
        Engine eng(c.net, cfg, c.scenario.init_rows, c.scenario.init_composition);
        return eng.run();
    };
    auto r1 = run_once();
    auto r2 = run_once();
    REQUIRE(r1.node_series.size() == r2.node_series.size());
    for (std::size_t t = 0; t < r1.node_series.size(); ++t) {
        REQUIRE(r1.node_series[t].rows.size() == r2.node_series[t].rows.size());
        for (std::size_t i = 0; i < r1.node_series[t].rows.size(); ++i)
            for (std::size_t j = 0; j < r1.node_series[t].rows[i].size(); ++j)
                REQUIRE(r1.node_series[t].rows[i][j] == r2.node_series[t].rows[i][j]);
    }
}

TEST_CASE("linear-Z mode with zero slopes reproduces ideal mode", "[engine][eos]") {
    auto ci = load_case("single_pipe_network.json", "single_pipe_blend.json");
    auto cz = load_case("single_pipe_network.json", "single_pipe_blend.json");
    SimConfig cfg = ci.scenario.config;
    cfg.dx_target = 2000.0;
    cfg.duration = 1800.0;
    SimConfig cfgz = cfg;
    cfgz.eos = EosMode::LinearZ;  // fixture slopes are zero
    Engine a(ci.net, cfg, ci.scenario.init_rows, ci.scenario.init_composition);
    Engine b(cz.net, cfgz, cz.scenario.init_rows, cz.scenario.init_composition);
    std::size_t steps = 1000;
    for (std::size_t s = 0; s < steps; ++s) {
        a.step();
        b.step();
    }
    const auto& pa = a.state().pipes[0];
    const auto& pb = b.state().pipes[0];
    for (std::size_t j = 0; j < pa.phi.size(); ++j)
        REQUIRE(pa.phi[j] == Catch::Approx(pb.phi[j]).epsilon(1e-12));
    for (std::size_t a2 = 0; a2 < 2; ++a2)
        for (std::size_t i = 0; i < pa.cells(); ++i)
            REQUIRE(pa.d[a2][i] == Catch::Approx(pb.d[a2][i]).margin(1e-12));
}

TEST_CASE("pressure decays monotonically along compressor-free steady pipes", "[engine]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    SimConfig cfg = c.scenario.config;
    GridPlan plan = plan_grids(c.net, cfg);
    auto state = steady_init::init_network_steady(c.net, plan, c.scenario.init_rows,
                                                  c.scenario.init_composition, cfg.eos);
    // P3 and P4 carry no compressors and positive flow
    for (const char* id : {"P3", "P4"}) {
        const auto& ps = state.pipes[c.net.pipe_index(id)];
        for (std::size_t i = 0; i + 1 < ps.cells(); ++i) {
            double p0 = pressure(ps.cell_densities(i), c.net.gas, cfg.eos);
            double p1 = pressure(ps.cell_densities(i + 1), c.net.gas, cfg.eos);
            CHECK(p1 < p0);
        }
    }
}

TEST_CASE("convergence study declines with a single level", "[engine][convergence]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_baseline.json");
    auto res = convergence_study(c.net, c.scenario.config, c.scenario.init_rows,
                                 c.scenario.init_composition, 1);
    CHECK_FALSE(res.sufficient);
    CHECK(res.orders.empty());
}
