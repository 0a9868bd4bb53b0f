#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"

using namespace gasnet;
using testsupport::load_case;

TEST_CASE("piecewise demand profile hits the tabulated breakpoints", "[schedule]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    const Node& n5 = c.net.nodes[c.net.node_index("N5")];
    REQUIRE(n5.withdrawal.has_value());
    const Schedule& f5 = *n5.withdrawal;
    CHECK(f5(15600.0) == Catch::Approx(180.0).epsilon(1.0e-14));  // 1.2 x 150
    CHECK(f5(0.0) == 150.0);
    CHECK(f5(30000.0) == 180.0);
    CHECK(f5(86400.0 + 15600.0) == Catch::Approx(180.0).epsilon(1.0e-12));  // periodic wrap
}

TEST_CASE("compressor ratio schedules evaluate to the tabulated start values", "[schedule]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    CHECK(c.net.compressors[0].ratio(0.0) == Catch::Approx(1.5290113).epsilon(1.0e-12));
    CHECK(c.net.compressors[1].ratio(0.0) == Catch::Approx(1.1128863).epsilon(1.0e-14));
    CHECK(c.net.compressors[2].ratio(0.0) == Catch::Approx(1.2242249).epsilon(1.0e-12));
    // raised-cosine peak: mu3(T/6) = 1.5 mu3(0)
    CHECK(c.net.compressors[2].ratio(86400.0 / 6.0) ==
          Catch::Approx(1.5 * 1.2242249).epsilon(1.0e-12));
}

TEST_CASE("constant schedules are time independent", "[schedule]") {
    auto s = Schedule::constant(42.5);
    CHECK(s(0.0) == 42.5);
    CHECK(s(12345.6) == 42.5);
    CHECK(s(1.0e9) == 42.5);
}

TEST_CASE("piecewise interpolation is continuous at every breakpoint", "[schedule]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    auto check_continuity = [](const Schedule& s) {
        for (const auto& [t, v] : s.points()) {
            CHECK(s(t) == v);
            double eps = 1.0e-7 * std::max(1.0, t);
            double jump = std::abs(s(std::min(t + eps, 86400.0 - 1e-9)) - s(std::max(t - eps, 0.0)));
            CHECK(jump <= 1.0e-4 * std::max(1.0, std::abs(v)));
        }
    };
    check_continuity(*c.net.nodes[c.net.node_index("N5")].withdrawal);
    check_continuity(c.net.compressors[1].ratio);
}

TEST_CASE("tanh ramp parameters", "[schedule]") {
    auto s = Schedule::tanh_ramp(0.0, 0.01, 0.0005, 28800.0);
    CHECK(s(28800.0) == Catch::Approx(0.01).epsilon(1e-14));
    CHECK(s(0.0) == Catch::Approx(0.01 * (1.0 + std::tanh(-0.0005 * 28800.0))).epsilon(1e-14));
    CHECK(s(86400.0) == Catch::Approx(0.02).margin(1e-8));
    CHECK(s.min_value() == 0.0);
    CHECK(s.max_value() == Catch::Approx(0.02));
}

TEST_CASE("piecewise breakpoints must strictly increase", "[schedule]") {
    CHECK_THROWS_AS(Schedule::piecewise_linear({{0.0, 1.0}, {0.0, 2.0}}), Error);
}

TEST_CASE("five-node fixture validates cleanly", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    auto rep = validate(c.net);
    for (const auto& v : rep.violations) UNSCOPED_INFO(v);
    CHECK(rep.ok());
}

TEST_CASE("single-pipe fixture validates cleanly", "[network]") {
    auto c = load_case("single_pipe_network.json", "single_pipe_blend.json");
    auto rep = validate(c.net);
    for (const auto& v : rep.violations) UNSCOPED_INFO(v);
    CHECK(rep.ok());
}

TEST_CASE("validation flags a network without a slack node", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    c.net.nodes[0].kind = NodeKind::Flow;
    c.net.nodes[0].pressure.reset();
    c.net.nodes[0].composition.reset();
    auto rep = validate(c.net);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("no slack node") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validation flags simultaneous injection and withdrawal", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    Node& n3 = c.net.nodes[c.net.node_index("N3")];
    n3.injection = Schedule::constant(5.0);
    n3.composition = CompositionSchedule::pure(1);
    auto rep = validate(c.net);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("simultaneously positive") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validation flags a compressor ratio below one", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    c.net.compressors[0].ratio = Schedule::constant(0.95);
    auto rep = validate(c.net);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("ratio schedule dips below 1") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("validation flags disconnected nodes and dangling compressors", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    Node island;
    island.id = "N9";
    island.kind = NodeKind::Flow;
    c.net.nodes.push_back(island);
    Compressor orphan;
    orphan.id = "C9";
    orphan.pipe = 99;
    c.net.compressors.push_back(orphan);
    auto rep = validate(c.net);
    bool disco = false, dangle = false;
    for (const auto& v : rep.violations) {
        if (v.find("disconnected") != std::string::npos) disco = true;
        if (v.find("nonexistent pipe") != std::string::npos) dangle = true;
    }
    CHECK(disco);
    CHECK(dangle);
}

TEST_CASE("validation flags a composition that does not sum to one", "[network]") {
    auto c = load_case("five_node_network.json", "five_node_baseline.json");
    Node& n1 = c.net.nodes[0];
    CompositionSchedule bad;  // hydrogen 1.4 pushes the balance species negative
    bad.given.emplace_back(1, Schedule::constant(1.4));
    bad.balance = 0;
    n1.composition = bad;
    auto rep = validate(c.net);
    bool found = false;
    for (const auto& v : rep.violations)
        if (v.find("valid mass fractions") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("network canonical serialization round-trips byte-identically", "[network][io]") {
    auto net = gasnet::io::load_network(testsupport::data_path("five_node_network.json"));
    std::string s1 = gasnet::io::serialize_network(net);
    auto reparsed = gasnet::io::load_network_json(nlohmann::json::parse(s1));
    std::string s2 = gasnet::io::serialize_network(reparsed);
    CHECK(s1 == s2);
}
