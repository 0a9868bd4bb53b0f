#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "gasnet/error.hpp"
#include "gasnet/schedule.hpp"
#include "gasnet/species.hpp"

namespace gasnet {

/// Supply / injection composition as mass-fraction schedules. One designated
/// balance species absorbs the remainder so the fractions always sum to one.
struct CompositionSchedule {
    std::vector<std::pair<std::size_t, Schedule>> given;  // (species index, fraction schedule)
    std::size_t balance = 0;                              // species receiving 1 - sum(given)

    std::vector<double> evaluate(double t, std::size_t n_species) const {
        std::vector<double> c(n_species, 0.0);
        double rest = 1.0;
        for (const auto& [idx, sched] : given) {
            double v = sched(t);
            c[idx] = v;
            rest -= v;
        }
        c[balance] += rest;
        return c;
    }

    static CompositionSchedule pure(std::size_t species_index) {
        CompositionSchedule c;
        c.balance = species_index;
        return c;
    }
};

enum class NodeKind { Slack, Flow };

/// Network node. Slack nodes prescribe pressure (or total supply density) and
/// a supply composition; flow nodes prescribe withdrawal or injection mass
/// flow. Monitoring limits are optional per node.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::Flow;

    // slack boundary data: pressure (Pa) or total supply density (kg/m^3)
    std::optional<Schedule> pressure;
    std::optional<Schedule> supply_density;

    // flow boundary data (kg/s), complementary: at most one nonzero at any t
    std::optional<Schedule> withdrawal;
    std::optional<Schedule> injection;

    // composition of slack supply or injection flow
    std::optional<CompositionSchedule> composition;

    // monitoring limits
    std::vector<std::pair<std::size_t, double>> c_max;  // (species, max mass fraction)
    std::optional<double> p_min;                        // minimum nodal pressure (Pa)
};

struct Compressor {
    std::string id;
    std::size_t pipe = 0;  // pipe whose start is boosted
    Schedule ratio;        // mu(t) >= 1
};

struct Pipe {
    std::string id;
    std::size_t from = 0;
    std::size_t to = 0;
    double diameter = 0.0;  // m
    double length = 0.0;    // m
    double friction = 0.0;  // Darcy-Weisbach lambda
    std::optional<std::size_t> compressor;

    double area() const { return std::numbers::pi * 0.25 * diameter * diameter; }
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// One end of a pipe as seen from a node (local all-outgoing orientation).
struct Adjacency {
    std::size_t pipe;
    bool at_start;  // true when the node is the pipe's from-node
};

class Network {
  public:
    GasModel gas;
    std::vector<Node> nodes;
    std::vector<Pipe> pipes;
    std::vector<Compressor> compressors;
    std::string title;

    std::size_t node_index(const std::string& id) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].id == id) return i;
        throw Error(ErrorKind::Argument, "unknown node '" + id + "'");
    }

    std::size_t pipe_index(const std::string& id) const {
        for (std::size_t i = 0; i < pipes.size(); ++i)
            if (pipes[i].id == id) return i;
        throw Error(ErrorKind::Argument, "unknown pipe '" + id + "'");
    }

    /// Pipes adjacent to a node, in declaration order (fixed for determinism).
    std::vector<Adjacency> adjacent(std::size_t node) const {
        std::vector<Adjacency> adj;
        for (std::size_t k = 0; k < pipes.size(); ++k) {
            if (pipes[k].from == node) adj.push_back({k, true});
            if (pipes[k].to == node) adj.push_back({k, false});
        }
        return adj;
    }

    /// Compression ratio schedule applied at a pipe end adjacent to a node.
    /// Only pipe starts can carry a compressor; everything else is mu = 1.
    double mu_at(const Adjacency& a, double t) const {
        const Pipe& p = pipes[a.pipe];
        if (a.at_start && p.compressor) return compressors[*p.compressor].ratio(t);
        return 1.0;
    }
};

/// Well-posedness checks. Report style: collects every violation instead of
/// stopping at the first.
inline ValidationReport validate(const Network& net) {
    ValidationReport rep;
    auto flag = [&rep](const std::string& v) { rep.violations.push_back(v); };

    if (net.nodes.empty()) flag("network has no nodes");
    if (net.pipes.empty()) flag("network has no pipes");

    bool has_slack = false;
    for (const auto& n : net.nodes)
        if (n.kind == NodeKind::Slack) has_slack = true;
    if (!has_slack && !net.nodes.empty()) flag("no slack node: at least one pressure boundary is required");

    for (std::size_t k = 0; k < net.pipes.size(); ++k) {
        const Pipe& p = net.pipes[k];
        if (!(p.diameter > 0.0)) flag("pipe " + p.id + ": diameter must be positive");
        if (!(p.length > 0.0)) flag("pipe " + p.id + ": length must be positive");
        if (!(p.friction > 0.0)) flag("pipe " + p.id + ": friction factor must be positive");
        if (p.from >= net.nodes.size() || p.to >= net.nodes.size())
            flag("pipe " + p.id + ": endpoint node out of range");
        else if (p.from == p.to)
            flag("pipe " + p.id + ": self-loop");
        if (p.compressor && *p.compressor >= net.compressors.size())
            flag("pipe " + p.id + ": dangling compressor reference");
    }

    for (const auto& c : net.compressors) {
        if (c.pipe >= net.pipes.size()) {
            flag("compressor " + c.id + ": references nonexistent pipe");
            continue;
        }
        if (c.ratio.min_value() < 1.0)
            flag("compressor " + c.id + ": ratio schedule dips below 1");
    }

    // connectivity (undirected reachability from node 0)
    if (!net.nodes.empty()) {
        std::vector<bool> seen(net.nodes.size(), false);
        std::vector<std::size_t> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            std::size_t q = stack.back();
            stack.pop_back();
            for (const auto& a : net.adjacent(q)) {
                const Pipe& p = net.pipes[a.pipe];
                if (p.from >= net.nodes.size() || p.to >= net.nodes.size()) continue;
                std::size_t other = a.at_start ? p.to : p.from;
                if (!seen[other]) {
                    seen[other] = true;
                    stack.push_back(other);
                }
            }
        }
        for (std::size_t q = 0; q < net.nodes.size(); ++q)
            if (!seen[q]) flag("node " + net.nodes[q].id + ": disconnected from the network");
    }

    const double horizon = 86400.0;
    for (const auto& n : net.nodes) {
        if (n.kind == NodeKind::Slack) {
            if (!n.pressure && !n.supply_density)
                flag("slack node " + n.id + ": needs a pressure or supply-density schedule");
            if (net.gas.size() > 1 && !n.composition)
                flag("slack node " + n.id + ": needs a supply composition");
        } else {
            if (n.pressure || n.supply_density)
                flag("flow node " + n.id + ": pressure schedule on a non-slack node");
            bool has_inj = n.injection && !n.injection->is_zero();
            bool has_wdr = n.withdrawal && !n.withdrawal->is_zero();
            if (has_inj && net.gas.size() > 1 && !n.composition)
                flag("flow node " + n.id + ": injection without a composition");
            if (n.withdrawal && n.withdrawal->min_value() < 0.0)
                flag("flow node " + n.id + ": withdrawal schedule goes negative");
            if (n.injection && n.injection->min_value() < 0.0)
                flag("flow node " + n.id + ": injection schedule goes negative");
            // complementarity F^s(t) * F^d(t) = 0, probed on a fine grid
            if (has_inj && has_wdr) {
                bool violated = false;
                for (int i = 0; i <= 2048 && !violated; ++i) {
                    double t = horizon * static_cast<double>(i) / 2048.0;
                    if ((*n.injection)(t) > 0.0 && (*n.withdrawal)(t) > 0.0) violated = true;
                }
                if (violated)
                    flag("flow node " + n.id + ": injection and withdrawal simultaneously positive");
            }
        }
        if (n.composition) {
            for (int i = 0; i <= 64; ++i) {
                double t = horizon * static_cast<double>(i) / 64.0;
                auto c = n.composition->evaluate(t, net.gas.size());
                double sum = 0.0;
                bool neg = false;
                for (double v : c) {
                    sum += v;
                    if (v < -1.0e-12) neg = true;
                }
                if (neg || std::abs(sum - 1.0) > 1.0e-9) {
                    flag("node " + n.id + ": composition does not form valid mass fractions");
                    break;
                }
            }
        }
        for (const auto& [sp, lim] : n.c_max)
            if (!(lim > 0.0) || lim > 1.0 || sp >= net.gas.size())
                flag("node " + n.id + ": invalid concentration limit");
        if (n.p_min && !(*n.p_min > 0.0)) flag("node " + n.id + ": invalid minimum pressure");
    }

    // compressor/pipe linkage must be mutual
    for (std::size_t k = 0; k < net.pipes.size(); ++k)
        if (net.pipes[k].compressor && *net.pipes[k].compressor < net.compressors.size() &&
            net.compressors[*net.pipes[k].compressor].pipe != k)
            flag("pipe " + net.pipes[k].id + ": compressor linkage mismatch");

    return rep;
}

}  // namespace gasnet
