#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "prodrisk/config.hpp"

namespace prodrisk::testing {

// One processor on (0, 1) behind a queue, fed with a constant inflow.
// Rates default to zero, so the capacity never changes.
inline RunConfig single_edge(double inflow, std::vector<double> capacities, double dt, double horizon,
                             int cells, double velocity = 1.0) {
    std::vector<EdgeSpec> edges{{1, 0.0, 1.0, velocity, std::move(capacities), cells}};
    std::vector<NodeSpec> nodes{{1, {}, {1}, {1.0}}, {2, {1}, {}, {}}};
    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), {{1, InflowTable(inflow)}});
    cfg.rate_model = LoadDependentModel{{{0.0, 0.0, 0.0}}};
    cfg.horizon = horizon;
    cfg.dt = dt;
    cfg.profit.price = 1.0;
    cfg.samples = 1;
    cfg.seed = 1;
    validate(cfg);
    return cfg;
}

// A single worker cluster on one edge; capacity = workers available.
inline RunConfig single_cluster(int workers, double rate_on, double rate_off, double horizon, double dt = 1.0,
                                double inflow = 0.0) {
    std::vector<double> levels;
    for (int j = 0; j <= workers; ++j) {
        levels.push_back(j);
    }
    std::vector<EdgeSpec> edges{{1, 0.0, 1.0, 1.0, levels, 1}};
    std::vector<NodeSpec> nodes{{1, {}, {1}, {1.0}}, {2, {1}, {}, {}}};
    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), {{1, InflowTable(inflow)}});
    cfg.rate_model = ClusterModel{{{workers, rate_on, rate_off}}};
    cfg.horizon = horizon;
    cfg.dt = dt;
    cfg.profit.price = 1.0;
    cfg.samples = 1;
    cfg.seed = 1;
    validate(cfg);
    return cfg;
}

struct DagOptions {
    int max_nodes = 7;
    bool stochastic = true;  // non-zero load-dependent rates
    bool stepped_inflow = true;
    std::size_t steps = 200;
};

// Random acyclic network: node 0 carries the inflow, every later node gets
// at least one edge from an earlier node, extra edges are added at random.
// dt is the largest step allowed by CFL on the slowest-resolved edge.
inline RunConfig random_dag(std::mt19937_64& gen, const DagOptions& options = {}) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> node_count(2, options.max_nodes);
    const int n = node_count(gen);

    std::vector<std::pair<int, int>> links;
    for (int j = 1; j < n; ++j) {
        links.emplace_back(std::uniform_int_distribution<int>(0, j - 1)(gen), j);
        for (int i = 0; i < j; ++i) {
            if (unit(gen) < 0.25 && !(links.back().first == i && links.back().second == j)) {
                links.emplace_back(i, j);
            }
        }
    }
    // Node 0 must not receive anything; the construction above never does that.

    std::vector<EdgeSpec> edges;
    double dt = 1.0;
    for (std::size_t k = 0; k < links.size(); ++k) {
        EdgeSpec edge;
        edge.id = static_cast<int>(k) + 1;
        edge.a = 0.0;
        edge.b = 0.5 + unit(gen);
        edge.velocity = 0.5 + 1.5 * unit(gen);
        edge.cells = std::uniform_int_distribution<int>(1, 6)(gen);
        const double top = 0.5 + 2.5 * unit(gen);
        if (unit(gen) < 0.5) {
            edge.capacities = {0.0, top};
        } else {
            edge.capacities = {0.0, top * unit(gen), top};
        }
        dt = std::min(dt, edge.dx() / edge.velocity);
        edges.push_back(edge);
    }

    std::vector<NodeSpec> nodes(n);
    for (int v = 0; v < n; ++v) {
        nodes[v].id = v + 1;
    }
    for (std::size_t k = 0; k < links.size(); ++k) {
        nodes[links[k].first].out.push_back(edges[k].id);
        nodes[links[k].second].in.push_back(edges[k].id);
    }
    for (auto& node : nodes) {
        if (node.out.empty()) {
            continue;
        }
        std::vector<double> weights;
        double total = 0.0;
        for (std::size_t k = 0; k < node.out.size(); ++k) {
            weights.push_back(0.05 + unit(gen));
            total += weights.back();
        }
        double assigned = 0.0;
        for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
            node.rates.push_back(weights[k] / total);
            assigned += node.rates.back();
        }
        node.rates.push_back(1.0 - assigned);
    }

    InflowTable inflow(0.5 + 2.0 * unit(gen));
    const double horizon = dt * static_cast<double>(options.steps);
    if (options.stepped_inflow) {
        inflow = InflowTable({{0.0, 3.0 * unit(gen)}, {0.3 * horizon, 3.0 * unit(gen)}, {0.6 * horizon, 0.0}});
    }

    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), {{1, inflow}});
    LoadDependentModel model;
    for (std::size_t k = 0; k < links.size(); ++k) {
        if (options.stochastic) {
            const double rmax = 1.0 + 9.0 * unit(gen);
            model.edges.push_back({rmax, rmax * unit(gen), 0.5 + 3.0 * unit(gen)});
        } else {
            model.edges.push_back({0.0, 0.0, 0.0});
        }
    }
    cfg.rate_model = model;
    cfg.horizon = horizon;
    cfg.dt = dt;
    cfg.profit.price = 1.0;
    cfg.profit.storage_cost.assign(links.size(), 0.05);
    cfg.samples = 1;
    cfg.seed = gen();
    cfg.risk_levels = {0.1};
    validate(cfg);
    return cfg;
}

}  // namespace prodrisk::testing
