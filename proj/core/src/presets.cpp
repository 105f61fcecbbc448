#include "prodrisk/presets.hpp"

#include <cmath>

namespace prodrisk {

RunConfig diamond_preset(const DiamondOptions& options) {
    const int cells = static_cast<int>(std::lround(1.0 / options.dt));
    auto edge = [cells](int id, std::vector<double> capacities) {
        return EdgeSpec{id, 0.0, 1.0, 1.0, std::move(capacities), cells};
    };
    std::vector<EdgeSpec> edges{
        edge(1, {0, 3}),    edge(2, {0, 1, 2}), edge(3, {0, 1, 2}), edge(4, {0, 1}),
        edge(5, {0, 2}),    edge(6, {0, 1, 3}), edge(7, {0, 2, 3}),
    };
    std::vector<NodeSpec> nodes{
        {1, {}, {1}, {1.0}},
        {kDiamondAlpha1Node, {1}, {2, 3}, {options.alpha1, 1.0 - options.alpha1}},
        {kDiamondAlpha2Node, {2}, {5, 4}, {options.alpha2, 1.0 - options.alpha2}},
        {4, {3, 4}, {6}, {1.0}},
        {5, {5, 6}, {7}, {1.0}},
        {6, {7}, {}, {}},
    };
    std::vector<InflowSource> inflows{{1, InflowTable(1.5)}};

    const LoadDependentParams two_state{10.0, 4.0, 1.0};
    const LoadDependentParams three_state{10.0, 4.0, 2.0};

    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), std::move(inflows));
    cfg.rate_model = LoadDependentModel{{two_state, three_state, three_state, two_state, two_state, three_state,
                                         three_state}};
    cfg.horizon = options.horizon;
    cfg.dt = options.dt;
    cfg.profit.price = 1.0;
    cfg.profit.storage_cost.assign(7, 0.1);
    cfg.samples = options.samples;
    cfg.seed = options.seed;
    cfg.risk_levels = {0.1};
    validate(cfg);
    return cfg;
}

RunConfig serial2_preset(const Serial2Options& options) {
    auto levels = [](int workers) {
        std::vector<double> out;
        for (int j = 0; j <= workers; ++j) {
            out.push_back(j);
        }
        return out;
    };
    std::vector<EdgeSpec> edges{
        {1, 0.0, 1.0, 1.0, levels(options.workers1), 1},
        {2, 0.0, 1.0, 1.0, levels(options.workers2), 1},
    };
    std::vector<NodeSpec> nodes{
        {1, {}, {1}, {1.0}},
        {2, {1}, {2}, {1.0}},
        {3, {2}, {}, {}},
    };
    std::vector<InflowSource> inflows{{1, InflowTable(10.0)}};

    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), std::move(inflows));
    cfg.rate_model = ClusterModel{{
        {options.workers1, 1.0 / 10.0, 1.0 / 80.0},
        {options.workers2, 1.0 / 20.0, 1.0 / 50.0},
    }};
    cfg.horizon = options.horizon;
    cfg.dt = 1.0;
    cfg.profit.price = 10.02;
    cfg.profit.storage_cost = {0.01, 0.01};
    cfg.profit.cluster_cost = {4.0, 6.0};
    cfg.samples = options.samples;
    cfg.seed = options.seed;
    cfg.risk_levels = {0.1, 0.01};
    validate(cfg);
    return cfg;
}

std::optional<RunConfig> preset_by_name(std::string_view name) {
    if (name == "diamond") {
        return diamond_preset();
    }
    if (name == "serial2") {
        return serial2_preset();
    }
    return std::nullopt;
}

}  // namespace prodrisk
