#include "prodrisk/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "prodrisk/error.hpp"

namespace prodrisk {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw ParseError("missing field '" + path + key + "'");
    }
    return obj.at(key);
}

double as_number(const json& value, const std::string& field) {
    if (!value.is_number()) {
        throw ParseError("field '" + field + "' must be a number");
    }
    return value.get<double>();
}

long long as_integer(const json& value, const std::string& field) {
    if (!value.is_number_integer()) {
        throw ParseError("field '" + field + "' must be an integer");
    }
    return value.get<long long>();
}

std::vector<double> as_number_array(const json& value, const std::string& field) {
    if (!value.is_array()) {
        throw ParseError("field '" + field + "' must be an array");
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < value.size(); ++k) {
        out.push_back(as_number(value[k], field + "[" + std::to_string(k) + "]"));
    }
    return out;
}

std::vector<int> as_id_array(const json& value, const std::string& field) {
    if (!value.is_array()) {
        throw ParseError("field '" + field + "' must be an array");
    }
    std::vector<int> out;
    for (std::size_t k = 0; k < value.size(); ++k) {
        out.push_back(static_cast<int>(as_integer(value[k], field + "[" + std::to_string(k) + "]")));
    }
    return out;
}

const json& require_array(const json& obj, const char* key, const std::string& path) {
    const json& value = require(obj, key, path);
    if (!value.is_array()) {
        throw ParseError("field '" + path + key + "' must be an array");
    }
    return value;
}

// Scalars broadcast to every edge; arrays must have one entry per edge.
std::vector<double> per_edge(const json& value, const std::string& field, std::size_t n_edges) {
    if (value.is_number()) {
        return std::vector<double>(n_edges, value.get<double>());
    }
    return as_number_array(value, field);
}

RateModelSpec parse_rate_model(const json& doc) {
    const json& node = require(doc, "rate_model", "");
    const json& type = require(node, "type", "rate_model.");
    if (!type.is_string()) {
        throw ParseError("field 'rate_model.type' must be a string");
    }
    const json& edges = require_array(node, "edges", "rate_model.");
    const std::string kind = type.get<std::string>();
    if (kind == "load_dependent") {
        LoadDependentModel model;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::string path = "rate_model.edges[" + std::to_string(k) + "].";
            LoadDependentParams p;
            p.repair_max = as_number(require(edges[k], "repair_max", path), path + "repair_max");
            p.repair_min = as_number(require(edges[k], "repair_min", path), path + "repair_min");
            p.down = as_number(require(edges[k], "down", path), path + "down");
            model.edges.push_back(p);
        }
        return model;
    }
    if (kind == "cluster") {
        ClusterModel model;
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const std::string path = "rate_model.edges[" + std::to_string(k) + "].";
            const json& entry = edges[k];
            ClusterParams p;
            p.workers = static_cast<int>(as_integer(require(entry, "workers", path), path + "workers"));
            if (entry.contains("mtbf") || entry.contains("mrt")) {
                const double mtbf = as_number(require(entry, "mtbf", path), path + "mtbf");
                const double mrt = as_number(require(entry, "mrt", path), path + "mrt");
                if (!(mtbf > 0.0) || !(mrt > 0.0)) {
                    throw ValidationError(path + "mtbf/mrt must be positive");
                }
                p.rate_on = 1.0 / mrt;
                p.rate_off = 1.0 / mtbf;
            } else {
                p.rate_on = as_number(require(entry, "lambda0", path), path + "lambda0");
                p.rate_off = as_number(require(entry, "lambda1", path), path + "lambda1");
            }
            model.edges.push_back(p);
        }
        return model;
    }
    throw ParseError("field 'rate_model.type' must be \"load_dependent\" or \"cluster\"");
}

InflowTable parse_inflow(const json& value, const std::string& field) {
    if (value.is_number()) {
        return InflowTable(value.get<double>());
    }
    if (!value.is_array()) {
        throw ParseError("field '" + field + "' must be a number or an array of [t, value] pairs");
    }
    std::vector<std::pair<double, double>> steps;
    for (std::size_t k = 0; k < value.size(); ++k) {
        const std::string item = field + "[" + std::to_string(k) + "]";
        if (!value[k].is_array() || value[k].size() != 2) {
            throw ParseError("field '" + item + "' must be a [t, value] pair");
        }
        steps.emplace_back(as_number(value[k][0], item), as_number(value[k][1], item));
    }
    return InflowTable(std::move(steps));
}

bool is_multiple(double horizon, double dt) {
    const double ratio = horizon / dt;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

}  // namespace

std::size_t RunConfig::step_count() const {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

void validate(RunConfig& cfg) {
    const auto& topo = cfg.topology;
    const std::size_t n_edges = topo.edge_count();

    if (!(cfg.horizon > 0.0)) {
        throw ValidationError("horizon must be positive");
    }
    if (!(cfg.dt > 0.0)) {
        throw ValidationError("dt must be positive");
    }
    if (!is_multiple(cfg.horizon, cfg.dt)) {
        throw ValidationError("horizon must be an integer multiple of dt");
    }
    for (const EdgeSpec& edge : topo.edges()) {
        const double courant = edge.velocity * cfg.dt / edge.dx();
        if (courant > 1.0 + kCflSlack) {
            std::ostringstream msg;
            msg << "CFL condition violated on edge " << edge.id << ": v*dt/dx = " << courant << " > 1";
            throw ValidationError(msg.str());
        }
    }
    if (cfg.samples < 1) {
        throw ValidationError("mc.samples must be at least 1");
    }
    for (double level : cfg.risk_levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw ValidationError("risk levels must lie in (0, 1)");
        }
    }

    std::vector<int> cluster_sizes(n_edges, 0);
    if (const auto* load = std::get_if<LoadDependentModel>(&cfg.rate_model)) {
        if (load->edges.size() != n_edges) {
            throw ValidationError("rate_model.edges must have one entry per edge");
        }
        for (std::size_t e = 0; e < n_edges; ++e) {
            const auto& p = load->edges[e];
            const auto states = topo.edge(e).state_count();
            if (states != 2 && states != 3) {
                throw ValidationError("load-dependent rates require 2 or 3 capacity states on edge " +
                                      std::to_string(topo.edge(e).id));
            }
            if (!(p.repair_max >= 0.0) || !(p.repair_min >= 0.0) || !(p.down >= 0.0)) {
                throw ValidationError("load-dependent rates must be non-negative");
            }
            if (p.repair_max < p.repair_min) {
                throw ValidationError("repair_max must be at least repair_min");
            }
        }
    } else {
        const auto& cluster = std::get<ClusterModel>(cfg.rate_model);
        if (cluster.edges.size() != n_edges) {
            throw ValidationError("rate_model.edges must have one entry per edge");
        }
        for (std::size_t e = 0; e < n_edges; ++e) {
            const auto& p = cluster.edges[e];
            if (p.workers < 1) {
                throw ValidationError("cluster size must be at least 1");
            }
            if (!(p.rate_on >= 0.0) || !(p.rate_off >= 0.0)) {
                throw ValidationError("cluster rates must be non-negative");
            }
            const auto& levels = topo.edge(e).capacities;
            bool matches = levels.size() == static_cast<std::size_t>(p.workers) + 1;
            for (std::size_t k = 0; matches && k < levels.size(); ++k) {
                matches = levels[k] == static_cast<double>(k);
            }
            if (!matches) {
                throw ValidationError("capacity levels of cluster edge " + std::to_string(topo.edge(e).id) +
                                      " must be {0, 1, ..., N}");
            }
            cluster_sizes[e] = p.workers;
        }
    }

    auto& profit = cfg.profit;
    if (!(profit.price >= 0.0)) {
        throw ValidationError("profit.price must be non-negative");
    }
    if (profit.storage_cost.empty()) {
        profit.storage_cost.assign(n_edges, 0.0);
    }
    if (profit.cluster_cost.empty()) {
        profit.cluster_cost.assign(n_edges, 0.0);
    }
    if (profit.storage_cost.size() != n_edges || profit.cluster_cost.size() != n_edges) {
        throw ValidationError("profit cost vectors must have one entry per edge");
    }
    for (std::size_t e = 0; e < n_edges; ++e) {
        if (!(profit.storage_cost[e] >= 0.0) || !(profit.cluster_cost[e] >= 0.0)) {
            throw ValidationError("profit costs must be non-negative");
        }
    }
    profit.cluster_sizes = std::move(cluster_sizes);
}

RunConfig config_from_json(const json& doc) {
    if (!doc.is_object()) {
        throw ParseError("config document must be a JSON object");
    }

    std::vector<EdgeSpec> edges;
    const json& edge_list = require_array(doc, "edges", "");
    for (std::size_t k = 0; k < edge_list.size(); ++k) {
        const std::string path = "edges[" + std::to_string(k) + "].";
        const json& item = edge_list[k];
        EdgeSpec edge;
        edge.id = static_cast<int>(as_integer(require(item, "id", path), path + "id"));
        edge.a = as_number(require(item, "a", path), path + "a");
        edge.b = as_number(require(item, "b", path), path + "b");
        edge.velocity = as_number(require(item, "v", path), path + "v");
        edge.cells = static_cast<int>(as_integer(require(item, "cells", path), path + "cells"));
        if (item.contains("capacities")) {
            edge.capacities = as_number_array(item.at("capacities"), path + "capacities");
        }
        edges.push_back(std::move(edge));
    }

    RateModelSpec rate_model = parse_rate_model(doc);
    // Cluster edges may omit their capacity list; it is always {0..N}.
    if (auto* cluster = std::get_if<ClusterModel>(&rate_model)) {
        for (std::size_t e = 0; e < edges.size() && e < cluster->edges.size(); ++e) {
            if (edges[e].capacities.empty()) {
                for (int j = 0; j <= cluster->edges[e].workers; ++j) {
                    edges[e].capacities.push_back(j);
                }
            }
        }
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (edges[k].capacities.empty() && !is_cluster(rate_model)) {
            throw ParseError("missing field 'edges[" + std::to_string(k) + "].capacities'");
        }
    }

    std::vector<NodeSpec> nodes;
    const json& node_list = require_array(doc, "nodes", "");
    for (std::size_t k = 0; k < node_list.size(); ++k) {
        const std::string path = "nodes[" + std::to_string(k) + "].";
        const json& item = node_list[k];
        NodeSpec node;
        node.id = static_cast<int>(as_integer(require(item, "id", path), path + "id"));
        node.in = item.contains("in") ? as_id_array(item.at("in"), path + "in") : std::vector<int>{};
        node.out = item.contains("out") ? as_id_array(item.at("out"), path + "out") : std::vector<int>{};
        if (item.contains("rates")) {
            node.rates = as_number_array(item.at("rates"), path + "rates");
        }
        nodes.push_back(std::move(node));
    }

    std::vector<InflowSource> inflows;
    if (doc.contains("inflows")) {
        const json& list = require_array(doc, "inflows", "");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string path = "inflows[" + std::to_string(k) + "].";
            InflowSource source;
            source.node = static_cast<int>(as_integer(require(list[k], "node", path), path + "node"));
            source.table = parse_inflow(require(list[k], "value", path), path + "value");
            inflows.push_back(std::move(source));
        }
    }

    RunConfig cfg;
    cfg.topology = NetworkTopology(std::move(edges), std::move(nodes), std::move(inflows));
    cfg.rate_model = std::move(rate_model);
    cfg.horizon = as_number(require(doc, "horizon", ""), "horizon");
    cfg.dt = as_number(require(doc, "dt", ""), "dt");

    const std::size_t n_edges = cfg.topology.edge_count();
    if (doc.contains("profit")) {
        const json& profit = doc.at("profit");
        if (!profit.is_object()) {
            throw ParseError("field 'profit' must be an object");
        }
        if (profit.contains("price")) {
            cfg.profit.price = as_number(profit.at("price"), "profit.price");
        }
        if (profit.contains("storage_cost")) {
            cfg.profit.storage_cost = per_edge(profit.at("storage_cost"), "profit.storage_cost", n_edges);
        }
        if (profit.contains("cluster_cost")) {
            cfg.profit.cluster_cost = per_edge(profit.at("cluster_cost"), "profit.cluster_cost", n_edges);
        }
    }
    if (doc.contains("mc")) {
        const json& mc = doc.at("mc");
        if (mc.contains("samples")) {
            const long long samples = as_integer(mc.at("samples"), "mc.samples");
            if (samples < 1) {
                throw ValidationError("mc.samples must be at least 1");
            }
            cfg.samples = static_cast<std::size_t>(samples);
        }
        if (mc.contains("seed")) {
            const json& seed = mc.at("seed");
            if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
                throw ParseError("field 'mc.seed' must be an integer");
            }
            cfg.seed = seed.get<std::uint64_t>();
        }
    }
    if (doc.contains("risk_levels")) {
        cfg.risk_levels = as_number_array(doc.at("risk_levels"), "risk_levels");
    }

    validate(cfg);
    return cfg;
}

RunConfig parse_config(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("malformed JSON: ") + err.what());
    }
    return config_from_json(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

json to_json(const RunConfig& cfg) {
    json doc;
    json edges = json::array();
    for (const EdgeSpec& edge : cfg.topology.edges()) {
        edges.push_back({{"id", edge.id},
                         {"a", edge.a},
                         {"b", edge.b},
                         {"v", edge.velocity},
                         {"capacities", edge.capacities},
                         {"cells", edge.cells}});
    }
    doc["edges"] = std::move(edges);

    json nodes = json::array();
    for (const NodeSpec& node : cfg.topology.nodes()) {
        nodes.push_back({{"id", node.id}, {"in", node.in}, {"out", node.out}, {"rates", node.rates}});
    }
    doc["nodes"] = std::move(nodes);

    json inflows = json::array();
    for (const InflowSource& source : cfg.topology.inflows()) {
        json value;
        if (source.table.is_constant()) {
            value = source.table.steps().front().second;
        } else {
            value = json::array();
            for (const auto& [t, v] : source.table.steps()) {
                value.push_back({t, v});
            }
        }
        inflows.push_back({{"node", source.node}, {"value", value}});
    }
    doc["inflows"] = std::move(inflows);

    json rate_edges = json::array();
    if (const auto* load = std::get_if<LoadDependentModel>(&cfg.rate_model)) {
        for (const auto& p : load->edges) {
            rate_edges.push_back({{"repair_max", p.repair_max}, {"repair_min", p.repair_min}, {"down", p.down}});
        }
        doc["rate_model"] = {{"type", "load_dependent"}, {"edges", std::move(rate_edges)}};
    } else {
        for (const auto& p : std::get<ClusterModel>(cfg.rate_model).edges) {
            rate_edges.push_back({{"workers", p.workers}, {"lambda0", p.rate_on}, {"lambda1", p.rate_off}});
        }
        doc["rate_model"] = {{"type", "cluster"}, {"edges", std::move(rate_edges)}};
    }

    doc["horizon"] = cfg.horizon;
    doc["dt"] = cfg.dt;
    doc["profit"] = {{"price", cfg.profit.price},
                     {"storage_cost", cfg.profit.storage_cost},
                     {"cluster_cost", cfg.profit.cluster_cost}};
    doc["mc"] = {{"samples", cfg.samples}, {"seed", cfg.seed}};
    doc["risk_levels"] = cfg.risk_levels;
    return doc;
}

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2); }

SystemState initial_state(const RunConfig& cfg) {
    const auto& topo = cfg.topology;
    SystemState state;
    state.r.reserve(topo.edge_count());
    for (const EdgeSpec& edge : topo.edges()) {
        state.r.push_back(edge.state_count() - 1);
        state.rho.emplace_back(static_cast<std::size_t>(edge.cells), 0.0);
    }
    state.q.assign(topo.edge_count(), 0.0);
    return state;
}

double total_mass(const RunConfig& cfg, const SystemState& state) {
    double mass = 0.0;
    for (std::size_t e = 0; e < cfg.topology.edge_count(); ++e) {
        mass += state.q[e];
        double cells = 0.0;
        for (double rho : state.rho[e]) {
            cells += rho;
        }
        mass += cells * cfg.topology.edge(e).dx();
    }
    return mass;
}

}  // namespace prodrisk
