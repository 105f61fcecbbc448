#include "prodrisk/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <string>

#include "prodrisk/error.hpp"

namespace prodrisk {

namespace {

std::string edge_label(const EdgeSpec& edge) { return "edge " + std::to_string(edge.id); }

void validate_edge(const EdgeSpec& edge) {
    if (!(edge.b > edge.a)) {
        throw ValidationError(edge_label(edge) + ": interval end b must exceed start a");
    }
    if (!(edge.velocity > 0.0)) {
        throw ValidationError(edge_label(edge) + ": velocity must be positive");
    }
    if (edge.cells < 1) {
        throw ValidationError(edge_label(edge) + ": cells must be at least 1");
    }
    if (edge.capacities.empty()) {
        throw ValidationError(edge_label(edge) + ": capacity levels must be non-empty");
    }
    for (std::size_t k = 0; k < edge.capacities.size(); ++k) {
        const double mu = edge.capacities[k];
        if (!(mu >= 0.0) || !std::isfinite(mu)) {
            throw ValidationError(edge_label(edge) + ": capacity levels must be finite and non-negative");
        }
        if (k > 0 && !(mu > edge.capacities[k - 1])) {
            throw ValidationError(edge_label(edge) + ": capacity levels must be strictly increasing");
        }
    }
}

}  // namespace

InflowTable::InflowTable(double constant) : steps_{{0.0, constant}} {
    if (!(constant >= 0.0)) {
        throw ValidationError("inflow values must be non-negative");
    }
}

InflowTable::InflowTable(std::vector<std::pair<double, double>> steps) : steps_(std::move(steps)) {
    if (steps_.empty() || steps_.front().first != 0.0) {
        throw ValidationError("inflow table must start at t = 0");
    }
    for (std::size_t k = 0; k < steps_.size(); ++k) {
        if (!(steps_[k].second >= 0.0)) {
            throw ValidationError("inflow values must be non-negative");
        }
        if (k > 0 && !(steps_[k].first > steps_[k - 1].first)) {
            throw ValidationError("inflow breakpoints must be strictly increasing");
        }
    }
}

double InflowTable::value(double t) const {
    auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                               [](double time, const auto& step) { return time < step.first; });
    if (it == steps_.begin()) {
        return steps_.front().second;
    }
    return std::prev(it)->second;
}

NetworkTopology::NetworkTopology(std::vector<EdgeSpec> edges,
                                 std::vector<NodeSpec> nodes,
                                 std::vector<InflowSource> inflows)
    : edges_(std::move(edges)), nodes_(std::move(nodes)), inflows_(std::move(inflows)) {
    build();
}

std::optional<std::size_t> NetworkTopology::find_edge(int id) const {
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        if (edges_[e].id == id) {
            return e;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> NetworkTopology::find_node(int id) const {
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].id == id) {
            return v;
        }
    }
    return std::nullopt;
}

NetworkTopology NetworkTopology::with_rates(int node_id, std::vector<double> rates) const {
    auto v = find_node(node_id);
    if (!v) {
        throw ValidationError("unknown node " + std::to_string(node_id));
    }
    auto nodes = nodes_;
    nodes[*v].rates = std::move(rates);
    return NetworkTopology(edges_, std::move(nodes), inflows_);
}

NetworkTopology NetworkTopology::with_capacities(std::size_t e, std::vector<double> capacities) const {
    auto edges = edges_;
    edges.at(e).capacities = std::move(capacities);
    return NetworkTopology(std::move(edges), nodes_, inflows_);
}

void NetworkTopology::build() {
    const std::size_t n_edges = edges_.size();
    std::map<int, std::size_t> edge_index;
    for (std::size_t e = 0; e < n_edges; ++e) {
        validate_edge(edges_[e]);
        if (!edge_index.emplace(edges_[e].id, e).second) {
            throw ValidationError("duplicate edge id " + std::to_string(edges_[e].id));
        }
    }

    std::map<int, std::size_t> node_index;
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (!node_index.emplace(nodes_[v].id, v).second) {
            throw ValidationError("duplicate node id " + std::to_string(nodes_[v].id));
        }
    }

    constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
    start_node_.assign(n_edges, kUnset);
    end_node_.assign(n_edges, kUnset);
    routing_rate_.assign(n_edges, 0.0);

    auto resolve = [&](int id, const NodeSpec& node) {
        auto it = edge_index.find(id);
        if (it == edge_index.end()) {
            throw ValidationError("node " + std::to_string(node.id) + " references unknown edge " +
                                  std::to_string(id));
        }
        return it->second;
    };

    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        NodeSpec& node = nodes_[v];
        const std::string label = "node " + std::to_string(node.id);
        if (node.rates.empty() && node.out.size() == 1) {
            node.rates = {1.0};
        }
        if (node.rates.size() != node.out.size()) {
            throw ValidationError(label + ": routing rates must match the number of outgoing edges");
        }
        if (!node.out.empty()) {
            double sum = 0.0;
            for (double rate : node.rates) {
                if (!(rate >= 0.0 && rate <= 1.0)) {
                    throw ValidationError(label + ": routing rates must lie in [0, 1]");
                }
                sum += rate;
            }
            if (std::abs(sum - 1.0) > kRoutingSumTolerance) {
                throw ValidationError(label + ": routing rates must sum to 1");
            }
        }
        for (std::size_t k = 0; k < node.out.size(); ++k) {
            const std::size_t e = resolve(node.out[k], node);
            if (start_node_[e] != kUnset) {
                throw ValidationError("edge " + std::to_string(node.out[k]) + " leaves more than one node");
            }
            start_node_[e] = v;
            routing_rate_[e] = node.rates[k];
        }
        for (int id : node.in) {
            const std::size_t e = resolve(id, node);
            if (end_node_[e] != kUnset) {
                throw ValidationError("edge " + std::to_string(id) + " enters more than one node");
            }
            end_node_[e] = v;
        }
    }
    for (std::size_t e = 0; e < n_edges; ++e) {
        if (start_node_[e] == kUnset || end_node_[e] == kUnset) {
            throw ValidationError(edge_label(edges_[e]) + " must have exactly one start and one end node");
        }
    }

    upstream_.assign(n_edges, {});
    for (std::size_t e = 0; e < n_edges; ++e) {
        for (int id : nodes_[start_node_[e]].in) {
            upstream_[e].push_back(edge_index.at(id));
        }
    }

    source_of_.assign(n_edges, std::nullopt);
    std::vector<bool> has_source(nodes_.size(), false);
    for (std::size_t k = 0; k < inflows_.size(); ++k) {
        auto it = node_index.find(inflows_[k].node);
        if (it == node_index.end()) {
            throw ValidationError("inflow references unknown node " + std::to_string(inflows_[k].node));
        }
        const NodeSpec& node = nodes_[it->second];
        if (!node.in.empty()) {
            throw ValidationError("inflow node " + std::to_string(node.id) + " must not have incoming edges");
        }
        if (node.out.empty()) {
            throw ValidationError("inflow node " + std::to_string(node.id) + " must have outgoing edges");
        }
        if (has_source[it->second]) {
            throw ValidationError("node " + std::to_string(node.id) + " has more than one inflow");
        }
        has_source[it->second] = true;
        for (int id : node.out) {
            source_of_[edge_index.at(id)] = k;
        }
    }

    sinks_.clear();
    sink_edges_.clear();
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (nodes_[v].out.empty()) {
            sinks_.push_back(v);
            std::vector<std::size_t> incoming;
            for (int id : nodes_[v].in) {
                incoming.push_back(edge_index.at(id));
            }
            sink_edges_.push_back(std::move(incoming));
        }
    }

    // Kahn's algorithm over nodes; an unvisited node means a cycle.
    std::vector<std::size_t> indegree(nodes_.size(), 0);
    for (std::size_t e = 0; e < n_edges; ++e) {
        ++indegree[end_node_[e]];
    }
    std::queue<std::size_t> ready;
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        if (indegree[v] == 0) {
            ready.push(v);
        }
    }
    std::size_t visited = 0;
    while (!ready.empty()) {
        const std::size_t v = ready.front();
        ready.pop();
        ++visited;
        for (int id : nodes_[v].out) {
            if (--indegree[end_node_[edge_index.at(id)]] == 0) {
                ready.push(end_node_[edge_index.at(id)]);
            }
        }
    }
    if (visited != nodes_.size()) {
        throw ValidationError("network must be acyclic");
    }
}

}  // namespace prodrisk
