#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace prodrisk {

/// One queue-processor unit. The processor occupies (a, b) and transports
/// goods with velocity `velocity`; `capacities` lists the admissible
/// capacity levels in ascending order.
struct EdgeSpec {
    int id = 0;
    double a = 0.0;
    double b = 1.0;
    double velocity = 1.0;
    std::vector<double> capacities;
    int cells = 1;

    double length() const { return b - a; }
    double dx() const { return length() / cells; }
    double max_capacity() const { return capacities.back(); }
    std::size_t state_count() const { return capacities.size(); }

    friend bool operator==(const EdgeSpec&, const EdgeSpec&) = default;
};

/// A vertex with its incoming and outgoing edge ids. `rates[k]` is the share
/// of the node's throughput routed into `out[k]`.
struct NodeSpec {
    int id = 0;
    std::vector<int> in;
    std::vector<int> out;
    std::vector<double> rates;

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

/// Piecewise-constant external inflow. `value(t)` returns the value of the
/// last breakpoint at or before t; the first breakpoint is always t = 0.
class InflowTable {
public:
    InflowTable() = default;
    explicit InflowTable(double constant);
    explicit InflowTable(std::vector<std::pair<double, double>> steps);

    double value(double t) const;
    const std::vector<std::pair<double, double>>& steps() const { return steps_; }
    bool is_constant() const { return steps_.size() == 1; }

    friend bool operator==(const InflowTable&, const InflowTable&) = default;

private:
    std::vector<std::pair<double, double>> steps_{{0.0, 0.0}};
};

struct InflowSource {
    int node = 0;
    InflowTable table;

    friend bool operator==(const InflowSource&, const InflowSource&) = default;
};

/// Validated, immutable production network. Edges are addressed by their
/// position (0-based index) internally; ids are kept for I/O.
class NetworkTopology {
public:
    NetworkTopology() = default;

    /// Throws ValidationError on any structural defect: unknown or dangling
    /// edge references, routing rates that do not sum to one, cycles,
    /// inflow at a node with predecessors.
    NetworkTopology(std::vector<EdgeSpec> edges,
                    std::vector<NodeSpec> nodes,
                    std::vector<InflowSource> inflows);

    const std::vector<EdgeSpec>& edges() const { return edges_; }
    const std::vector<NodeSpec>& nodes() const { return nodes_; }
    const std::vector<InflowSource>& inflows() const { return inflows_; }

    std::size_t edge_count() const { return edges_.size(); }
    const EdgeSpec& edge(std::size_t e) const { return edges_[e]; }
    std::optional<std::size_t> find_edge(int id) const;
    std::optional<std::size_t> find_node(int id) const;

    std::size_t start_node(std::size_t e) const { return start_node_[e]; }
    std::size_t end_node(std::size_t e) const { return end_node_[e]; }
    /// A^{s(e),e}: share of the start node's throughput routed into e.
    double routing_rate(std::size_t e) const { return routing_rate_[e]; }
    /// Edges feeding the start node of e.
    const std::vector<std::size_t>& upstream(std::size_t e) const { return upstream_[e]; }
    /// Index into inflows() when e leaves an inflow source.
    std::optional<std::size_t> source_of(std::size_t e) const { return source_of_[e]; }

    /// Nodes without outgoing edges, in node order.
    const std::vector<std::size_t>& sinks() const { return sinks_; }
    /// Edges entering sinks()[k].
    const std::vector<std::size_t>& sink_edges(std::size_t k) const { return sink_edges_[k]; }

    /// Copy with the routing rates of one node replaced (validated again).
    NetworkTopology with_rates(int node_id, std::vector<double> rates) const;
    /// Copy with the capacity levels of one edge replaced (validated again).
    NetworkTopology with_capacities(std::size_t e, std::vector<double> capacities) const;

    friend bool operator==(const NetworkTopology& lhs, const NetworkTopology& rhs) {
        return lhs.edges_ == rhs.edges_ && lhs.nodes_ == rhs.nodes_ && lhs.inflows_ == rhs.inflows_;
    }

private:
    void build();

    std::vector<EdgeSpec> edges_;
    std::vector<NodeSpec> nodes_;
    std::vector<InflowSource> inflows_;

    std::vector<std::size_t> start_node_;
    std::vector<std::size_t> end_node_;
    std::vector<double> routing_rate_;
    std::vector<std::vector<std::size_t>> upstream_;
    std::vector<std::optional<std::size_t>> source_of_;
    std::vector<std::size_t> sinks_;
    std::vector<std::vector<std::size_t>> sink_edges_;
};

/// Absolute tolerance on the sum of routing rates at a branching node.
inline constexpr double kRoutingSumTolerance = 1e-12;

}  // namespace prodrisk
