#include "prodrisk/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "prodrisk/format.hpp"

namespace prodrisk {

void step_edge(std::span<double> rho, double velocity, double capacity, double outflow, double dt, double dx) {
    const double ratio = dt / dx;
    double left_flux = outflow;
    for (double& cell : rho) {
        const double right_flux = flux(cell, velocity, capacity);
        cell -= ratio * (right_flux - left_flux);
        // Under the CFL bound only rounding can push a cell below zero.
        if (cell < 0.0) {
            cell = 0.0;
        }
        left_flux = right_flux;
    }
}

double FluxTrace::total_exit_flow(std::size_t step) const {
    double total = 0.0;
    for (std::size_t k = 0; k < sinks; ++k) {
        total += exit_flow[step * sinks + k];
    }
    return total;
}

void FluxTrace::reserve(std::size_t n) {
    time.reserve(n);
    inflow.reserve(n);
    for (auto* field : {&g_in, &g_out, &boundary_outflow, &queue, &capacity, &mean_density}) {
        field->reserve(n * edges);
    }
    exit_flow.reserve(n * sinks);
}

FluxTrace make_trace(const RunConfig& cfg) {
    FluxTrace trace(cfg.topology.edge_count(), cfg.topology.sinks().size(), cfg.dt);
    trace.reserve(cfg.step_count());
    return trace;
}

void advance(SystemState& state, const RunConfig& cfg, std::size_t target_step, FluxTrace& trace) {
    const NetworkTopology& topo = cfg.topology;
    const std::size_t n_edges = topo.edge_count();
    const double dt = cfg.dt;

    std::vector<double> capacity(n_edges);
    std::vector<double> boundary(n_edges);
    std::vector<double> inflow(n_edges);
    std::vector<double> outflow(n_edges);

    while (state.step < target_step) {
        const double t = state.time;

        for (std::size_t e = 0; e < n_edges; ++e) {
            const EdgeSpec& edge = topo.edge(e);
            capacity[e] = edge.capacities[state.r[e]];
            boundary[e] = flux(state.rho[e].back(), edge.velocity, capacity[e]);
        }

        double external = 0.0;
        for (const InflowSource& source : topo.inflows()) {
            external += source.table.value(t);
        }

        for (std::size_t e = 0; e < n_edges; ++e) {
            double arriving = 0.0;
            if (auto source = topo.source_of(e)) {
                arriving = topo.inflows()[*source].table.value(t);
            } else {
                for (std::size_t u : topo.upstream(e)) {
                    arriving += boundary[u];
                }
            }
            inflow[e] = topo.routing_rate(e) * arriving;
            outflow[e] = queue_outflow(inflow[e], state.q[e], capacity[e], dt);
        }

        trace.time.push_back(t);
        trace.inflow.push_back(external);
        for (std::size_t e = 0; e < n_edges; ++e) {
            trace.g_in.push_back(inflow[e]);
            trace.g_out.push_back(outflow[e]);
            trace.boundary_outflow.push_back(boundary[e]);
            trace.queue.push_back(state.q[e]);
            trace.capacity.push_back(capacity[e]);
            double sum = 0.0;
            for (double rho : state.rho[e]) {
                sum += rho;
            }
            trace.mean_density.push_back(sum / static_cast<double>(state.rho[e].size()));
        }
        for (std::size_t k = 0; k < topo.sinks().size(); ++k) {
            double exit = 0.0;
            for (std::size_t e : topo.sink_edges(k)) {
                exit += boundary[e];
            }
            trace.exit_flow.push_back(exit);
        }

        for (std::size_t e = 0; e < n_edges; ++e) {
            const EdgeSpec& edge = topo.edge(e);
            step_edge(state.rho[e], edge.velocity, capacity[e], outflow[e], dt, edge.dx());
            state.q[e] = step_queue(state.q[e], inflow[e], outflow[e], dt);
            if (state.q[e] < 0.0) {
                state.q[e] = 0.0;
            }
        }

        ++state.step;
        state.time = static_cast<double>(state.step) * dt;
    }
}

FluxTrace evolve(SystemState& state, const RunConfig& cfg, double until) {
    if (until < state.time) {
        throw std::invalid_argument("evolve: target time precedes the current state");
    }
    const double steps = until / cfg.dt;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps)) {
        throw std::invalid_argument("evolve: target time is not on the dt grid");
    }
    FluxTrace trace(cfg.topology.edge_count(), cfg.topology.sinks().size(), cfg.dt);
    advance(state, cfg, static_cast<std::size_t>(rounded), trace);
    return trace;
}

void write_time_series(std::ostream& out, const RunConfig& cfg, const FluxTrace& trace) {
    const auto& edges = cfg.topology.edges();
    out << "t";
    for (const auto& edge : edges) {
        out << ",q_" << edge.id;
    }
    for (const auto& edge : edges) {
        out << ",rho_" << edge.id;
    }
    out << ",exit\n";
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        out << format_csv(trace.time[n]);
        for (std::size_t e = 0; e < trace.edges; ++e) {
            out << ',' << format_csv(trace.at(trace.queue, n, e));
        }
        for (std::size_t e = 0; e < trace.edges; ++e) {
            out << ',' << format_csv(trace.at(trace.mean_density, n, e));
        }
        out << ',' << format_csv(trace.total_exit_flow(n)) << '\n';
    }
}

}  // namespace prodrisk
