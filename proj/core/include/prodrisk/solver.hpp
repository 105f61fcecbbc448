#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "prodrisk/config.hpp"

namespace prodrisk {

/// Processor flux min{v rho, mu}.
inline double flux(double rho, double velocity, double capacity) {
    const double demand = velocity * rho;
    return demand < capacity ? demand : capacity;
}

/// Discrete queue discharge min(mu, g_in + q / dt). Equals min(g_in, mu) for
/// an empty queue and mu for a backlog that outlasts the step; never drains
/// more than the queue holds.
inline double queue_outflow(double inflow, double queue, double capacity, double dt) {
    const double available = inflow + queue / dt;
    return available < capacity ? available : capacity;
}

/// Forward-Euler queue balance q + dt (g_in - g_out).
inline double step_queue(double queue, double inflow, double outflow, double dt) {
    return queue + dt * (inflow - outflow);
}

/// One left-sided upwind step of the processor densities in place. The
/// queue discharge `outflow` is the flux through the left boundary.
void step_edge(std::span<double> rho, double velocity, double capacity, double outflow, double dt, double dx);

/// Per-step record of the network flows, stored row-major (step x edge).
/// Step n describes the interval [t_n, t_n + dt) with the state at t_n.
struct FluxTrace {
    double dt = 0.0;
    std::size_t edges = 0;
    std::size_t sinks = 0;

    std::vector<double> time;
    std::vector<double> inflow;            // total external inflow
    std::vector<double> g_in;              // queue inflow
    std::vector<double> g_out;             // queue discharge into the processor
    std::vector<double> boundary_outflow;  // min{v rho(b), mu}
    std::vector<double> queue;
    std::vector<double> capacity;          // mu(r) in force during the step
    std::vector<double> mean_density;
    std::vector<double> exit_flow;         // step x sink

    FluxTrace() = default;
    FluxTrace(std::size_t n_edges, std::size_t n_sinks, double step) : dt(step), edges(n_edges), sinks(n_sinks) {}

    std::size_t steps() const { return time.size(); }
    double at(const std::vector<double>& field, std::size_t step, std::size_t edge) const {
        return field[step * edges + edge];
    }
    double total_exit_flow(std::size_t step) const;
    void reserve(std::size_t steps);
};

FluxTrace make_trace(const RunConfig& cfg);

/// Advances `state` on the dt grid up to step index `target_step`, holding
/// the capacity states fixed, and appends one record per step to `trace`.
void advance(SystemState& state, const RunConfig& cfg, std::size_t target_step, FluxTrace& trace);

/// Deterministic flow from state.time to `until`; `until` must be on the
/// dt grid and not earlier than state.time.
FluxTrace evolve(SystemState& state, const RunConfig& cfg, double until);

/// CSV time series: t, q_<id>..., rho_<id>..., exit.
void write_time_series(std::ostream& out, const RunConfig& cfg, const FluxTrace& trace);

}  // namespace prodrisk
