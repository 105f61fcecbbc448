#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "prodrisk/config.hpp"
#include "prodrisk/rng.hpp"
#include "prodrisk/solver.hpp"

namespace prodrisk {

/// A capacity change of one edge. `time` is the accepted proposal time of
/// the thinning scheme; the state change itself is applied on the dt grid.
struct JumpEvent {
    double time = 0.0;
    std::size_t edge = 0;
    std::size_t from = 0;
    std::size_t to = 0;

    friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

// Load statistics ----------------------------------------------------------

/// Utilization ratio of an edge evaluated in capacity state `state`.
double utilization_ratio(const EdgeSpec& edge, std::size_t state, std::span<const double> rho);

/// Work in progress relative to the largest capacity; exceeds 1 when a
/// processor holds more than its top throughput.
double work_in_progress_ratio(const EdgeSpec& edge, std::span<const double> rho);

// Transition rates ---------------------------------------------------------
// Each returns one rate per target state; the entry of the current state is 0.

/// Load-dependent rates of a 2- or 3-state processor. Repairs jump to the
/// top state; breakdowns from the top state may land on any lower state.
std::vector<double> load_dependent_rates(const EdgeSpec& edge, const LoadDependentParams& params,
                                         std::size_t state, std::span<const double> rho);

/// Birth-death rates of a worker cluster with `workers_on` available.
std::vector<double> cluster_rates(const ClusterParams& params, std::size_t workers_on);

std::vector<double> transition_rates(const RunConfig& cfg, const SystemState& state, std::size_t edge);

/// Total jump intensity of the current state (sum of all exit rates).
double jump_intensity(const RunConfig& cfg, const SystemState& state);

/// Draws the post-jump capacity state with probability proportional to the
/// transition rates and applies it. Only `state.r` changes. Throws
/// std::logic_error when the intensity is zero.
JumpEvent sample_jump(const RunConfig& cfg, SystemState& state, RngStream& rng);

/// Uniform upper bound on jump_intensity over all reachable states.
double thinning_bound(const RunConfig& cfg);

struct PathResult {
    std::vector<JumpEvent> jumps;
    FluxTrace trace;
    SystemState final_state;
};

/// One sample path on [0, horizon] by thinning: Exp(bound) proposals,
/// acceptance with probability intensity / bound, evaluated on the state of
/// the last completed grid step.
PathResult simulate_path(const RunConfig& cfg, RngStream& rng);

/// JSON array of {t, edge, from, to}; edge is the edge id, states 1-based.
void write_jump_log(std::ostream& out, const RunConfig& cfg, std::span<const JumpEvent> jumps);

// Cluster analytics --------------------------------------------------------

/// P(worker on at t) for a worker that starts on.
double worker_availability(double rate_on, double rate_off, double t);

/// Law of the number of available workers at time t when all start on:
/// Bin(N, worker_availability(t)), indexed by worker count 0..N.
std::vector<double> ctmc_binomial_law(int workers, double rate_on, double rate_off, double t);

/// Generator of the (N+1)-state worker-count chain, row-major.
std::vector<double> cluster_generator(int workers, double rate_on, double rate_off);

/// Long-run mean capacity N rate_on / (rate_on + rate_off).
double steady_state_mean_capacity(int workers, double rate_on, double rate_off);

}  // namespace prodrisk
