#include "prodrisk/capacity.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace prodrisk {

namespace {

double repair_rate(const LoadDependentParams& p, double wip) {
    const double rate = p.repair_max - (p.repair_max - p.repair_min) * wip;
    return rate > 0.0 ? rate : 0.0;
}

// Rate table of the load-dependent model given the load statistics. The
// repair rate does not depend on the state; the breakdown rate uses the
// utilization evaluated in the current state.
std::vector<double> load_dependent_table(std::size_t states, std::size_t state, double repair, double breakdown) {
    std::vector<double> rates(states, 0.0);
    if (states == 2) {
        if (state == 0) {
            rates[1] = repair;
        } else {
            rates[0] = breakdown;
        }
        return rates;
    }
    if (states != 3) {
        throw std::invalid_argument("load-dependent rates need 2 or 3 capacity states");
    }
    switch (state) {
        case 0:
            rates[2] = repair;
            break;
        case 1:
            rates[0] = breakdown;
            rates[2] = repair;
            break;
        default:
            rates[0] = breakdown;
            rates[1] = breakdown;
            break;
    }
    return rates;
}

void check_cluster_args(int workers, double rate_on, double rate_off) {
    if (workers < 1) {
        throw std::invalid_argument("cluster size must be at least 1");
    }
    if (!(rate_on >= 0.0) || !(rate_off >= 0.0) || !(rate_on + rate_off > 0.0)) {
        throw std::invalid_argument("cluster rates must be non-negative and not both zero");
    }
}

}  // namespace

double utilization_ratio(const EdgeSpec& edge, std::size_t state, std::span<const double> rho) {
    const double scale = edge.max_capacity() * edge.length();
    if (scale <= 0.0) {
        return 0.0;
    }
    const double mu = edge.capacities[state];
    double sum = 0.0;
    for (double cell : rho) {
        sum += flux(cell, edge.velocity, mu);
    }
    return sum * edge.dx() / scale;
}

double work_in_progress_ratio(const EdgeSpec& edge, std::span<const double> rho) {
    const double scale = edge.max_capacity() * edge.length();
    if (scale <= 0.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (double cell : rho) {
        sum += cell;
    }
    return edge.velocity * sum * edge.dx() / scale;
}

std::vector<double> load_dependent_rates(const EdgeSpec& edge, const LoadDependentParams& params,
                                         std::size_t state, std::span<const double> rho) {
    const std::size_t states = edge.state_count();
    const double repair = repair_rate(params, work_in_progress_ratio(edge, rho));
    const double breakdown = state > 0 ? params.down * utilization_ratio(edge, state, rho) : 0.0;
    return load_dependent_table(states, state, repair, breakdown);
}

std::vector<double> cluster_rates(const ClusterParams& params, std::size_t workers_on) {
    const auto n = static_cast<std::size_t>(params.workers);
    std::vector<double> rates(n + 1, 0.0);
    if (workers_on < n) {
        rates[workers_on + 1] = static_cast<double>(n - workers_on) * params.rate_on;
    }
    if (workers_on > 0) {
        rates[workers_on - 1] = static_cast<double>(workers_on) * params.rate_off;
    }
    return rates;
}

std::vector<double> transition_rates(const RunConfig& cfg, const SystemState& state, std::size_t e) {
    if (const auto* load = std::get_if<LoadDependentModel>(&cfg.rate_model)) {
        return load_dependent_rates(cfg.topology.edge(e), load->edges[e], state.r[e], state.rho[e]);
    }
    return cluster_rates(std::get<ClusterModel>(cfg.rate_model).edges[e], state.r[e]);
}

double jump_intensity(const RunConfig& cfg, const SystemState& state) {
    double total = 0.0;
    for (std::size_t e = 0; e < cfg.topology.edge_count(); ++e) {
        for (double rate : transition_rates(cfg, state, e)) {
            total += rate;
        }
    }
    return total;
}

JumpEvent sample_jump(const RunConfig& cfg, SystemState& state, RngStream& rng) {
    const std::size_t n_edges = cfg.topology.edge_count();
    std::vector<std::vector<double>> rates;
    rates.reserve(n_edges);
    double total = 0.0;
    for (std::size_t e = 0; e < n_edges; ++e) {
        rates.push_back(transition_rates(cfg, state, e));
        for (double rate : rates.back()) {
            total += rate;
        }
    }
    if (!(total > 0.0)) {
        throw std::logic_error("sample_jump called with zero jump intensity");
    }

    const double target = rng.uniform() * total;
    double cumulative = 0.0;
    JumpEvent chosen{};
    bool found = false;
    for (std::size_t e = 0; e < n_edges && !found; ++e) {
        for (std::size_t j = 0; j < rates[e].size(); ++j) {
            if (rates[e][j] <= 0.0) {
                continue;
            }
            chosen = JumpEvent{state.time, e, state.r[e], j};
            cumulative += rates[e][j];
            if (target < cumulative) {
                found = true;
                break;
            }
        }
    }
    // Rounding can leave target just above the final cumulative sum; the
    // last positive rate is then the intended pick.
    state.r[chosen.edge] = chosen.to;
    return chosen;
}

double thinning_bound(const RunConfig& cfg) {
    double bound = 0.0;
    if (const auto* load = std::get_if<LoadDependentModel>(&cfg.rate_model)) {
        for (std::size_t e = 0; e < cfg.topology.edge_count(); ++e) {
            const auto& p = load->edges[e];
            const std::size_t states = cfg.topology.edge(e).state_count();
            // Repair peaks on an empty processor, breakdown at full utilization.
            double edge_bound = 0.0;
            for (std::size_t s = 0; s < states; ++s) {
                double exit = 0.0;
                for (double rate : load_dependent_table(states, s, p.repair_max, p.down)) {
                    exit += rate;
                }
                edge_bound = std::max(edge_bound, exit);
            }
            bound += edge_bound;
        }
        return bound;
    }
    for (const auto& p : std::get<ClusterModel>(cfg.rate_model).edges) {
        bound += p.workers * std::max(p.rate_on, p.rate_off);
    }
    return bound;
}

PathResult simulate_path(const RunConfig& cfg, RngStream& rng) {
    PathResult result;
    result.final_state = initial_state(cfg);
    result.trace = make_trace(cfg);
    SystemState& state = result.final_state;

    const std::size_t last_step = cfg.step_count();
    const double bound = thinning_bound(cfg);
    if (bound > 0.0) {
        double proposal = 0.0;
        for (;;) {
            proposal += rng.exponential(bound);
            if (proposal >= cfg.horizon) {
                break;
            }
            const auto grid_step =
                std::min(last_step, static_cast<std::size_t>(std::floor(proposal / cfg.dt)));
            advance(state, cfg, grid_step, result.trace);

            const double intensity = jump_intensity(cfg, state);
            assert(intensity <= bound * (1.0 + 1e-12));
            if (rng.uniform() * bound < intensity) {
                JumpEvent jump = sample_jump(cfg, state, rng);
                jump.time = proposal;
                result.jumps.push_back(jump);
            }
        }
    }
    advance(state, cfg, last_step, result.trace);
    return result;
}

void write_jump_log(std::ostream& out, const RunConfig& cfg, std::span<const JumpEvent> jumps) {
    nlohmann::json log = nlohmann::json::array();
    for (const JumpEvent& jump : jumps) {
        log.push_back({{"t", jump.time},
                       {"edge", cfg.topology.edge(jump.edge).id},
                       {"from", jump.from + 1},
                       {"to", jump.to + 1}});
    }
    out << log.dump(2) << '\n';
}

double worker_availability(double rate_on, double rate_off, double t) {
    if (!(rate_on >= 0.0) || !(rate_off >= 0.0) || !(rate_on + rate_off > 0.0)) {
        throw std::invalid_argument("worker rates must be non-negative and not both zero");
    }
    if (!(t >= 0.0)) {
        throw std::invalid_argument("time must be non-negative");
    }
    const double total = rate_on + rate_off;
    return rate_on / total + (rate_off / total) * std::exp(-total * t);
}

std::vector<double> ctmc_binomial_law(int workers, double rate_on, double rate_off, double t) {
    check_cluster_args(workers, rate_on, rate_off);
    const double p = worker_availability(rate_on, rate_off, t);
    const auto n = static_cast<std::size_t>(workers);
    std::vector<double> law(n + 1);
    double binom = 1.0;  // C(n, j)
    for (std::size_t j = 0; j <= n; ++j) {
        law[j] = binom * std::pow(p, static_cast<double>(j)) * std::pow(1.0 - p, static_cast<double>(n - j));
        binom = binom * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return law;
}

std::vector<double> cluster_generator(int workers, double rate_on, double rate_off) {
    check_cluster_args(workers, rate_on, rate_off);
    const auto n = static_cast<std::size_t>(workers);
    const std::size_t dim = n + 1;
    std::vector<double> q(dim * dim, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        const double up = static_cast<double>(n - j) * rate_on;
        const double down = static_cast<double>(j) * rate_off;
        if (j < n) {
            q[j * dim + j + 1] = up;
        }
        if (j > 0) {
            q[j * dim + j - 1] = down;
        }
        q[j * dim + j] = -(up + down);
    }
    return q;
}

double steady_state_mean_capacity(int workers, double rate_on, double rate_off) {
    check_cluster_args(workers, rate_on, rate_off);
    return workers * rate_on / (rate_on + rate_off);
}

}  // namespace prodrisk
