#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "prodrisk/capacity.hpp"
#include "prodrisk/measures.hpp"
#include "prodrisk/presets.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace prodrisk;
using prodrisk::testing::random_dag;
using prodrisk::testing::single_cluster;
using prodrisk::testing::single_edge;

namespace {

EdgeSpec unit_edge(std::vector<double> capacities, int cells = 4) { return {1, 0.0, 1.0, 1.0, capacities, cells}; }

}  // namespace

TEST_CASE("utilization ratio") {
    const EdgeSpec edge = unit_edge({0, 3});
    CHECK(utilization_ratio(edge, 1, std::vector<double>(4, 0.0)) == 0.0);
    CHECK(utilization_ratio(edge, 1, std::vector<double>(4, 3.0)) == doctest::Approx(1.0));
    CHECK(utilization_ratio(edge, 1, std::vector<double>(4, 1.5)) == doctest::Approx(0.5));
    CHECK(utilization_ratio(edge, 0, std::vector<double>(4, 1.5)) == 0.0);
}

TEST_CASE("work in progress ratio") {
    CHECK(work_in_progress_ratio(unit_edge({0, 3}), std::vector<double>(4, 0.0)) == 0.0);
    CHECK(work_in_progress_ratio(unit_edge({0, 3}), std::vector<double>(4, 1.5)) == doctest::Approx(0.5));
    CHECK(work_in_progress_ratio(unit_edge({0, 1}), std::vector<double>(4, 1.5)) == doctest::Approx(1.5));
}

TEST_CASE("load-dependent rates") {
    const LoadDependentParams two{10, 4, 1};
    const LoadDependentParams three{10, 4, 2};
    const std::vector<double> empty(4, 0.0);

    CHECK(load_dependent_rates(unit_edge({0, 3}), two, 0, empty) == std::vector<double>{0, 10});
    CHECK(load_dependent_rates(unit_edge({0, 3}), two, 1, empty) == std::vector<double>{0, 0});

    // Full utilization in the top state of a three-state edge.
    const std::vector<double> full(4, 3.0);
    const auto top = load_dependent_rates(unit_edge({0, 1, 3}), three, 2, full);
    CHECK(top[0] == doctest::Approx(2.0));
    CHECK(top[1] == doctest::Approx(2.0));
    CHECK(top[2] == 0.0);

    // Middle state repairs to the top only; the 1 -> 2 transition (1-based) is zero.
    const auto mid = load_dependent_rates(unit_edge({0, 1, 3}), three, 1, empty);
    CHECK(mid == std::vector<double>{0, 0, 10});
    const auto down = load_dependent_rates(unit_edge({0, 1, 3}), three, 0, empty);
    CHECK(down == std::vector<double>{0, 0, 10});

    // Repair slows linearly with work in progress.
    const auto slow = load_dependent_rates(unit_edge({0, 3}), two, 0, std::vector<double>(4, 1.5));
    CHECK(slow[1] == doctest::Approx(10 - 6 * 0.5));
    // and never goes negative once the processor is overloaded
    const auto stuck = load_dependent_rates(unit_edge({0, 1}), two, 0, std::vector<double>(4, 5.0));
    CHECK(stuck[1] == 0.0);
}

TEST_CASE("cluster rates") {
    const ClusterParams p{10, 0.1, 1.0 / 80.0};
    auto all_off = cluster_rates(p, 0);
    CHECK(all_off[1] == doctest::Approx(10 * 0.1));
    CHECK(std::count_if(all_off.begin(), all_off.end(), [](double r) { return r > 0; }) == 1);
    auto all_on = cluster_rates(p, 10);
    CHECK(all_on[9] == doctest::Approx(10.0 / 80.0));
    CHECK(std::count_if(all_on.begin(), all_on.end(), [](double r) { return r > 0; }) == 1);
    auto four = cluster_rates(p, 4);
    CHECK(four[5] == doctest::Approx(0.6));
    CHECK(four[3] == doctest::Approx(0.05));
}

TEST_CASE("cluster rates ignore the load") {
    RunConfig cfg = serial2_preset();
    SystemState a = initial_state(cfg);
    SystemState b = a;
    b.q = {123.0, 4.5};
    b.rho = {{7.0}, {0.25}};
    b.time = 99.0;
    for (std::size_t e = 0; e < 2; ++e) {
        CHECK(transition_rates(cfg, a, e) == transition_rates(cfg, b, e));
    }
}

TEST_CASE("jump intensity") {
    {
        const RunConfig cfg = serial2_preset();
        CHECK(jump_intensity(cfg, initial_state(cfg)) == doctest::Approx(10.0 / 80 + 12.0 / 50));
    }
    {
        const RunConfig cfg = diamond_preset();
        CHECK(jump_intensity(cfg, initial_state(cfg)) == 0.0);
    }
    {
        const RunConfig cfg = single_edge(1.0, {0, 1}, 1.0, 1.0, 1);
        SystemState s = initial_state(cfg);
        s.r[0] = 0;
        CHECK(jump_intensity(cfg, s) == 0.0);
    }
}

TEST_CASE("thinning bound") {
    RunConfig cfg = single_edge(1.0, {0, 1}, 1.0, 1.0, 1);
    std::get<LoadDependentModel>(cfg.rate_model).edges[0] = {10, 4, 1};
    CHECK(thinning_bound(cfg) == 10.0);
    CHECK(thinning_bound(serial2_preset()) == doctest::Approx(1.6));
}

TEST_CASE("sample_jump with a single positive rate") {
    RunConfig cfg = single_edge(1.0, {0, 1}, 1.0, 1.0, 1);
    std::get<LoadDependentModel>(cfg.rate_model).edges[0] = {10, 4, 1};
    RngStream rng(1);
    for (int k = 0; k < 100; ++k) {
        SystemState s = initial_state(cfg);
        s.r[0] = 0;
        const JumpEvent jump = sample_jump(cfg, s, rng);
        CHECK(jump.edge == 0);
        CHECK(jump.from == 0);
        CHECK(jump.to == 1);
        CHECK(s.r[0] == 1);
    }
    SystemState idle = initial_state(cfg);
    CHECK_THROWS_AS(sample_jump(cfg, idle, rng), std::logic_error);
}

TEST_CASE("sample_jump picks edges in proportion to their rates") {
    std::vector<EdgeSpec> edges{{1, 0, 1, 1, {0, 1}, 1}, {2, 0, 1, 1, {0, 1}, 1}};
    std::vector<NodeSpec> nodes{{1, {}, {1, 2}, {0.5, 0.5}}, {2, {1}, {}, {}}, {3, {2}, {}, {}}};
    RunConfig cfg;
    cfg.topology = NetworkTopology(edges, nodes, {{1, InflowTable(1.0)}});
    cfg.rate_model = ClusterModel{{{1, 0.3, 0.7}, {1, 0.3, 0.7}}};
    cfg.horizon = 1;
    cfg.dt = 1;
    validate(cfg);

    RngStream rng(42);
    const SystemState start = initial_state(cfg);
    const int draws = 100000;
    int first = 0;
    for (int k = 0; k < draws; ++k) {
        SystemState s = start;
        first += sample_jump(cfg, s, rng).edge == 0;
    }
    const double sigma = std::sqrt(draws * 0.25);
    CHECK(std::abs(first - draws / 2.0) <= 3 * sigma);
}

TEST_CASE("cluster jump targets follow the birth-death rates") {
    RunConfig cfg = single_cluster(10, 0.1, 1.0 / 80.0, 1.0);
    SystemState start = initial_state(cfg);
    start.r[0] = 4;
    RngStream rng(7);
    const int draws = 100000;
    int up = 0;
    for (int k = 0; k < draws; ++k) {
        SystemState s = start;
        const JumpEvent jump = sample_jump(cfg, s, rng);
        REQUIRE((jump.to == 5 || jump.to == 3));
        up += jump.to == 5;
    }
    const double p = 0.6 / 0.65;
    CHECK(std::abs(up - draws * p) <= 3 * std::sqrt(draws * p * (1 - p)));
}

TEST_CASE("zero rates give the deterministic path") {
    const RunConfig cfg = single_edge(1.5, {0, 1}, 0.1, 10.0, 10);
    RngStream rng(3);
    const PathResult path = simulate_path(cfg, rng);
    CHECK(path.jumps.empty());
    SystemState state = initial_state(cfg);
    const FluxTrace trace = evolve(state, cfg, cfg.horizon);
    CHECK(path.final_state == state);
    CHECK(path.trace.exit_flow == trace.exit_flow);
    CHECK(path.trace.queue == trace.queue);
    CHECK(path.trace.steps() == cfg.step_count());
}

TEST_CASE("identical seeds give identical jump lists") {
    const RunConfig cfg = diamond_preset();
    RngStream a(123);
    RngStream b(123);
    const PathResult pa = simulate_path(cfg, a);
    const PathResult pb = simulate_path(cfg, b);
    CHECK_FALSE(pa.jumps.empty());
    CHECK(pa.jumps == pb.jumps);
    CHECK(pa.final_state == pb.final_state);
}

TEST_CASE("inter-jump times of a constant-intensity chain are exponential") {
    // One worker with equal on/off rates: the exit rate is 0.8 in both states.
    const RunConfig cfg = single_cluster(1, 0.8, 0.8, 13000.0);
    RngStream rng(2718);
    const PathResult path = simulate_path(cfg, rng);
    REQUIRE(path.jumps.size() > 10000);
    std::vector<double> gaps;
    double last = 0.0;
    for (std::size_t k = 0; k < 10000; ++k) {
        gaps.push_back(path.jumps[k].time - last);
        last = path.jumps[k].time;
    }
    CHECK(oracle::ks_exponential(gaps, 0.8) < oracle::ks_critical_1pct(gaps.size()));
}

TEST_CASE("visited states respect the thinning bound and jumps only touch r") {
    std::mt19937_64 gen(31);
    for (int k = 0; k < 40; ++k) {
        const RunConfig cfg = random_dag(gen);
        const double bound = thinning_bound(cfg);
        RngStream rng(gen());
        SystemState state = initial_state(cfg);
        FluxTrace trace = make_trace(cfg);
        double t = 0.0;
        while (true) {
            t += rng.exponential(bound);
            if (t >= cfg.horizon) {
                break;
            }
            advance(state, cfg, static_cast<std::size_t>(std::floor(t / cfg.dt)), trace);
            const double psi = jump_intensity(cfg, state);
            CHECK(psi <= bound * (1 + 1e-12));
            if (rng.uniform() * bound < psi) {
                const SystemState before = state;
                const JumpEvent jump = sample_jump(cfg, state, rng);
                CHECK(state.q == before.q);
                CHECK(state.rho == before.rho);
                std::size_t changed = 0;
                for (std::size_t e = 0; e < state.r.size(); ++e) {
                    changed += state.r[e] != before.r[e];
                }
                CHECK(changed == 1);
                CHECK(state.r[jump.edge] == jump.to);
                CHECK(before.r[jump.edge] == jump.from);
            }
        }
    }
}

TEST_CASE("binomial law") {
    const auto at_zero = ctmc_binomial_law(10, 0.1, 1.0 / 80, 0.0);
    for (int j = 0; j < 10; ++j) {
        CHECK(at_zero[j] == 0.0);
    }
    CHECK(at_zero[10] == 1.0);

    for (double t : {0.5, 3.0, 40.0}) {
        const auto law = ctmc_binomial_law(7, 0.3, 0.2, t);
        double sum = 0.0;
        for (double p : law) {
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }

    // t -> infinity gives Bin(N, lambda0 / (lambda0 + lambda1)).
    const auto limit = ctmc_binomial_law(4, 0.1, 1.0 / 80, 1e6);
    const double p = 8.0 / 9.0;
    const std::vector<double> expected{std::pow(1 - p, 4), 4 * p * std::pow(1 - p, 3), 6 * p * p * (1 - p) * (1 - p),
                                       4 * p * p * p * (1 - p), std::pow(p, 4)};
    for (int j = 0; j <= 4; ++j) {
        CHECK(limit[j] == doctest::Approx(expected[j]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ctmc_binomial_law(0, 0.1, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(ctmc_binomial_law(3, 0.1, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("binomial law matches the matrix exponential of the generator") {
    struct Case {
        int n;
        double on;
        double off;
        double t;
    };
    for (const Case& c : {Case{2, 1.0, 1.0, 0.05}, Case{2, 1.0, 1.0, 0.7}, Case{10, 0.1, 1.0 / 80, 1.0},
                          Case{10, 0.1, 1.0 / 80, 10.0}, Case{10, 0.1, 1.0 / 80, 100.0}, Case{12, 0.05, 0.02, 25.0}}) {
        const auto exact = oracle::expm(oracle::worker_generator(c.n, c.on, c.off), c.t);
        const auto law = ctmc_binomial_law(c.n, c.on, c.off, c.t);
        for (int j = 0; j <= c.n; ++j) {
            CHECK(std::abs(law[j] - exact[c.n][j]) <= 1e-8);
        }
    }
}

TEST_CASE("generator agrees with the oracle") {
    const auto q = cluster_generator(5, 0.3, 0.1);
    const auto ref = oracle::worker_generator(5, 0.3, 0.1);
    for (int i = 0; i <= 5; ++i) {
        for (int j = 0; j <= 5; ++j) {
            CHECK(q[i * 6 + j] == doctest::Approx(ref[i][j]));
        }
    }
}

TEST_CASE("steady-state mean capacity") {
    for (int n : {1, 5, 10, 12, 15}) {
        CHECK(std::abs(steady_state_mean_capacity(n, 0.1, 1.0 / 80) - n * 8.0 / 9.0) <= 1e-12);
        CHECK(std::abs(steady_state_mean_capacity(n, 1.0 / 20, 1.0 / 50) - n * 5.0 / 7.0) <= 1e-12);
        CHECK(steady_state_mean_capacity(n, 0.3, 0.3) == doctest::Approx(n / 2.0));
    }
    CHECK(steady_state_mean_capacity(9, 0.1, 1.0 / 80) == doctest::Approx(8.0));
}

TEST_CASE("cluster sum law through the path simulator") {
    const int n = 10;
    const RunConfig cfg = single_cluster(n, 0.1, 1.0 / 80, 100.0);
    const std::vector<double> times{1.0, 10.0, 100.0};
    std::vector<std::vector<double>> counts(times.size(), std::vector<double>(n + 1, 0.0));
    const int paths = 20000;
    for (int i = 0; i < paths; ++i) {
        RngStream rng = RngStream::for_sample(9, i);
        const PathResult path = simulate_path(cfg, rng);
        std::size_t k = 0;
        std::size_t level = n;
        for (std::size_t m = 0; m < times.size(); ++m) {
            while (k < path.jumps.size() && path.jumps[k].time <= times[m]) {
                level = path.jumps[k++].to;
            }
            counts[m][level] += 1.0;
        }
    }
    for (std::size_t m = 0; m < times.size(); ++m) {
        const auto law = ctmc_binomial_law(n, 0.1, 1.0 / 80, times[m]);
        double tv = 0.0;
        for (int j = 0; j <= n; ++j) {
            tv += std::abs(counts[m][j] / paths - law[j]);
        }
        CHECK(0.5 * tv <= 0.02);
    }
}

TEST_CASE("path simulator and direct chain simulation agree") {
    const int n = 6;
    const double on = 0.4;
    const double off = 0.25;
    const RunConfig cfg = single_cluster(n, on, off, 20.0);
    const std::vector<double> times{0.5, 2.0, 5.0, 20.0};
    const int paths = 20000;
    std::vector<std::vector<double>> pdmp(times.size(), std::vector<double>(n + 1, 0.0));
    std::vector<std::vector<double>> direct = pdmp;
    std::mt19937_64 gen(17);
    for (int i = 0; i < paths; ++i) {
        RngStream rng = RngStream::for_sample(4, i);
        const PathResult path = simulate_path(cfg, rng);
        std::size_t k = 0;
        std::size_t level = n;
        for (std::size_t m = 0; m < times.size(); ++m) {
            while (k < path.jumps.size() && path.jumps[k].time <= times[m]) {
                level = path.jumps[k++].to;
            }
            pdmp[m][level] += 1.0;
        }
        const auto seen = oracle::gillespie_workers(n, on, off, times, gen);
        for (std::size_t m = 0; m < times.size(); ++m) {
            direct[m][seen[m]] += 1.0;
        }
    }
    for (std::size_t m = 0; m < times.size(); ++m) {
        const auto [stat, df] = oracle::chi2_two_sample(pdmp[m], direct[m]);
        CAPTURE(times[m]);
        CHECK(stat < oracle::chi2_critical_1pct(df));
    }
}

TEST_CASE("jump log") {
    const RunConfig cfg = serial2_preset();
    std::vector<JumpEvent> jumps{{1.25, 1, 12, 11}};
    std::ostringstream out;
    write_jump_log(out, cfg, jumps);
    const auto doc = nlohmann::json::parse(out.str());
    REQUIRE(doc.size() == 1);
    CHECK(doc[0]["t"] == 1.25);
    CHECK(doc[0]["edge"] == 2);
    CHECK(doc[0]["from"] == 13);
    CHECK(doc[0]["to"] == 12);
}
