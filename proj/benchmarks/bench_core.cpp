#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "prodrisk/capacity.hpp"
#include "prodrisk/ensemble.hpp"
#include "prodrisk/measures.hpp"
#include "prodrisk/presets.hpp"
#include "prodrisk/solver.hpp"

using namespace prodrisk;

static void BM_UpwindStep(benchmark::State& state) {
    const auto cells = static_cast<std::size_t>(state.range(0));
    std::vector<double> rho(cells, 0.5);
    for (auto _ : state) {
        step_edge(rho, 1.0, 2.0, 1.0, 0.01, 0.01);
        benchmark::DoNotOptimize(rho.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cells));
}
BENCHMARK(BM_UpwindStep)->Arg(20)->Arg(200)->Arg(2000);

static void BM_DiamondPath(benchmark::State& state) {
    const RunConfig cfg = diamond_preset();
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng = RngStream::for_sample(cfg.seed, i++);
        benchmark::DoNotOptimize(simulate_path(cfg, rng));
    }
}
BENCHMARK(BM_DiamondPath)->Unit(benchmark::kMicrosecond);

static void BM_Serial2Path(benchmark::State& state) {
    const RunConfig cfg = serial2_preset();
    std::uint64_t i = 0;
    for (auto _ : state) {
        RngStream rng = RngStream::for_sample(cfg.seed, i++);
        benchmark::DoNotOptimize(simulate_path(cfg, rng));
    }
}
BENCHMARK(BM_Serial2Path)->Unit(benchmark::kMicrosecond);

static void BM_Serial2Ensemble(benchmark::State& state) {
    Serial2Options options;
    options.samples = static_cast<std::size_t>(state.range(0));
    const RunConfig cfg = serial2_preset(options);
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_ensemble(cfg, {0}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Serial2Ensemble)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_AverageValueAtRisk(benchmark::State& state) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(state.range(0)));
    for (double& v : x) {
        v = normal(gen);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(average_value_at_risk(x, 0.1));
    }
}
BENCHMARK(BM_AverageValueAtRisk)->Arg(1000)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
