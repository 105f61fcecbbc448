#include <doctest.h>

#include <cmath>
#include <sstream>

#include "prodrisk/ensemble.hpp"
#include "prodrisk/error.hpp"
#include "prodrisk/presets.hpp"
#include "support/fixtures.hpp"

using namespace prodrisk;

namespace {

RunConfig short_serial(std::size_t samples, std::uint64_t seed) {
    Serial2Options options;
    options.horizon = 30;
    options.samples = samples;
    options.seed = seed;
    return serial2_preset(options);
}

}  // namespace

TEST_CASE("single deterministic sample equals the solver functionals") {
    const RunConfig cfg = testing::single_edge(1.5, {0, 1}, 0.1, 10.0, 10);
    const EnsembleResult result = run_ensemble(cfg, {1});
    REQUIRE(result.samples.size() == 1);
    SystemState state = initial_state(cfg);
    const FluxTrace trace = evolve(state, cfg, cfg.horizon);
    CHECK(result.samples[0] == path_functionals(trace, cfg.profit));
}

TEST_CASE("same seed, same samples, any thread count") {
    const RunConfig cfg = short_serial(200, 17);
    const EnsembleResult serial = run_ensemble(cfg, {1});
    const EnsembleResult again = run_ensemble(cfg, {1});
    const EnsembleResult parallel = run_ensemble(cfg, {4});
    const EnsembleResult many = run_ensemble(cfg, {13});
    CHECK(serial.samples == again.samples);
    CHECK(serial.samples == parallel.samples);
    CHECK(serial.samples == many.samples);
    CHECK(serial.fingerprint == parallel.fingerprint);
}

TEST_CASE("any sample is recomputable in isolation") {
    const RunConfig cfg = short_serial(50, 3);
    const EnsembleResult result = run_ensemble(cfg, {2});
    for (std::size_t i : {0u, 7u, 49u}) {
        CHECK(simulate_sample(cfg, i) == result.samples[i]);
    }
    // A different master seed changes the streams.
    const EnsembleResult other = run_ensemble(short_serial(50, 4), {1});
    CHECK(other.samples != result.samples);
}

TEST_CASE("fingerprint") {
    const RunConfig a = short_serial(10, 1);
    CHECK(config_fingerprint(a) == config_fingerprint(short_serial(10, 1)));
    CHECK(config_fingerprint(a) != config_fingerprint(short_serial(10, 2)));
    CHECK(config_fingerprint(a) != config_fingerprint(short_serial(11, 1)));
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(parallel_for(100, 4,
                                 [](std::size_t i) {
                                     if (i == 37) {
                                         throw std::runtime_error("boom");
                                     }
                                 }),
                    std::runtime_error);
}

TEST_CASE("samples csv round trip") {
    const RunConfig cfg = short_serial(25, 9);
    const EnsembleResult result = run_ensemble(cfg, {1});
    std::stringstream buffer;
    write_samples_csv(buffer, result.samples);
    const std::string text = buffer.str();
    CHECK(text.rfind("idx,profit,outflow,queue_load\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 26);
    CHECK(read_samples_csv(buffer) == result.samples);
}

TEST_CASE("malformed samples csv") {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_samples_csv(in);
    };
    CHECK_THROWS_AS(parse(""), ParseError);
    CHECK_THROWS_AS(parse("a,b,c\n"), ParseError);
    CHECK_THROWS_AS(parse("idx,profit,outflow,queue_load\n"), ParseError);
    CHECK_THROWS_AS(parse("idx,profit,outflow,queue_load\n0,1,2\n"), ParseError);
    CHECK_THROWS_AS(parse("idx,profit,outflow,queue_load\n0,1,x,3\n"), ParseError);
    CHECK(parse("idx,profit,outflow,queue_load\r\n0,1,2,3\r\n").size() == 1);
}

TEST_CASE("metadata has no timing") {
    const RunConfig cfg = short_serial(5, 1);
    const auto a = ensemble_metadata(cfg, run_ensemble(cfg, {1}));
    const auto b = ensemble_metadata(cfg, run_ensemble(cfg, {3}));
    CHECK(a.dump() == b.dump());
    CHECK(a["samples"] == 5);
}

TEST_CASE("standard error of the mean scales like one over root M") {
    // Spread of replicate means for M = 100, 1000, 10000.
    const std::vector<std::size_t> sizes{100, 1000, 10000};
    const int replicates = 40;
    std::vector<double> spread;
    for (std::size_t m : sizes) {
        std::vector<double> means;
        for (int r = 0; r < replicates; ++r) {
            Serial2Options options;
            options.horizon = 20;
            options.samples = m;
            options.seed = 1000 + r;
            const EnsembleResult result = run_ensemble(serial2_preset(options), {1});
            std::vector<double> profits;
            for (const auto& s : result.samples) {
                profits.push_back(s.profit);
            }
            means.push_back(summarize(profits).mean);
        }
        spread.push_back(*summarize(means).std_dev);
    }
    const double slope = (std::log(spread[2]) - std::log(spread[0])) / (std::log(10000.0) - std::log(100.0));
    CAPTURE(slope);
    CHECK(slope <= -0.4);
    CHECK(slope >= -0.6);
}
