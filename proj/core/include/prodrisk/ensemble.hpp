#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "prodrisk/config.hpp"
#include "prodrisk/measures.hpp"

namespace prodrisk {

struct EnsembleOptions {
    /// Worker threads; 0 uses std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct EnsembleResult {
    std::vector<PathFunctionalSample> samples;  // index order
    std::uint64_t fingerprint = 0;
    double wall_seconds = 0.0;
};

/// Functionals of sample `index`, simulated on its own derived RNG stream.
PathFunctionalSample simulate_sample(const RunConfig& cfg, std::size_t index);

/// cfg.samples independent paths. Sample i always uses the stream derived
/// from (cfg.seed, i), so results do not depend on the thread count.
EnsembleResult run_ensemble(const RunConfig& cfg, const EnsembleOptions& options = {});

/// FNV-1a hash of the canonical config serialization.
std::uint64_t config_fingerprint(const RunConfig& cfg);

/// Runs body(i) for i in [0, n) on up to `threads` workers; indices are
/// handed out dynamically, callers write results by index.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// samples.csv: header `idx,profit,outflow,queue_load`, one row per sample.
void write_samples_csv(std::ostream& out, std::span<const PathFunctionalSample> samples);

/// Throws ParseError on a malformed header, row or value.
std::vector<PathFunctionalSample> read_samples_csv(std::istream& in);

/// Run metadata without timing, so identical runs serialize identically.
nlohmann::json ensemble_metadata(const RunConfig& cfg, const EnsembleResult& result);

}  // namespace prodrisk
