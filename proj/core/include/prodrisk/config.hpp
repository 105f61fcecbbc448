#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "prodrisk/network.hpp"
#include "prodrisk/rate_model.hpp"

namespace prodrisk {

/// Revenue and cost rates entering the profit functional. All vectors are
/// indexed by edge position. `cluster_sizes` is derived from a cluster rate
/// model and left at zero otherwise.
struct ProfitSpec {
    double price = 0.0;
    std::vector<double> storage_cost;
    std::vector<double> cluster_cost;
    std::vector<int> cluster_sizes;

    friend bool operator==(const ProfitSpec&, const ProfitSpec&) = default;
};

struct RunConfig {
    NetworkTopology topology;
    RateModelSpec rate_model;
    double horizon = 0.0;
    double dt = 0.0;
    ProfitSpec profit;
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    std::vector<double> risk_levels;

    /// Number of whole time steps covering [0, horizon].
    std::size_t step_count() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// The PDMP state: capacity-state indices (0-based), queue lengths and
/// cell-averaged densities per edge.
struct SystemState {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<std::size_t> r;
    std::vector<double> q;
    std::vector<std::vector<double>> rho;

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Checks every cross-field constraint of a config; throws ValidationError
/// naming the violated constraint. Also fills `profit.cluster_sizes`.
void validate(RunConfig& cfg);

/// Parses the JSON run-config document. Throws ParseError for schema
/// violations and ValidationError for constraint violations.
RunConfig parse_config(std::string_view text);
RunConfig config_from_json(const nlohmann::json& doc);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// Empty system with every edge at its largest capacity level.
SystemState initial_state(const RunConfig& cfg);

/// Total goods held in queues and processors.
double total_mass(const RunConfig& cfg, const SystemState& state);

/// Relative slack on the CFL bound absorbing the rounding in dx = L / cells.
inline constexpr double kCflSlack = 1e-12;

}  // namespace prodrisk
