#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "prodrisk/config.hpp"
#include "prodrisk/measures.hpp"

namespace prodrisk {

enum class GridVariable {
    AlphaPair,    // routing shares at two branching nodes
    ClusterPair,  // worker counts of the first two edges
};

enum class SeedPolicy {
    Shared,       // every grid point reuses the same sample streams
    Independent,  // grid point k draws from derive_seed(seed, k)
};

struct GridSpec {
    GridVariable variable = GridVariable::AlphaPair;
    std::vector<double> first_axis;
    std::vector<double> second_axis;
    /// AlphaPair only: node ids whose first outgoing edge receives the share.
    int first_node = 0;
    int second_node = 0;

    std::size_t rows() const { return first_axis.size(); }
    std::size_t cols() const { return second_axis.size(); }

    /// {0, 0.1, ..., 1} squared on the diamond decision nodes.
    static GridSpec alpha_default();
    /// {5, ..., 15} squared.
    static GridSpec cluster_default();
};

struct PlanOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    SeedPolicy policy = SeedPolicy::Shared;
    unsigned threads = 0;
    QuantileMethod quantile = QuantileMethod::Midpoint;
};

struct BestPoint {
    std::string measure;
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

struct PlanResult {
    GridSpec grid;
    SeedPolicy policy = SeedPolicy::Shared;
    std::vector<double> levels;
    std::vector<MeasureReport> reports;  // row-major over the grid
    std::vector<BestPoint> best;

    const MeasureReport& at(std::size_t row, std::size_t col) const { return reports[row * grid.cols() + col]; }
    /// Names of all heatmap measures: mean, std, bankruptcy, var_<l>, avar_<l>.
    std::vector<std::string> measures() const;
    /// Row-major matrix of one measure over the grid.
    std::vector<double> heatmap(const std::string& measure) const;
};

/// Base config specialised to one grid point. Throws ValidationError when
/// the base config does not fit the grid variable.
RunConfig configure_point(const GridSpec& grid, const RunConfig& base, double first, double second);

/// Value of a named measure in a report (see PlanResult::measures).
double measure_value(const MeasureReport& report, const std::string& measure);

/// Best grid point per measure: mean is maximised, everything else
/// minimised; ties go to the lexicographically smallest (row, col).
std::vector<BestPoint> select_best(const GridSpec& grid, const std::vector<MeasureReport>& reports,
                                   const std::vector<double>& levels);

PlanResult plan(const GridSpec& grid, const RunConfig& base, const PlanOptions& options);

/// Writes one CSV matrix per measure (rows = first axis) and best.json into
/// `dir`, creating it if needed. Throws IoError.
void emit_heatmaps(const PlanResult& result, const std::filesystem::path& dir);

nlohmann::json best_summary(const PlanResult& result);

}  // namespace prodrisk
