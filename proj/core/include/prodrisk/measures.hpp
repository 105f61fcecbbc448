#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "prodrisk/config.hpp"
#include "prodrisk/solver.hpp"

namespace prodrisk {

// Path functionals ---------------------------------------------------------
// All time integrals are left-endpoint rectangle sums over the trace steps.

/// Goods that left the network through its sinks.
double cumulative_outflow(const FluxTrace& trace);

/// Time integral of the summed queue lengths.
double cumulative_queue_load(const FluxTrace& trace);

/// Revenue of the network outflow minus storage and cluster-size costs.
double profit(const FluxTrace& trace, const ProfitSpec& spec);

struct PathFunctionalSample {
    double profit = 0.0;
    double outflow = 0.0;
    double queue_load = 0.0;

    friend bool operator==(const PathFunctionalSample&, const PathFunctionalSample&) = default;
};

PathFunctionalSample path_functionals(const FluxTrace& trace, const ProfitSpec& spec);

// Empirical risk estimators ------------------------------------------------

enum class QuantileMethod {
    /// Linear interpolation between order statistics placed at (k - 0.5) / M,
    /// clamped to the extreme order statistics outside [0.5/M, 1 - 0.5/M].
    Midpoint,
    /// Right-continuous step quantile sup{x : P(X < x) <= t} of the
    /// empirical distribution.
    UpperStep,
};

/// Sorted copy of a sample with quantile-based estimators on top.
class EmpiricalQuantile {
public:
    /// Throws std::invalid_argument on an empty sample.
    explicit EmpiricalQuantile(std::span<const double> sample, QuantileMethod method = QuantileMethod::Midpoint);

    /// Upper quantile at level t in (0, 1).
    double operator()(double t) const;

    /// -q(level)
    double value_at_risk(double level) const;

    /// (1/level) times the integral of value_at_risk over (0, level].
    double average_value_at_risk(double level) const;

    std::span<const double> sorted() const { return sorted_; }
    QuantileMethod method() const { return method_; }

private:
    // Interior points of (0, level) where the quantile has a kink or jump.
    std::vector<double> breakpoints(double level) const;

    std::vector<double> sorted_;
    QuantileMethod method_;
};

double empirical_upper_quantile(std::span<const double> sample, double t,
                                QuantileMethod method = QuantileMethod::Midpoint);
double value_at_risk(std::span<const double> sample, double level,
                     QuantileMethod method = QuantileMethod::Midpoint);
double average_value_at_risk(std::span<const double> sample, double level,
                             QuantileMethod method = QuantileMethod::Midpoint);

/// Fraction of strictly negative entries.
double bankruptcy_probability(std::span<const double> sample);

// Aggregation --------------------------------------------------------------

struct RiskLevelReport {
    double level = 0.0;
    double value_at_risk = 0.0;
    double average_value_at_risk = 0.0;

    friend bool operator==(const RiskLevelReport&, const RiskLevelReport&) = default;
};

struct SummaryStats {
    double mean = 0.0;
    std::optional<double> std_dev;  // unbiased; undefined for fewer than 2 samples

    friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

struct MeasureReport {
    std::size_t samples = 0;
    SummaryStats profit;
    double bankruptcy_probability = 0.0;
    std::vector<RiskLevelReport> levels;
    SummaryStats outflow;
    SummaryStats queue_load;

    friend bool operator==(const MeasureReport&, const MeasureReport&) = default;
};

/// Mean and unbiased standard deviation, summed pairwise over the sorted
/// values so the result does not depend on sample order.
SummaryStats summarize(std::span<const double> values);

MeasureReport make_report(std::span<const PathFunctionalSample> samples, std::span<const double> levels,
                          QuantileMethod method = QuantileMethod::Midpoint);

nlohmann::json to_json(const MeasureReport& report);

}  // namespace prodrisk
