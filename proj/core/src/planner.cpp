#include "prodrisk/planner.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "prodrisk/ensemble.hpp"
#include "prodrisk/error.hpp"
#include "prodrisk/format.hpp"
#include "prodrisk/presets.hpp"
#include "prodrisk/rng.hpp"

namespace prodrisk {

namespace {

std::vector<double> linspace_tenths() {
    std::vector<double> axis;
    for (int k = 0; k <= 10; ++k) {
        axis.push_back(k / 10.0);
    }
    return axis;
}

void check_worker_count(double n) {
    if (!(n >= 1.0) || n != std::floor(n)) {
        throw ValidationError("cluster grid values must be positive integers");
    }
}

RunConfig with_alpha(const RunConfig& base, int node_id, double alpha) {
    const auto v = base.topology.find_node(node_id);
    if (!v || base.topology.nodes()[*v].out.size() != 2) {
        throw ValidationError("alpha grid needs node " + std::to_string(node_id) + " with exactly two outgoing edges");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw ValidationError("alpha grid values must lie in [0, 1]");
    }
    RunConfig cfg = base;
    cfg.topology = base.topology.with_rates(node_id, {alpha, 1.0 - alpha});
    return cfg;
}

void set_workers(RunConfig& cfg, std::size_t e, int workers) {
    std::vector<double> levels;
    for (int j = 0; j <= workers; ++j) {
        levels.push_back(j);
    }
    cfg.topology = cfg.topology.with_capacities(e, std::move(levels));
    std::get<ClusterModel>(cfg.rate_model).edges[e].workers = workers;
}

const char* policy_name(SeedPolicy policy) { return policy == SeedPolicy::Shared ? "shared" : "independent"; }

}  // namespace

GridSpec GridSpec::alpha_default() {
    return {GridVariable::AlphaPair, linspace_tenths(), linspace_tenths(), kDiamondAlpha1Node, kDiamondAlpha2Node};
}

GridSpec GridSpec::cluster_default() {
    std::vector<double> axis;
    for (int n = 5; n <= 15; ++n) {
        axis.push_back(n);
    }
    return {GridVariable::ClusterPair, axis, axis, 0, 0};
}

std::vector<std::string> PlanResult::measures() const {
    std::vector<std::string> names{"mean", "std", "bankruptcy"};
    for (double level : levels) {
        names.push_back("var_" + format_csv(level));
    }
    for (double level : levels) {
        names.push_back("avar_" + format_csv(level));
    }
    return names;
}

std::vector<double> PlanResult::heatmap(const std::string& measure) const {
    std::vector<double> matrix;
    matrix.reserve(reports.size());
    for (const auto& report : reports) {
        matrix.push_back(measure_value(report, measure));
    }
    return matrix;
}

RunConfig configure_point(const GridSpec& grid, const RunConfig& base, double first, double second) {
    if (grid.variable == GridVariable::AlphaPair) {
        RunConfig cfg = with_alpha(base, grid.first_node, first);
        cfg = with_alpha(cfg, grid.second_node, second);
        validate(cfg);
        return cfg;
    }
    if (!is_cluster(base.rate_model) || base.topology.edge_count() < 2) {
        throw ValidationError("cluster grid needs a cluster rate model with at least two edges");
    }
    check_worker_count(first);
    check_worker_count(second);
    RunConfig cfg = base;
    set_workers(cfg, 0, static_cast<int>(first));
    set_workers(cfg, 1, static_cast<int>(second));
    validate(cfg);
    return cfg;
}

double measure_value(const MeasureReport& report, const std::string& measure) {
    if (measure == "mean") {
        return report.profit.mean;
    }
    if (measure == "std") {
        return report.profit.std_dev.value_or(std::numeric_limits<double>::quiet_NaN());
    }
    if (measure == "bankruptcy") {
        return report.bankruptcy_probability;
    }
    for (const auto& level : report.levels) {
        const std::string suffix = format_csv(level.level);
        if (measure == "var_" + suffix) {
            return level.value_at_risk;
        }
        if (measure == "avar_" + suffix) {
            return level.average_value_at_risk;
        }
    }
    throw std::invalid_argument("unknown measure '" + measure + "'");
}

std::vector<BestPoint> select_best(const GridSpec& grid, const std::vector<MeasureReport>& reports,
                                   const std::vector<double>& levels) {
    PlanResult view;
    view.levels = levels;
    std::vector<BestPoint> best;
    for (const std::string& measure : view.measures()) {
        const bool maximise = measure == "mean";
        std::optional<BestPoint> pick;
        for (std::size_t row = 0; row < grid.rows(); ++row) {
            for (std::size_t col = 0; col < grid.cols(); ++col) {
                const double value = measure_value(reports[row * grid.cols() + col], measure);
                if (std::isnan(value)) {
                    continue;
                }
                const bool better = !pick || (maximise ? value > pick->value : value < pick->value);
                if (better) {
                    pick = BestPoint{measure, row, col, value};
                }
            }
        }
        if (pick) {
            best.push_back(*pick);
        }
    }
    return best;
}

PlanResult plan(const GridSpec& grid, const RunConfig& base, const PlanOptions& options) {
    if (grid.rows() == 0 || grid.cols() == 0) {
        throw ValidationError("grid axes must be non-empty");
    }
    PlanResult result;
    result.grid = grid;
    result.policy = options.policy;
    result.levels = base.risk_levels;

    // Validate every point before spending time on simulation.
    std::vector<RunConfig> configs;
    for (double first : grid.first_axis) {
        for (double second : grid.second_axis) {
            configs.push_back(configure_point(grid, base, first, second));
        }
    }

    for (std::size_t k = 0; k < configs.size(); ++k) {
        RunConfig& cfg = configs[k];
        cfg.samples = options.samples;
        cfg.seed = options.policy == SeedPolicy::Shared ? options.seed : derive_seed(options.seed, k);
        const EnsembleResult ensemble = run_ensemble(cfg, {options.threads});
        result.reports.push_back(make_report(ensemble.samples, result.levels, options.quantile));
    }
    result.best = select_best(grid, result.reports, result.levels);
    return result;
}

nlohmann::json best_summary(const PlanResult& result) {
    nlohmann::json best = nlohmann::json::object();
    for (const auto& point : result.best) {
        best[point.measure] = {{"row", point.row},
                               {"col", point.col},
                               {"first", result.grid.first_axis[point.row]},
                               {"second", result.grid.second_axis[point.col]},
                               {"value", point.value}};
    }
    return {{"variable", result.grid.variable == GridVariable::AlphaPair ? "alpha" : "cluster"},
            {"seed_policy", policy_name(result.policy)},
            {"first_axis", result.grid.first_axis},
            {"second_axis", result.grid.second_axis},
            {"levels", result.levels},
            {"samples_per_point", result.reports.empty() ? 0 : result.reports.front().samples},
            {"best", std::move(best)}};
}

void emit_heatmaps(const PlanResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    const std::size_t cols = result.grid.cols();
    for (const std::string& measure : result.measures()) {
        const auto path = dir / (measure + ".csv");
        std::ofstream out(path);
        if (!out) {
            throw IoError("cannot write " + path.string());
        }
        const auto matrix = result.heatmap(measure);
        for (std::size_t row = 0; row < result.grid.rows(); ++row) {
            for (std::size_t col = 0; col < cols; ++col) {
                out << (col ? "," : "") << format_csv(matrix[row * cols + col]);
            }
            out << '\n';
        }
        if (!out) {
            throw IoError("failed writing " + path.string());
        }
    }
    const auto path = dir / "best.json";
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << best_summary(result).dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

}  // namespace prodrisk
