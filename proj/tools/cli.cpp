#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prodrisk/capacity.hpp"
#include "prodrisk/config.hpp"
#include "prodrisk/ensemble.hpp"
#include "prodrisk/error.hpp"
#include "prodrisk/format.hpp"
#include "prodrisk/measures.hpp"
#include "prodrisk/planner.hpp"
#include "prodrisk/presets.hpp"
#include "prodrisk/rng.hpp"
#include "prodrisk/solver.hpp"

namespace prodrisk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string preset;
    std::string config;
    std::string out;
    std::string input;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<double> horizon;
    std::vector<double> levels;
    unsigned threads = 0;
    bool ensemble = false;
    std::string seed_policy = "shared";
    std::string quantile = "midpoint";
    std::vector<double> first_axis;
    std::vector<double> second_axis;

    // analyze-ctmc
    std::optional<int> workers;
    std::optional<double> mtbf;
    std::optional<double> mrt;
    std::optional<double> lambda0;
    std::optional<double> lambda1;
    std::vector<double> times{0.0, 1.0, 10.0, 100.0};
};

void add_source(CLI::App* cmd, Options& o) {
    auto* preset = cmd->add_option("--preset", o.preset, "built-in experiment")
                       ->check(CLI::IsMember({"diamond", "serial2"}));
    auto* config = cmd->add_option("--config", o.config, "JSON run config");
    preset->excludes(config);
}

void add_overrides(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--samples", o.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
    cmd->add_option("--horizon", o.horizon, "time horizon T");
    cmd->add_option("--levels", o.levels, "risk levels, comma separated")->delimiter(',');
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

void add_quantile(CLI::App* cmd, Options& o) {
    cmd->add_option("--quantile", o.quantile, "empirical quantile convention")
        ->check(CLI::IsMember({"midpoint", "upper"}))
        ->capture_default_str();
}

QuantileMethod quantile_method(const Options& o) {
    return o.quantile == "upper" ? QuantileMethod::UpperStep : QuantileMethod::Midpoint;
}

RunConfig resolve_config(const Options& o, const std::string& fallback) {
    RunConfig cfg;
    if (!o.config.empty()) {
        cfg = load_config(o.config);
    } else {
        const std::string name = o.preset.empty() ? fallback : o.preset;
        if (name.empty()) {
            throw ValidationError("one of --preset or --config is required");
        }
        cfg = *preset_by_name(name);
    }
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (o.samples) {
        cfg.samples = *o.samples;
    }
    if (o.horizon) {
        cfg.horizon = *o.horizon;
    }
    if (!o.levels.empty()) {
        cfg.risk_levels = o.levels;
    }
    validate(cfg);
    return cfg;
}

fs::path require_out(const Options& o) {
    if (o.out.empty()) {
        throw ValidationError("--out is required");
    }
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) {
        throw IoError("cannot create output directory " + o.out + ": " + ec.message());
    }
    return o.out;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot write " + path.string());
    }
    body(file);
    file.flush();
    if (!file) {
        throw IoError("failed writing " + path.string());
    }
}

void write_json(const fs::path& path, const json& doc) {
    write_file(path, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
}

int cmd_simulate(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve_config(o, "");
    const fs::path dir = require_out(o);
    write_json(dir / "config.json", to_json(cfg));

    if (o.ensemble) {
        const EnsembleResult result = run_ensemble(cfg, {o.threads});
        write_file(dir / "samples.csv", [&](std::ostream& s) { write_samples_csv(s, result.samples); });
        write_json(dir / "ensemble.json", ensemble_metadata(cfg, result));
        const MeasureReport report = make_report(result.samples, cfg.risk_levels);
        out << "samples " << result.samples.size() << "\n";
        out << "profit mean " << format_csv(report.profit.mean) << "\n";
        out << "bankruptcy " << format_csv(report.bankruptcy_probability) << "\n";
        return kOk;
    }

    RngStream rng = RngStream::for_sample(cfg.seed, 0);
    const PathResult path = simulate_path(cfg, rng);
    const PathFunctionalSample sample = path_functionals(path.trace, cfg.profit);
    write_file(dir / "timeseries.csv", [&](std::ostream& s) { write_time_series(s, cfg, path.trace); });
    write_file(dir / "jumps.json", [&](std::ostream& s) { write_jump_log(s, cfg, path.jumps); });
    write_file(dir / "samples.csv", [&](std::ostream& s) { write_samples_csv(s, std::span(&sample, 1)); });
    out << "jumps " << path.jumps.size() << "\n";
    out << "profit " << format_csv(sample.profit) << "\n";
    out << "outflow " << format_csv(sample.outflow) << "\n";
    out << "queue_load " << format_csv(sample.queue_load) << "\n";
    return kOk;
}

int cmd_measure(const Options& o, std::ostream& out) {
    fs::path input = o.input;
    if (input.empty()) {
        if (o.out.empty()) {
            throw ValidationError("measure needs --input or --out");
        }
        input = fs::path(o.out) / "samples.csv";
    }
    std::ifstream file(input);
    if (!file) {
        throw IoError("cannot open " + input.string());
    }
    const auto samples = read_samples_csv(file);
    const std::vector<double> levels = o.levels.empty() ? std::vector<double>{0.1} : o.levels;
    for (double level : levels) {
        if (!(level > 0.0 && level < 1.0)) {
            throw ValidationError("risk level " + format_csv(level) + " outside (0, 1)");
        }
    }
    const json report = to_json(make_report(samples, levels, quantile_method(o)));
    if (!o.out.empty()) {
        write_json(require_out(o) / "report.json", report);
    }
    out << report.dump(2) << "\n";
    return kOk;
}

int cmd_plan(const Options& o, std::ostream& out, GridSpec grid, const std::string& fallback) {
    const RunConfig base = resolve_config(o, fallback);
    const fs::path dir = require_out(o);
    if (!o.first_axis.empty()) {
        grid.first_axis = o.first_axis;
    }
    if (!o.second_axis.empty()) {
        grid.second_axis = o.second_axis;
    }
    PlanOptions options;
    options.samples = base.samples;
    options.seed = base.seed;
    options.policy = o.seed_policy == "independent" ? SeedPolicy::Independent : SeedPolicy::Shared;
    options.threads = o.threads;
    options.quantile = quantile_method(o);

    const PlanResult result = plan(grid, base, options);
    emit_heatmaps(result, dir);
    out << best_summary(result).dump(2) << "\n";
    return kOk;
}

json analyze_cluster(const ClusterParams& params, const std::vector<double>& times) {
    json laws = json::array();
    for (double t : times) {
        laws.push_back({{"t", t},
                        {"availability", worker_availability(params.rate_on, params.rate_off, t)},
                        {"law", ctmc_binomial_law(params.workers, params.rate_on, params.rate_off, t)}});
    }
    const double steady = params.rate_on / (params.rate_on + params.rate_off);
    return {{"workers", params.workers},
            {"lambda0", params.rate_on},
            {"lambda1", params.rate_off},
            {"mrt", 1.0 / params.rate_on},
            {"mtbf", 1.0 / params.rate_off},
            {"steady_state_availability", steady},
            {"steady_state_mean", steady_state_mean_capacity(params.workers, params.rate_on, params.rate_off)},
            {"steady_state_law",
             ctmc_binomial_law(params.workers, params.rate_on, params.rate_off, std::numeric_limits<double>::infinity())},
            {"laws", std::move(laws)}};
}

int cmd_analyze_ctmc(const Options& o, std::ostream& out) {
    for (double t : o.times) {
        if (!(t >= 0.0)) {
            throw ValidationError("--times must be non-negative");
        }
    }
    json clusters = json::array();
    const bool explicit_params = o.workers || o.mtbf || o.mrt || o.lambda0 || o.lambda1;
    if (explicit_params) {
        if (!o.workers) {
            throw ValidationError("--N is required");
        }
        if (*o.workers < 1) {
            throw ValidationError("--N must be at least 1");
        }
        ClusterParams params;
        params.workers = *o.workers;
        if (o.mtbf || o.mrt) {
            if (!o.mtbf || !o.mrt) {
                throw ValidationError("--mtbf and --mrt must be given together");
            }
            if (!(*o.mtbf > 0.0) || !(*o.mrt > 0.0)) {
                throw ValidationError("MTBF and MRT must be positive");
            }
            params.rate_on = 1.0 / *o.mrt;
            params.rate_off = 1.0 / *o.mtbf;
        } else {
            if (!o.lambda0 || !o.lambda1) {
                throw ValidationError("give --mtbf/--mrt or --lambda0/--lambda1");
            }
            if (!(*o.lambda0 > 0.0) || !(*o.lambda1 > 0.0)) {
                throw ValidationError("rates must be positive");
            }
            params.rate_on = *o.lambda0;
            params.rate_off = *o.lambda1;
        }
        clusters.push_back(analyze_cluster(params, o.times));
    } else {
        const RunConfig cfg = resolve_config(o, "");
        const auto* model = std::get_if<ClusterModel>(&cfg.rate_model);
        if (!model) {
            throw ValidationError("analyze-ctmc needs a cluster rate model");
        }
        for (std::size_t e = 0; e < model->edges.size(); ++e) {
            json entry = analyze_cluster(model->edges[e], o.times);
            entry["edge"] = cfg.topology.edge(e).id;
            clusters.push_back(std::move(entry));
        }
    }
    const json doc = {{"clusters", std::move(clusters)}};
    if (!o.out.empty()) {
        write_json(require_out(o) / "ctmc.json", doc);
    }
    out << doc.dump(2) << "\n";
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic production network simulation and risk-based planning", "prodrisk"};
    app.set_help_flag();
    app.set_help_all_flag("-h,--help", "print help for every subcommand and flag");
    app.require_subcommand(1, 1);

    Options o;

    auto* simulate = app.add_subcommand("simulate", "simulate one path, or an ensemble with --ensemble");
    add_source(simulate, o);
    add_overrides(simulate, o);
    simulate->add_option("--out", o.out, "output directory");
    simulate->add_flag("--ensemble", o.ensemble, "run --samples paths and write samples.csv");

    auto* measure = app.add_subcommand("measure", "risk report from samples.csv");
    measure->add_option("--input", o.input, "samples.csv (default: <out>/samples.csv)");
    measure->add_option("--out", o.out, "directory for report.json");
    measure->add_option("--levels", o.levels, "risk levels, comma separated")->delimiter(',');
    add_quantile(measure, o);

    auto plan_command = [&](const char* name, const char* help) {
        auto* cmd = app.add_subcommand(name, help);
        add_source(cmd, o);
        add_overrides(cmd, o);
        cmd->add_option("--out", o.out, "output directory for heatmaps");
        cmd->add_option("--seed-policy", o.seed_policy, "random numbers across grid points")
            ->check(CLI::IsMember({"shared", "independent"}))
            ->capture_default_str();
        cmd->add_option("--first", o.first_axis, "first axis values, comma separated")->delimiter(',');
        cmd->add_option("--second", o.second_axis, "second axis values, comma separated")->delimiter(',');
        add_quantile(cmd, o);
        return cmd;
    };
    auto* plan_alpha = plan_command("plan-alpha", "grid over the two routing shares (default preset diamond)");
    auto* plan_cluster = plan_command("plan-cluster", "grid over two cluster sizes (default preset serial2)");

    auto* ctmc = app.add_subcommand("analyze-ctmc", "binomial laws and steady state of worker clusters");
    add_source(ctmc, o);
    ctmc->add_option("--N", o.workers, "number of workers");
    ctmc->add_option("--mtbf", o.mtbf, "mean time between failures");
    ctmc->add_option("--mrt", o.mrt, "mean repair time");
    ctmc->add_option("--lambda0", o.lambda0, "repair rate per worker");
    ctmc->add_option("--lambda1", o.lambda1, "failure rate per worker");
    ctmc->add_option("--times", o.times, "evaluation times, comma separated")->delimiter(',');
    ctmc->add_option("--out", o.out, "directory for ctmc.json");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*simulate) {
            return cmd_simulate(o, out);
        }
        if (*measure) {
            return cmd_measure(o, out);
        }
        if (*plan_alpha) {
            return cmd_plan(o, out, GridSpec::alpha_default(), "diamond");
        }
        if (*plan_cluster) {
            return cmd_plan(o, out, GridSpec::cluster_default(), "serial2");
        }
        return cmd_analyze_ctmc(o, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
}

}  // namespace prodrisk::cli
