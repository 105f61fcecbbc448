#include "prodrisk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prodrisk {

namespace {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double sum = 0.0;
        for (double v : values) {
            sum += v;
        }
        return sum;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

// Adaptive Simpson without the Richardson correction term, so a non-negative
// integrand always yields a non-negative result.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fm = f(0.5 * (a + b));
    const double fb = f(b);
    return adaptive_simpson(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

void check_level(double t) {
    if (!(t > 0.0 && t < 1.0)) {
        throw std::invalid_argument("quantile level must lie in (0, 1)");
    }
}

std::vector<double> column(std::span<const PathFunctionalSample> samples, double PathFunctionalSample::*field) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.*field);
    }
    return out;
}

nlohmann::json stats_json(const SummaryStats& stats) {
    nlohmann::json out;
    out["mean"] = stats.mean;
    out["std"] = stats.std_dev ? nlohmann::json(*stats.std_dev) : nlohmann::json(nullptr);
    return out;
}

}  // namespace

double cumulative_outflow(const FluxTrace& trace) {
    double total = 0.0;
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        total += trace.dt * trace.total_exit_flow(n);
    }
    return total;
}

double cumulative_queue_load(const FluxTrace& trace) {
    double total = 0.0;
    for (double q : trace.queue) {
        total += trace.dt * q;
    }
    return total;
}

double profit(const FluxTrace& trace, const ProfitSpec& spec) {
    double cluster_rate = 0.0;
    for (std::size_t e = 0; e < spec.cluster_sizes.size() && e < spec.cluster_cost.size(); ++e) {
        cluster_rate += spec.cluster_sizes[e] * spec.cluster_cost[e];
    }
    double total = 0.0;
    for (std::size_t n = 0; n < trace.steps(); ++n) {
        double storage = 0.0;
        for (std::size_t e = 0; e < trace.edges; ++e) {
            storage += trace.at(trace.queue, n, e) * spec.storage_cost[e];
        }
        total += trace.dt * (spec.price * trace.total_exit_flow(n) - storage - cluster_rate);
    }
    return total;
}

PathFunctionalSample path_functionals(const FluxTrace& trace, const ProfitSpec& spec) {
    return {profit(trace, spec), cumulative_outflow(trace), cumulative_queue_load(trace)};
}

EmpiricalQuantile::EmpiricalQuantile(std::span<const double> sample, QuantileMethod method)
    : sorted_(sample.begin(), sample.end()), method_(method) {
    if (sorted_.empty()) {
        throw std::invalid_argument("empirical quantile of an empty sample");
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalQuantile::operator()(double t) const {
    check_level(t);
    const auto m = static_cast<double>(sorted_.size());
    if (method_ == QuantileMethod::UpperStep) {
        const auto k = static_cast<std::size_t>(std::floor(t * m));
        return sorted_[std::min(k, sorted_.size() - 1)];
    }
    // Order statistic k (1-based) sits at position (k - 0.5) / M.
    const double pos = t * m + 0.5;
    if (pos <= 1.0) {
        return sorted_.front();
    }
    if (pos >= m) {
        return sorted_.back();
    }
    const double k = std::floor(pos);
    const double w = pos - k;
    const auto lo = static_cast<std::size_t>(k) - 1;
    return sorted_[lo] + w * (sorted_[lo + 1] - sorted_[lo]);
}

double EmpiricalQuantile::value_at_risk(double level) const { return -(*this)(level); }

std::vector<double> EmpiricalQuantile::breakpoints(double level) const {
    const std::size_t m = sorted_.size();
    const double offset = method_ == QuantileMethod::Midpoint ? 0.5 : 0.0;
    std::vector<double> points;
    for (std::size_t k = 1; k <= m; ++k) {
        const double p = (static_cast<double>(k) - offset) / static_cast<double>(m);
        if (p >= level) {
            break;
        }
        points.push_back(p);
    }
    return points;
}

double EmpiricalQuantile::average_value_at_risk(double level) const {
    check_level(level);
    const double top = (*this)(level);
    const double scale = std::max(std::abs(sorted_.front()), std::abs(sorted_.back()));
    const double tol = 1e-14 * (scale > 0.0 ? scale : 1.0) * level;

    // Integrate the non-negative shortfall q(level) - q(g) piece by piece
    // between the kinks of the quantile, then add it to V@R.
    std::vector<double> edges{0.0};
    const auto interior = breakpoints(level);
    edges.insert(edges.end(), interior.begin(), interior.end());
    edges.push_back(level);

    double area = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double a = edges[i];
        const double b = edges[i + 1];
        if (b <= a) {
            continue;
        }
        if (method_ == QuantileMethod::UpperStep) {
            // Constant on the piece; sample it away from the jumps.
            const double value = top - (*this)(0.5 * (a + b));
            area += integrate([value](double) { return value; }, a, b, tol);
        } else {
            const auto shortfall = [this, top](double g) {
                return g <= 0.0 ? top - sorted_.front() : top - (*this)(g);
            };
            area += integrate(shortfall, a, b, tol);
        }
    }
    return -top + area / level;
}

double empirical_upper_quantile(std::span<const double> sample, double t, QuantileMethod method) {
    return EmpiricalQuantile(sample, method)(t);
}

double value_at_risk(std::span<const double> sample, double level, QuantileMethod method) {
    return EmpiricalQuantile(sample, method).value_at_risk(level);
}

double average_value_at_risk(std::span<const double> sample, double level, QuantileMethod method) {
    return EmpiricalQuantile(sample, method).average_value_at_risk(level);
}

double bankruptcy_probability(std::span<const double> sample) {
    if (sample.empty()) {
        throw std::invalid_argument("bankruptcy probability of an empty sample");
    }
    const auto negative = std::count_if(sample.begin(), sample.end(), [](double x) { return x < 0.0; });
    return static_cast<double>(negative) / static_cast<double>(sample.size());
}

SummaryStats summarize(std::span<const double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summary of an empty sample");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = static_cast<double>(sorted.size());

    SummaryStats stats;
    stats.mean = pairwise_sum(sorted) / m;
    if (sorted.size() >= 2) {
        std::vector<double> squares;
        squares.reserve(sorted.size());
        for (double x : sorted) {
            squares.push_back((x - stats.mean) * (x - stats.mean));
        }
        stats.std_dev = std::sqrt(pairwise_sum(squares) / (m - 1.0));
    }
    return stats;
}

MeasureReport make_report(std::span<const PathFunctionalSample> samples, std::span<const double> levels,
                          QuantileMethod method) {
    const auto profits = column(samples, &PathFunctionalSample::profit);
    MeasureReport report;
    report.samples = samples.size();
    report.profit = summarize(profits);
    report.bankruptcy_probability = bankruptcy_probability(profits);
    const EmpiricalQuantile quantile(profits, method);
    for (double level : levels) {
        report.levels.push_back({level, quantile.value_at_risk(level), quantile.average_value_at_risk(level)});
    }
    report.outflow = summarize(column(samples, &PathFunctionalSample::outflow));
    report.queue_load = summarize(column(samples, &PathFunctionalSample::queue_load));
    return report;
}

nlohmann::json to_json(const MeasureReport& report) {
    nlohmann::json out;
    out["samples"] = report.samples;
    out["profit"] = stats_json(report.profit);
    out["bankruptcy_probability"] = report.bankruptcy_probability;
    nlohmann::json risk = nlohmann::json::array();
    for (const auto& level : report.levels) {
        risk.push_back({{"level", level.level},
                        {"value_at_risk", level.value_at_risk},
                        {"average_value_at_risk", level.average_value_at_risk}});
    }
    out["risk"] = std::move(risk);
    out["outflow"] = stats_json(report.outflow);
    out["queue_load"] = stats_json(report.queue_load);
    return out;
}

}  // namespace prodrisk
