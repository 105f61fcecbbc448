#include "prodrisk/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

#include "prodrisk/capacity.hpp"
#include "prodrisk/error.hpp"
#include "prodrisk/format.hpp"
#include "prodrisk/rng.hpp"

namespace prodrisk {

namespace {

double parse_double(std::string_view text, std::size_t line) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError("samples.csv line " + std::to_string(line) + ": invalid number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

}  // namespace

PathFunctionalSample simulate_sample(const RunConfig& cfg, std::size_t index) {
    RngStream rng = RngStream::for_sample(cfg.seed, index);
    const PathResult path = simulate_path(cfg, rng);
    return path_functionals(path.trace, cfg.profit);
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                        next = n;
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

EnsembleResult run_ensemble(const RunConfig& cfg, const EnsembleOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    EnsembleResult result;
    result.fingerprint = config_fingerprint(cfg);
    result.samples.resize(cfg.samples);
    parallel_for(cfg.samples, options.threads, [&](std::size_t i) { result.samples[i] = simulate_sample(cfg, i); });
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::uint64_t config_fingerprint(const RunConfig& cfg) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_json(cfg).dump()) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void write_samples_csv(std::ostream& out, std::span<const PathFunctionalSample> samples) {
    out << "idx,profit,outflow,queue_load\n";
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out << i << ',' << format_csv(samples[i].profit) << ',' << format_csv(samples[i].outflow) << ','
            << format_csv(samples[i].queue_load) << '\n';
    }
}

std::vector<PathFunctionalSample> read_samples_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("samples.csv is empty");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "idx,profit,outflow,queue_load") {
        throw ParseError("samples.csv: unexpected header '" + line + "'");
    }
    std::vector<PathFunctionalSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto fields = split(line);
        if (fields.size() != 4) {
            throw ParseError("samples.csv line " + std::to_string(line_no) + ": expected 4 fields");
        }
        parse_double(fields[0], line_no);
        samples.push_back({parse_double(fields[1], line_no), parse_double(fields[2], line_no),
                           parse_double(fields[3], line_no)});
    }
    if (samples.empty()) {
        throw ParseError("samples.csv contains no samples");
    }
    return samples;
}

nlohmann::json ensemble_metadata(const RunConfig& cfg, const EnsembleResult& result) {
    std::ostringstream fingerprint;
    fingerprint << std::hex << result.fingerprint;
    return {{"fingerprint", fingerprint.str()},
            {"samples", result.samples.size()},
            {"seed", cfg.seed},
            {"rng", "mt19937_64 seeded by splitmix64(seed, sample index)"},
            {"config", to_json(cfg)}};
}

}  // namespace prodrisk
