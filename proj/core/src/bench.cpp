#include "tis/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace tis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Runs job(i) for i in [0, count) on up to `workers` threads. The first
/// exception escaping a job is rethrown after all threads finish.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job&& job) {
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

TrialRecord run_one(const ProblemConfig& config, Strategy strategy, std::size_t trial,
                    std::uint64_t seed, const Budget& budget,
                    const std::shared_ptr<const ReachLibrary>& library) {
    TrialRecord rec;
    rec.trial = trial;
    rec.strategy = strategy;
    rec.seed = seed;
    try {
        Rng rng(seed);
        PlannerResult res = solve(config, strategy, budget, rng, library);
        rec.events = std::move(res.events);
        rec.library_build_ms = res.library_build_ms;
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

}  // namespace

std::size_t default_workers() {
    if (const char* env = std::getenv("TIS_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

BatchResult run_trials(const ProblemConfig& config, const std::vector<Strategy>& strategies,
                       std::size_t trials, const Budget& budget, std::uint64_t base_seed,
                       std::size_t workers) {
    if (trials == 0) {
        throw std::invalid_argument("run_trials: need at least one trial");
    }
    if (strategies.empty()) {
        throw std::invalid_argument("run_trials: no strategy given");
    }
    BatchResult out;
    std::shared_ptr<const ReachLibrary> library;
    const bool wants_library =
        std::find(strategies.begin(), strategies.end(), Strategy::time_informed) !=
        strategies.end();
    if (wants_library && config.library.horizon > 0.0) {
        const auto t0 = std::chrono::steady_clock::now();
        library = std::make_shared<const ReachLibrary>(build_library(
            config.system, config.environment.start(), config.environment.goal(),
            config.library.horizon, config.library.step, config.library.start_radius,
            config.name));
        out.library_build_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
    }

    const std::size_t jobs = strategies.size() * trials;
    out.records.resize(jobs);
    parallel_for(jobs, workers == 0 ? default_workers() : workers, [&](std::size_t j) {
        const Strategy s = strategies[j / trials];
        const std::size_t trial = j % trials;
        out.records[j] = run_one(config, s, trial, base_seed + trial, budget,
                                 s == Strategy::time_informed ? library : nullptr);
    });
    return out;
}

double cost_at(const TrialRecord& record, double at, Axis axis) {
    double best = kInf;
    for (const auto& e : record.events) {
        const double x = axis == Axis::seconds ? e.wall_ms / 1000.0
                                               : static_cast<double>(e.iteration);
        if (x > at) {
            break;
        }
        best = std::min(best, e.best_cost);
    }
    return best;
}

Summary summarize(std::vector<double> values) {
    Summary s;
    s.count = values.size();
    if (values.empty()) {
        s.mean = s.median = s.stddev = kNaN;
        return s;
    }
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const std::size_t mid = values.size() / 2;
    s.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    } else {
        s.stddev = 0.0;
    }
    return s;
}

ConvergenceTable aggregate(const std::vector<TrialRecord>& records, double bin, Axis axis) {
    if (records.empty()) {
        throw std::invalid_argument("aggregate: no records");
    }
    if (!(bin > 0.0)) {
        throw std::invalid_argument("aggregate: bin must be positive");
    }
    // Strategies in enum order; per-bin statistics sort their samples, so the
    // table does not depend on record order.
    std::vector<Strategy> order;
    std::map<Strategy, std::vector<const TrialRecord*>> by_strategy;
    double span = 0.0;
    for (const auto& r : records) {
        if (!r.error.empty()) continue;
        if (!by_strategy.count(r.strategy)) order.push_back(r.strategy);
        by_strategy[r.strategy].push_back(&r);
        if (!r.events.empty()) {
            const auto& e = r.events.back();
            span = std::max(span, axis == Axis::seconds ? e.wall_ms / 1000.0
                                                        : static_cast<double>(e.iteration));
        }
    }
    std::sort(order.begin(), order.end());

    ConvergenceTable table;
    table.axis = axis;
    table.bin = bin;
    const auto bins = std::max<long>(1, static_cast<long>(std::ceil(span / bin - 1e-9)));
    for (Strategy s : order) {
        for (long k = 1; k <= bins; ++k) {
            const double end = static_cast<double>(k) * bin;
            std::vector<double> costs;
            std::size_t unsolved = 0;
            for (const TrialRecord* r : by_strategy[s]) {
                const double c = cost_at(*r, end, axis);
                if (std::isfinite(c)) {
                    costs.push_back(c);
                } else {
                    ++unsolved;
                }
            }
            const Summary sum = summarize(std::move(costs));
            table.rows.push_back({s, end, sum.count, unsolved, sum.mean, sum.median, sum.stddev});
        }
    }
    return table;
}

std::vector<FallbackRow> fallback_study(const ProblemConfig& config,
                                        const std::vector<int>& attempts, std::size_t trials,
                                        const Budget& budget, std::uint64_t base_seed,
                                        std::size_t workers) {
    std::vector<FallbackRow> rows;
    ProblemConfig cfg = config;
    for (int ns : attempts) {
        if (ns < 1) {
            throw std::invalid_argument("fallback_study: n_s must be at least 1");
        }
        cfg.tie.attempts = ns;
        const BatchResult batch =
            run_trials(cfg, {Strategy::time_informed}, trials, budget, base_seed, workers);
        std::vector<double> ratios;
        for (const auto& r : batch.records) {
            if (!r.error.empty() || r.events.empty()) continue;
            const auto& e = r.events.back();
            if (e.sampler_calls > 0) {
                ratios.push_back(static_cast<double>(e.fallbacks) /
                                 static_cast<double>(e.sampler_calls));
            }
        }
        const Summary s = summarize(std::move(ratios));
        rows.push_back({ns, s.count, s.mean, s.stddev, s.median});
    }
    return rows;
}

}  // namespace tis
