#pragma once

#include "tis/env.hpp"
#include "tis/planner.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace tis {

struct TrialRecord {
    std::size_t trial = 0;
    Strategy strategy = Strategy::uniform;
    std::uint64_t seed = 0;
    std::vector<PlannerEvent> events;
    /// Planner failure message; empty on success.
    std::string error;
    /// Library construction done by this trial itself.
    double library_build_ms = 0.0;
};

struct BatchResult {
    /// Ordered by strategy (as requested), then trial.
    std::vector<TrialRecord> records;
    /// Time spent preparing the shared reachability library, if any.
    double library_build_ms = 0.0;
};

/// Worker count from TIS_WORKERS, else the hardware concurrency (at least 1).
std::size_t default_workers();

/**
 * Runs every strategy for `trials` trials. Trial i uses seed base_seed + i for
 * every strategy. When config.library.horizon > 0 and TIE is requested, one
 * library is built up front and shared. workers = 0 means default_workers().
 * Records do not depend on scheduling when the budget counts iterations.
 */
BatchResult run_trials(const ProblemConfig& config, const std::vector<Strategy>& strategies,
                       std::size_t trials, const Budget& budget, std::uint64_t base_seed,
                       std::size_t workers = 0);

enum class Axis { seconds, iterations };

struct ConvergenceRow {
    Strategy strategy = Strategy::uniform;
    /// Right edge of the bin (seconds or iterations).
    double bin_end = 0.0;
    std::size_t solved = 0;
    std::size_t unsolved = 0;
    /// NaN when no trial is solved at bin_end.
    double mean = 0.0;
    double median = 0.0;
    /// Sample standard deviation; 0 for a single trial.
    double stddev = 0.0;

    friend bool operator==(const ConvergenceRow&, const ConvergenceRow&) = default;
};

struct ConvergenceTable {
    Axis axis = Axis::seconds;
    double bin = 0.0;
    std::vector<ConvergenceRow> rows;
};

/**
 * Best cost of every trial at the end of each bin, summarised per strategy.
 * Trials without a solution by then are counted as unsolved and excluded from
 * the statistics. Failed trials are skipped. Throws std::invalid_argument for
 * an empty record list or bin <= 0.
 */
ConvergenceTable aggregate(const std::vector<TrialRecord>& records, double bin,
                           Axis axis = Axis::seconds);

/// Best cost at `at` (seconds or iterations), +inf when not yet solved.
double cost_at(const TrialRecord& record, double at, Axis axis);

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
};

/// NaN fields for an empty sample.
Summary summarize(std::vector<double> values);

struct FallbackRow {
    int attempts = 0;
    std::size_t trials = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double median = 0.0;
};

/// TIE runs with n_s set to each value of `attempts`; per trial the final
/// fallbacks / calls ratio. Trials that never sampled are left out.
std::vector<FallbackRow> fallback_study(const ProblemConfig& config,
                                        const std::vector<int>& attempts, std::size_t trials,
                                        const Budget& budget, std::uint64_t base_seed,
                                        std::size_t workers = 0);

// --- CSV --------------------------------------------------------------------

inline constexpr const char* kRecordsHeader =
    "trial,strategy,seed,error,library_build_ms,wall_ms,iteration,best_cost,vertices,"
    "candidates_generated,candidates_accepted,sampler_calls,fallbacks";
inline constexpr const char* kTableHeader = "strategy,bin_end,solved,unsolved,mean,median,std";
inline constexpr const char* kFallbackHeader = "n_s,trials,mean,std,median";

/// One row per event; a trial without events gets one row with empty event
/// fields.
void emit_csv(const std::vector<TrialRecord>& records, std::ostream& out);
void emit_csv(const ConvergenceTable& table, std::ostream& out);
void emit_csv(const std::vector<FallbackRow>& rows, std::ostream& out);

/// `time` column followed by `<strategy>_median,<strategy>_std` per strategy.
void emit_plot_data(const ConvergenceTable& table, std::ostream& out);

std::vector<TrialRecord> read_records_csv(std::istream& in);
ConvergenceTable read_table_csv(std::istream& in, Axis axis = Axis::seconds);

/// Throw std::runtime_error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace tis
