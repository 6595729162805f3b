#pragma once

#include "tis/env.hpp"
#include "tis/linsys.hpp"
#include "tis/params.hpp"
#include "tis/reach.hpp"
#include "tis/sst_tree.hpp"
#include "tis/time_informed_set.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tis {

enum class Strategy { uniform, informed_propagation, time_informed };

/// "uniform", "ip", "tie".
std::string to_string(Strategy s);
/// Inverse of to_string. Throws std::invalid_argument for other names.
Strategy parse_strategy(const std::string& name);

/// Either a wall-clock budget in seconds or a fixed iteration count.
struct Budget {
    enum class Kind { wall, iterations };
    Kind kind = Kind::iterations;
    double seconds = 0.0;
    std::size_t iterations = 0;

    static Budget wall(double seconds) { return {Kind::wall, seconds, 0}; }
    static Budget iters(std::size_t n) { return {Kind::iterations, 0.0, n}; }
};

struct PlannerCounters {
    std::size_t iterations = 0;
    /// Rollouts that produced an in-bounds, collision-free candidate.
    std::size_t candidates_generated = 0;
    /// Candidates that went into the tree.
    std::size_t candidates_accepted = 0;
    std::size_t rejected_collision = 0;
    std::size_t rejected_informed = 0;
    std::size_t rejected_witness = 0;

    friend bool operator==(const PlannerCounters&, const PlannerCounters&) = default;
};

struct PlannerEvent {
    double wall_ms = 0.0;
    std::size_t iteration = 0;
    /// +inf before the first solution.
    double best_cost = 0.0;
    std::size_t vertices = 0;
    std::size_t candidates_generated = 0;
    std::size_t candidates_accepted = 0;
    std::size_t sampler_calls = 0;
    std::size_t fallbacks = 0;
};

/// Equality on everything except the wall-clock stamp.
bool same_progress(const PlannerEvent& a, const PlannerEvent& b);

struct Solution {
    double cost = 0.0;
    Trajectory trajectory;
    std::size_t iteration = 0;
    double wall_ms = 0.0;
};

struct PlannerResult {
    std::optional<Trajectory> best;
    double best_cost = 0.0;
    /// Every improvement, in order of discovery.
    std::vector<Solution> solutions;
    std::vector<PlannerEvent> events;
    PlannerCounters counters;
    SamplerStats sampler;
    /// Time spent building a reachability library during the run. Not charged
    /// against the budget.
    double library_build_ms = 0.0;
};

bool goal_satisfied(const Environment& env, const Vector& x);

/**
 * SST with a pluggable exploration strategy.
 *
 * uniform: targets are uniform in the state box (goal-biased).
 * informed_propagation: as uniform, but expansions from nodes whose
 *   cost-to-come exceeds the best cost are rejected and rollouts are capped
 *   at the remaining budget.
 * time_informed: once a solution exists, targets come from the time-informed
 *   set and candidates must pass its vertex inclusion test.
 *
 * The library may be shared between planners; when it is missing or shorter
 * than the first solution cost, one is built on demand.
 */
class SstPlanner {
public:
    SstPlanner(LtiSystem system, Environment env, Strategy strategy, PlannerParams params = {},
               TisParams tis_params = {}, LibraryParams library_params = {},
               std::shared_ptr<const ReachLibrary> library = nullptr);

    PlannerResult solve(const Budget& budget, Rng& rng);

    /// Tree of the last solve, for inspection.
    const SstTree* tree() const { return tree_.get(); }

private:
    struct Candidate {
        Trajectory rollout;
        Vector control;
        bool reaches_goal = false;
    };

    Vector sample_target(Rng& rng);
    std::optional<Candidate> extend(std::size_t node, Rng& rng);
    Trajectory extract(std::size_t parent, const Candidate& c) const;
    void ensure_informed_set(double best_cost, PlannerResult& result);

    LtiSystem system_;
    Environment env_;
    Strategy strategy_;
    PlannerParams params_;
    TisParams tis_params_;
    LibraryParams library_params_;
    std::shared_ptr<const ReachLibrary> library_;
    std::unique_ptr<TimeInformedSet> informed_;
    std::unique_ptr<SstTree> tree_;
    PlannerCounters counters_;
    double best_cost_ = 0.0;
};

/// Convenience wrapper around SstPlanner::solve.
PlannerResult solve(const ProblemConfig& config, Strategy strategy, const Budget& budget, Rng& rng,
                    std::shared_ptr<const ReachLibrary> library = nullptr);

}  // namespace tis
