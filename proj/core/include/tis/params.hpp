#pragma once

#include <cstddef>

namespace tis {

struct PlannerParams {
    /// Best-near selection radius (delta_BN).
    double selection_radius = 0.2;
    /// Witness pruning radius (delta_s); must be smaller than selection_radius.
    double pruning_radius = 0.1;
    /// RK4 step of every rollout, seconds.
    double dt = 0.01;
    /// Rollout durations are k * control_step with k uniform in [min_steps, max_steps].
    double control_step = 0.05;
    int min_steps = 1;
    int max_steps = 10;
    /// Spacing of collision checks along a rollout, seconds.
    double collision_resolution = 0.01;
    /// Probability of drawing the exploration target from the goal set while
    /// the target would otherwise be uniform.
    double goal_bias = 0.05;
    /// Periodic log interval for iteration budgets.
    std::size_t log_every_iterations = 1000;
    /// Periodic log interval for wall-clock budgets, seconds.
    double log_every_seconds = 0.25;

    friend bool operator==(const PlannerParams&, const PlannerParams&) = default;
};

struct LibraryParams {
    /// Grid pitch of the reachability library, seconds.
    double step = 0.1;
    /// Radius of the ball standing in for the start state.
    double start_radius = 1e-3;
    /// Horizon of a library prepared before planning; 0 defers construction
    /// to the first solution.
    double horizon = 0.0;
    /// A library built at the first solution of cost T spans factor * T.
    double horizon_factor = 1.1;

    friend bool operator==(const LibraryParams&, const LibraryParams&) = default;
};

}  // namespace tis
