#include "tis/planner.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tis;

namespace {

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

// x' = u, |u_i| <= 1/sqrt(2) so that max |u| = 1.
ProblemConfig single_integrator(double goal_radius) {
    const double h = 1.0 / std::sqrt(2.0);
    LtiSystem sys(Matrix::Zero(2, 2), Matrix::Identity(2, 2), Vector::Constant(2, -h),
                  Vector::Constant(2, h), v2(-1, -1), v2(3, 1));
    Environment env(v2(-1, -1), v2(3, 1), {}, v2(0, 0),
                    Ellipsoid(v2(2, 0), goal_radius * goal_radius * Matrix::Identity(2, 2)));
    LibraryParams lib;
    lib.step = 0.01;
    return {"single", std::move(sys), std::move(env), PlannerParams{}, TisParams{}, lib, 1};
}

bool non_increasing(const std::vector<PlannerEvent>& events) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].best_cost > events[i - 1].best_cost) return false;
    }
    return true;
}

}  // namespace

TEST(Strategy, Names) {
    for (Strategy s : {Strategy::uniform, Strategy::informed_propagation, Strategy::time_informed}) {
        EXPECT_EQ(parse_strategy(to_string(s)), s);
    }
    EXPECT_EQ(parse_strategy("ip"), Strategy::informed_propagation);
    EXPECT_THROW(parse_strategy("rrt"), std::invalid_argument);
}

TEST(GoalSatisfied, Boundary) {
    const ProblemConfig c = builtin_problem("toy2d");
    EXPECT_TRUE(goal_satisfied(c.environment, v2(3.0, 0.0)));
    EXPECT_TRUE(goal_satisfied(c.environment, v2(3.5, 0.0)));
    EXPECT_FALSE(goal_satisfied(c.environment, v2(3.6, 0.0)));
}

TEST(Planner, StartInsideGoal) {
    ProblemConfig c = single_integrator(0.5);
    c.environment = Environment(v2(-1, -1), v2(3, 1), {}, v2(0, 0),
                                Ellipsoid(v2(0.1, 0), Matrix::Identity(2, 2)));
    Rng rng(1);
    const PlannerResult r = solve(c, Strategy::uniform, Budget::iters(10), rng);
    ASSERT_TRUE(r.best.has_value());
    EXPECT_EQ(r.best_cost, 0.0);
}

TEST(Planner, RejectsEmptyBudget) {
    const ProblemConfig c = single_integrator(0.1);
    Rng rng(1);
    EXPECT_THROW(solve(c, Strategy::uniform, Budget::iters(0), rng), std::invalid_argument);
    EXPECT_THROW(solve(c, Strategy::uniform, Budget::wall(0.0), rng), std::invalid_argument);
}

TEST(Planner, SingleIntegratorNeverBeatsStraightLine) {
    const double r = 0.1;
    const ProblemConfig c = single_integrator(r);
    const double bound = (2.0 - r) / 1.0;
    for (Strategy s : {Strategy::uniform, Strategy::informed_propagation, Strategy::time_informed}) {
        Rng rng(3);
        const PlannerResult res = solve(c, s, Budget::iters(20000), rng);
        ASSERT_TRUE(res.best.has_value()) << to_string(s);
        EXPECT_GE(res.best_cost, bound - 1e-9) << to_string(s);
        EXPECT_LT(res.best_cost, 2.0 * bound) << to_string(s);
        EXPECT_TRUE(non_increasing(res.events));
    }
}

TEST(Planner, SolutionsAreFeasible) {
    const ProblemConfig c = builtin_problem("toy2d");
    Rng rng(7);
    const PlannerResult res = solve(c, Strategy::time_informed, Budget::iters(30000), rng);
    ASSERT_FALSE(res.solutions.empty());
    for (const Solution& sol : res.solutions) {
        const Trajectory& t = sol.trajectory;
        EXPECT_EQ(t.samples.front().state, c.environment.start());
        EXPECT_TRUE(goal_satisfied(c.environment, t.final_state()));
        EXPECT_NEAR(t.duration(), sol.cost, 1e-9);
        EXPECT_TRUE(trajectory_valid(c.environment, t, c.planner.collision_resolution));
        for (std::size_t i = 1; i < t.samples.size(); ++i) {
            ASSERT_GT(t.samples[i].time, t.samples[i - 1].time);
            EXPECT_TRUE(c.system.in_control_bounds(t.samples[i - 1].control));
        }
        // Replaying the controls reproduces the stored states.
        Vector x = t.samples.front().state;
        for (std::size_t i = 1; i < t.samples.size(); ++i) {
            const double h = t.samples[i].time - t.samples[i - 1].time;
            x = rk4_step(c.system, x, t.samples[i - 1].control, h);
            EXPECT_LT((x - t.samples[i].state).norm(), 1e-9);
            x = t.samples[i].state;
        }
    }
}

TEST(Planner, TieSolutionsLieInTheInformedSet) {
    const ProblemConfig c = builtin_problem("toy2d");
    auto lib = std::make_shared<const ReachLibrary>(build_library(
        c.system, c.environment.start(), c.environment.goal(), 40.0, c.library.step));
    Rng rng(11);
    const PlannerResult res =
        solve(c, Strategy::time_informed, Budget::iters(30000), rng, lib);
    ASSERT_FALSE(res.solutions.empty());
    for (const Solution& sol : res.solutions) {
        TimeInformedSet tis(lib, c.environment.state_lo(), c.environment.state_hi(), c.tie);
        tis.update_best_cost(sol.cost);
        for (const auto& s : sol.trajectory.samples) {
            EXPECT_TRUE(tis.include_vertex(s.state, s.time)) << "t = " << s.time;
        }
    }
    EXPECT_GT(res.counters.rejected_informed, 0u);
    EXPECT_GT(res.sampler.calls, 0u);
}

TEST(Planner, IterationBudgetIsDeterministic) {
    const ProblemConfig c = builtin_problem("toy2d");
    for (Strategy s : {Strategy::uniform, Strategy::informed_propagation, Strategy::time_informed}) {
        Rng a(5), b(5);
        const PlannerResult ra = solve(c, s, Budget::iters(15000), a);
        const PlannerResult rb = solve(c, s, Budget::iters(15000), b);
        ASSERT_EQ(ra.events.size(), rb.events.size());
        for (std::size_t i = 0; i < ra.events.size(); ++i) {
            EXPECT_TRUE(same_progress(ra.events[i], rb.events[i])) << i;
        }
        EXPECT_EQ(ra.counters, rb.counters);
    }
}

TEST(Planner, TreeInvariantsHold) {
    const ProblemConfig c = builtin_problem("toy2d");
    Rng rng(2);
    SstPlanner planner(c.system, c.environment, Strategy::time_informed, c.planner, c.tie,
                       c.library);
    for (std::size_t budget : {1000u, 5000u, 20000u}) {
        planner.solve(Budget::iters(budget), rng);
        EXPECT_EQ(planner.tree()->check_invariants(), "") << budget;
    }
}

TEST(Planner, LibraryBuiltOnDemand) {
    const ProblemConfig c = builtin_problem("toy2d");
    Rng rng(4);
    const PlannerResult res = solve(c, Strategy::time_informed, Budget::iters(20000), rng);
    ASSERT_TRUE(res.best.has_value());
    EXPECT_GT(res.library_build_ms, 0.0);
}

TEST(Planner, InformedPropagationRejectsOverBudgetNodes) {
    const ProblemConfig c = builtin_problem("toy2d");
    Rng rng(6);
    SstPlanner planner(c.system, c.environment, Strategy::informed_propagation, c.planner);
    const PlannerResult res = planner.solve(Budget::iters(30000), rng);
    ASSERT_FALSE(res.solutions.empty());
    EXPECT_GT(res.counters.rejected_informed, 0u);
    EXPECT_EQ(res.sampler.calls, 0u);
    EXPECT_EQ(planner.tree()->check_invariants(), "");
}
