#include "tis/time_informed_set.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace tis;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LtiSystem toy() {
    Matrix A(2, 2);
    A << 0.0, 0.5, -0.1, 0.2;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    return LtiSystem::unbounded(A, B, Vector::Constant(1, -0.5), Vector::Constant(1, 0.5));
}

Vector v2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

std::shared_ptr<const ReachLibrary> toy_library(double horizon, double step) {
    return std::make_shared<const ReachLibrary>(build_library(
        toy(), v2(-3.0, 0.0), Ellipsoid(v2(3.0, 0.0), 0.25 * Matrix::Identity(2, 2)), horizon,
        step));
}

}  // namespace

TEST(TimeInformedSet, NoSolutionIncludesEverything) {
    TimeInformedSet tis(toy_library(2.0, 0.1), v2(-6, -4), v2(6, 4));
    EXPECT_TRUE(std::isinf(tis.best_cost()));
    EXPECT_TRUE(tis.include_vertex(v2(100.0, 100.0), 1e6));
    EXPECT_THROW(tis.include_vertex(v2(0, 0), -1.0), std::invalid_argument);
}

TEST(TimeInformedSet, BestCostOnlyDecreases) {
    TimeInformedSet tis(toy_library(2.0, 0.1), v2(-6, -4), v2(6, 4));
    tis.update_best_cost(1.5);
    tis.update_best_cost(1.8);
    EXPECT_DOUBLE_EQ(tis.best_cost(), 1.5);
    EXPECT_THROW(tis.update_best_cost(0.0), std::invalid_argument);
}

TEST(TimeInformedSet, RejectsCostAboveBest) {
    TimeInformedSet tis(toy_library(20.0, 0.1), v2(-6, -4), v2(6, 4));
    tis.update_best_cost(15.0);
    EXPECT_FALSE(tis.include_vertex(v2(3.0, 0.0), 15.5));
    EXPECT_TRUE(tis.include_vertex(v2(3.0, 0.0), 14.0));
}

TEST(TimeInformedSet, GoalCenterAtFullBudget) {
    TimeInformedSet tis(toy_library(20.0, 0.1), v2(-6, -4), v2(6, 4));
    tis.update_best_cost(15.0);
    EXPECT_TRUE(tis.include_vertex(v2(3.0, 0.0), 15.0));
    EXPECT_FALSE(tis.include_vertex(v2(5.5, 3.5), 15.0));
}

TEST(TimeInformedSet, AcceptsTrajectoriesOfExactCost) {
    // Drive the toy system with random piecewise-constant controls, put the
    // goal around the endpoint, and check every grid state of the run.
    const LtiSystem sys = toy();
    Rng rng(21);
    const double step = 0.05;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Vector> states{v2(-3.0, 0.0)};
        for (int k = 0; k < 60; ++k) {
            states.push_back(
                propagate(sys, states.back(), sample_control(sys, rng), step, 0.01).final_state());
        }
        const double T = step * 60.0;
        auto lib = std::make_shared<const ReachLibrary>(build_library(
            sys, states.front(), Ellipsoid(states.back(), 0.01 * Matrix::Identity(2, 2)), T,
            step));
        TimeInformedSet tis(lib, v2(-6, -4), v2(6, 4), {10, 0.1});
        tis.update_best_cost(T);
        for (std::size_t k = 0; k < states.size(); ++k) {
            EXPECT_TRUE(tis.include_vertex(states[k], step * static_cast<double>(k)))
                << "trial " << trial << " k " << k;
        }
    }
}

TEST(TimeInformedSet, MonotoneInBestCost) {
    auto lib = toy_library(20.0, 0.1);
    Rng rng(31);
    std::uniform_real_distribution<double> ux(-6.0, 6.0), uy(-4.0, 4.0), ut(0.0, 20.0);
    int checked = 0;
    for (int i = 0; i < 2000; ++i) {
        double t1 = ut(rng), t2 = ut(rng);
        if (t1 > t2) std::swap(t1, t2);
        std::uniform_real_distribution<double> uc(0.0, t1);
        const double c = uc(rng);
        const Vector v = v2(ux(rng), uy(rng));
        TimeInformedSet a(lib, v2(-6, -4), v2(6, 4));
        TimeInformedSet b(lib, v2(-6, -4), v2(6, 4));
        a.update_best_cost(t1);
        b.update_best_cost(t2);
        if (a.include_vertex(v, c)) {
            ++checked;
            EXPECT_TRUE(b.include_vertex(v, c));
        }
    }
    EXPECT_GT(checked, 0);
}

TEST(TimeInformedSet, GenerateSamplePreconditions) {
    TimeInformedSet tis(toy_library(5.0, 0.1), v2(-6, -4), v2(6, 4));
    Rng rng(1);
    EXPECT_THROW(tis.generate_sample(rng), std::logic_error);
    tis.update_best_cost(6.0);
    EXPECT_THROW(tis.generate_sample(rng), OutOfHorizon);
}

TEST(TimeInformedSet, SamplesAndStats) {
    TimeInformedSet tis(toy_library(20.0, 0.1), v2(-6, -4), v2(6, 4), {10, 0.1});
    tis.update_best_cost(14.0);
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        const TisSample s = tis.generate_sample(rng);
        EXPECT_TRUE((s.state.array() >= -6.0).all() && (s.state.array() <= 6.0).all());
    }
    const SamplerStats& st = tis.stats();
    EXPECT_EQ(st.calls, 2000u);
    EXPECT_EQ(st.calls, st.fallbacks + st.informed_samples);
    EXPECT_LT(fallback_ratio(st), 0.5);
}

TEST(TimeInformedSet, SamplingIsDeterministic) {
    auto lib = toy_library(20.0, 0.1);
    TimeInformedSet a(lib, v2(-6, -4), v2(6, 4));
    TimeInformedSet b(lib, v2(-6, -4), v2(6, 4));
    a.update_best_cost(12.0);
    b.update_best_cost(12.0);
    Rng ra(5), rb(5);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(a.generate_sample(ra).state, b.generate_sample(rb).state);
    }
}

TEST(IpBudget, Rule) {
    EXPECT_FALSE(ip_budget(5.0, 4.0).has_value());
    EXPECT_DOUBLE_EQ(*ip_budget(1.5, 4.0), 2.5);
    EXPECT_TRUE(std::isinf(*ip_budget(1.0, kInf)));
    EXPECT_THROW(ip_budget(-1.0, 2.0), std::invalid_argument);
}

TEST(FallbackRatio, Definition) {
    SamplerStats s;
    EXPECT_THROW(fallback_ratio(s), std::domain_error);
    s.calls = 10;
    s.fallbacks = 3;
    s.informed_samples = 7;
    EXPECT_DOUBLE_EQ(fallback_ratio(s), 0.3);
}
