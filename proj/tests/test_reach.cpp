#include "tis/reach.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace tis;

namespace {

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

}  // namespace

TEST(Ellipsoid, RejectsNonSpdShapes) {
    Matrix Q(2, 2);
    Q << 1.0, 0.0, 0.0, -1.0;
    EXPECT_THROW(Ellipsoid(Vector::Zero(2), Q), NotPositiveDefinite);
    Q << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(Ellipsoid(Vector::Zero(2), Q), NotPositiveDefinite);
    EXPECT_THROW(Ellipsoid(Vector::Zero(3), Matrix::Identity(2, 2)), std::invalid_argument);
}

TEST(Ellipsoid, QuadraticFormMatchesInverse) {
    Matrix Q(3, 3);
    Q << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
    Vector c(3);
    c << 1.0, -2.0, 0.5;
    const Ellipsoid E(c, Q);
    Rng rng(2);
    std::normal_distribution<double> g(0.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        Vector x(3);
        x << g(rng), g(rng), g(rng);
        const double ref = (x - c).dot(Q.inverse() * (x - c));
        EXPECT_NEAR(E.quadratic_form(x), ref, 1e-10 * std::max(1.0, ref));
    }
}

TEST(Ellipsoid, ContainsBoundaryAndCenter) {
    const Ellipsoid G(v2(3.0, 0.0), 0.25 * Matrix::Identity(2, 2));
    EXPECT_TRUE(contains(G, v2(3.0, 0.0)));
    EXPECT_TRUE(contains(G, v2(3.5, 0.0)));
    EXPECT_FALSE(contains(G, v2(3.6, 0.0)));
    EXPECT_NEAR(G.quadratic_form(v2(3.6, 0.0)), 1.44, 1e-12);
}

TEST(Ellipsoid, MaxSemiAxisAndLogMeasure) {
    Matrix Q = Matrix::Zero(2, 2);
    Q.diagonal() << 9.0, 4.0;
    const Ellipsoid E(Vector::Zero(2), Q);
    EXPECT_NEAR(E.max_semi_axis(), 3.0, 1e-12);
    EXPECT_NEAR(log_measure(E), std::log(6.0), 1e-12);
}

TEST(Sampling, UnitBallRadialLaw) {
    Rng rng(11);
    const int n = 100000;
    int inner = 0;
    for (int i = 0; i < n; ++i) {
        const Vector x = sample_unit_ball(3, rng);
        ASSERT_LE(x.norm(), 1.0);
        inner += x.norm() <= 0.5 ? 1 : 0;
    }
    EXPECT_NEAR(static_cast<double>(inner) / n, 0.125, 0.005);
}

TEST(Sampling, EllipsoidMoments) {
    Matrix Q(2, 2);
    Q << 4.0, 1.0, 1.0, 2.0;
    const Ellipsoid E(v2(1.0, -1.0), Q);
    Rng rng(4);
    const int n = 200000;
    Vector mean = Vector::Zero(2);
    Matrix second = Matrix::Zero(2, 2);
    for (int i = 0; i < n; ++i) {
        const Vector d = sample_uniform(E, rng) - E.center();
        ASSERT_LE(E.quadratic_form(E.center() + d), 1.0 + 1e-12);
        mean += d;
        second += d * d.transpose();
    }
    mean /= n;
    second /= n;
    EXPECT_LT(mean.norm(), 0.02);
    // Uniform law on an n-ellipsoid has covariance Q / (n + 2).
    EXPECT_LT((second - Q / 4.0).norm() / (Q / 4.0).norm(), 0.02);
}

TEST(Sphere, DoubleIntegratorRadius) {
    Matrix A(2, 2);
    A << 0.0, 1.0, 0.0, 0.0;
    Matrix B(2, 1);
    B << 0.0, 1.0;
    const auto sys = LtiSystem::unbounded(A, B, -Vector::Ones(1), Vector::Ones(1));
    EXPECT_NEAR(sphere_radius(sys, 0.0, 1.0, 1.0), std::exp(1.0) - 1.0, 1e-12);
}

TEST(Sphere, ZeroDriftLimit) {
    const auto sys = LtiSystem::unbounded(Matrix::Zero(2, 2), Matrix::Identity(2, 2),
                                          -Vector::Ones(2), Vector::Ones(2));
    EXPECT_DOUBLE_EQ(sphere_radius(sys, 1.0, 3.5, 2.0), 5.0);
}

TEST(Sphere, ContainsRandomTrajectories) {
    const LtiSystem sys = toy();
    const Vector xs = v2(-3.0, 0.0);
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        Vector x = xs;
        double t = 0.0;
        for (int seg = 0; seg < 10; ++seg) {
            const Vector u = sample_control(sys, rng);
            x = propagate(sys, x, u, 0.2).final_state();
            t += 0.2;
            const Ball b = sphere_forward(sys, xs, t, sys.max_control_norm());
            EXPECT_TRUE(b.contains(x));
        }
    }
}

TEST(ControlEllipsoid, CircumscribesBox) {
    Matrix B = Matrix::Identity(3, 3);
    Vector lo(3), hi(3);
    lo << 0.0, 0.0, -2.0;
    hi << 1.0, 1.0, 2.0;
    const auto sys = LtiSystem::unbounded(Matrix::Zero(3, 3), B, lo, hi);
    const ControlEllipsoid ce = control_ellipsoid(sys);
    const Ellipsoid E(ce.center, ce.shape);
    for (int mask = 0; mask < 8; ++mask) {
        Vector corner(3);
        for (int i = 0; i < 3; ++i) corner[i] = (mask >> i) & 1 ? hi[i] : lo[i];
        EXPECT_NEAR(E.quadratic_form(corner), 1.0, 1e-12);
    }
}

TEST(PropagateExternal, AutonomousShapeIsExact) {
    // With B = 0 the reach set of an ellipsoid is exactly e^{At} E; what is
    // left is RK4 error, O(dt^4).
    Matrix A(2, 2);
    A << 0.0, 1.0, -1.0, -0.2;
    Matrix B = Matrix::Zero(2, 1);
    const auto sys = LtiSystem::unbounded(A, B, Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    Matrix Q0(2, 2);
    Q0 << 0.5, 0.1, 0.1, 0.3;
    const Ellipsoid E0(v2(1.0, 0.0), Q0);
    const auto sets = propagate_external(sys, E0, 2.0, 0.5, Direction::forward, 0.005);
    ASSERT_EQ(sets.size(), 5u);
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const Matrix Phi = mat_exp(A, 0.5 * static_cast<double>(k));
        EXPECT_LT((sets[k].center() - Phi * E0.center()).norm(), 1e-9);
        const Matrix Q = Phi * Q0 * Phi.transpose();
        EXPECT_LT((sets[k].shape() - Q).norm() / Q.norm(), 1e-8);
    }
}

TEST(PropagateExternal, ForwardSoundness) {
    const LtiSystem sys = toy();
    const Vector xs = v2(-3.0, 0.0);
    const auto sets = propagate_external(sys, Ellipsoid::ball(xs, 1e-3), 5.0, 0.1,
                                         Direction::forward);
    Rng rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        Vector x = xs;
        for (std::size_t k = 1; k < sets.size(); ++k) {
            x = propagate(sys, x, sample_control(sys, rng), 0.1, 0.01).final_state();
            EXPECT_LE(sets[k].quadratic_form(x), 1.0 + 1e-6);
        }
    }
}

TEST(PropagateExternal, BackwardSoundness) {
    // Start a rollout anywhere in the backward set of duration d: running the
    // time-reversed dynamics from a goal point must stay inside the sets.
    const LtiSystem sys = toy();
    const Ellipsoid goal(v2(3.0, 0.0), 0.25 * Matrix::Identity(2, 2));
    const auto sets = propagate_external(sys, goal, 5.0, 0.1, Direction::backward);
    const LtiSystem rev = sys.reversed();
    Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        Vector x = sample_uniform(goal, rng);
        for (std::size_t k = 1; k < sets.size(); ++k) {
            x = propagate(rev, x, sample_control(rev, rng), 0.1, 0.01).final_state();
            EXPECT_LE(sets[k].quadratic_form(x), 1.0 + 1e-6);
        }
    }
}

TEST(PropagateExternal, RejectsOffGridDurations) {
    const LtiSystem sys = toy();
    EXPECT_THROW(propagate_external(sys, Ellipsoid::ball(Vector::Zero(2), 1.0), 1.05, 0.1,
                                    Direction::forward),
                 std::invalid_argument);
}

TEST(Library, LookupAndHorizon) {
    const LtiSystem sys = toy();
    const Ellipsoid goal(v2(3.0, 0.0), 0.25 * Matrix::Identity(2, 2));
    const ReachLibrary lib = build_library(sys, v2(-3.0, 0.0), goal, 2.0, 0.1);
    EXPECT_EQ(lib.size(), 21u);
    EXPECT_NEAR(lib.horizon(), 2.0, 1e-12);
    EXPECT_EQ(lib.index_of(0.0), 0u);
    EXPECT_EQ(lib.index_of(0.149), 1u);
    EXPECT_EQ(lib.index_of(0.15), 2u);
    EXPECT_EQ(lib.index_of(2.0), 20u);
    EXPECT_THROW(lib.index_of(2.01), OutOfHorizon);
    EXPECT_THROW(lib.index_of(-0.1), OutOfHorizon);
    EXPECT_TRUE(lookup_backward(lib, 0.0).shape().isApprox(goal.shape()));
    EXPECT_NEAR(lookup_forward(lib, 0.0).max_semi_axis(), 1e-3, 1e-15);
}

TEST(Library, ForwardSetsGrowInVolume) {
    const LtiSystem sys = toy();
    const Ellipsoid goal(v2(3.0, 0.0), 0.25 * Matrix::Identity(2, 2));
    const ReachLibrary lib = build_library(sys, v2(-3.0, 0.0), goal, 3.0, 0.1);
    for (std::size_t k = 1; k < lib.size(); ++k) {
        EXPECT_GT(log_measure(lib.forward()[k]), log_measure(lib.forward()[k - 1]));
    }
}
