#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace tis {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Random source used throughout the library. Each planner task owns one.
using Rng = std::mt19937_64;

/**
 * Linear time-invariant system  x' = A x + B u  with a box of admissible
 * controls and a box of admissible states.
 *
 * State bounds may be infinite (reachability studies ignore state
 * constraints); control bounds must be finite.
 */
class LtiSystem {
public:
    LtiSystem(Matrix A, Matrix B, Vector control_lo, Vector control_hi,
              Vector state_lo, Vector state_hi);

    /// Same system with unbounded states.
    static LtiSystem unbounded(Matrix A, Matrix B, Vector control_lo, Vector control_hi);

    int state_dim() const { return static_cast<int>(A_.rows()); }
    int control_dim() const { return static_cast<int>(B_.cols()); }

    const Matrix& A() const { return A_; }
    const Matrix& B() const { return B_; }
    const Vector& control_lo() const { return control_lo_; }
    const Vector& control_hi() const { return control_hi_; }
    const Vector& state_lo() const { return state_lo_; }
    const Vector& state_hi() const { return state_hi_; }

    bool in_state_bounds(const Vector& x) const;
    bool in_control_bounds(const Vector& u) const;

    /// The time-reversed system x' = -A x - B u, with the same bounds.
    LtiSystem reversed() const;

    /// Largest Euclidean norm of an admissible control.
    double max_control_norm() const;

    friend bool operator==(const LtiSystem& a, const LtiSystem& b);

private:
    Matrix A_;
    Matrix B_;
    Vector control_lo_;
    Vector control_hi_;
    Vector state_lo_;
    Vector state_hi_;
};

struct TrajectorySample {
    double time = 0.0;
    Vector state;
    /// Control held from this sample until the next one.
    Vector control;
};

/// Piecewise-constant-control trajectory. Sample times start at 0 and are
/// strictly increasing.
struct Trajectory {
    std::vector<TrajectorySample> samples;
    /// Set when a rollout stopped early because the state left its bounds.
    bool truncated = false;

    double duration() const { return samples.empty() ? 0.0 : samples.back().time; }
    const Vector& final_state() const { return samples.back().state; }
};

/// e^{M t} by scaling and squaring around a [6/6] Pade approximant.
/// Throws std::invalid_argument on non-finite input or negative t.
Matrix mat_exp(const Matrix& M, double t = 1.0);

/// Largest singular value.
double induced_norm2(const Matrix& M);

/// Fixed-step RK4 rollout of a constant control. The last step is shortened so
/// the final sample lands exactly on `duration`. If the state leaves the state
/// box the trajectory ends at the last in-bounds sample and is flagged
/// truncated.
Trajectory propagate(const LtiSystem& sys, const Vector& x0, const Vector& u,
                     double duration, double dt = 0.01);

/// One RK4 step of x' = A x + B u with constant u.
Vector rk4_step(const LtiSystem& sys, const Vector& x, const Vector& u, double h);

/// Uniform sample in the control box, coordinates independent.
Vector sample_control(const LtiSystem& sys, Rng& rng);

/// Uniform sample in an axis-aligned box with finite bounds.
Vector sample_box(const Vector& lo, const Vector& hi, Rng& rng);

}  // namespace tis
