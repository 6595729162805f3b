#pragma once

#include "tis/linsys.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tis {

/// Raised when a shape matrix is not symmetric positive definite.
class NotPositiveDefinite : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a library lookup asks for a time beyond the stored horizon.
class OutOfHorizon : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/**
 * E(c, Q) = { x : (x - c)^T Q^{-1} (x - c) <= 1 } with Q symmetric positive
 * definite. The lower Cholesky factor L (Q = L L^T) is kept alongside Q; it
 * drives membership tests, sampling and volume comparisons.
 */
class Ellipsoid {
public:
    Ellipsoid(Vector center, Matrix shape);

    static Ellipsoid ball(Vector center, double radius);

    int dim() const { return static_cast<int>(center_.size()); }
    const Vector& center() const { return center_; }
    const Matrix& shape() const { return shape_; }
    const Matrix& cholesky() const { return chol_; }

    /// (x - c)^T Q^{-1} (x - c), via one forward substitution with L.
    double quadratic_form(const Vector& x) const;

    /// Largest semi-axis length, sqrt(lambda_max(Q)).
    double max_semi_axis() const;

private:
    Vector center_;
    Matrix shape_;
    Matrix chol_;
};

struct Ball {
    Vector center;
    double radius = 0.0;

    bool contains(const Vector& x) const { return (x - center).norm() <= radius; }
};

/// Membership slack applied by contains().
inline constexpr double kContainsTolerance = 1e-9;

bool contains(const Ellipsoid& E, const Vector& x);

/// center + L b with b uniform in the unit ball.
Vector sample_uniform(const Ellipsoid& E, Rng& rng);

/// Uniform sample in the unit n-ball.
Vector sample_unit_ball(int n, Rng& rng);

/// log det L = 1/2 log det Q. Differs from the log volume by a constant that
/// depends only on the dimension.
double log_measure(const Ellipsoid& E);

// --- hyper-sphere over-approximation -------------------------------------

/// (e^{||A|| (t2 - t1)} - 1) ||B|| u_max / ||A||, with the continuous
/// extension (t2 - t1) ||B|| u_max when ||A|| = 0.
double sphere_radius(const LtiSystem& sys, double t1, double t2, double u_max);

Ball sphere_forward(const LtiSystem& sys, const Vector& start, double t, double u_max);
Ball sphere_backward(const LtiSystem& sys, const Vector& goal, double duration, double u_max);

// --- ellipsoidal propagation ----------------------------------------------

struct ControlEllipsoid {
    Vector center;
    Matrix shape;
};

/// Smallest axis-aligned ellipsoid through the corners of the control box:
/// q = box center, P = diag(m h_i^2).
ControlEllipsoid control_ellipsoid(const LtiSystem& sys);

enum class Direction { forward, backward };

class PropagationError : public std::runtime_error {
public:
    PropagationError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

/**
 * External ellipsoidal approximation of the reach set of x' = A x + B u,
 * u in control_ellipsoid(sys), seeded with E0. Returns the ellipsoid at every
 * multiple of `step` up to `duration`, E0 first.
 *
 * The backward direction integrates the time-reversed dynamics, giving the
 * sets from which E0 can be reached after each elapsed duration.
 *
 * dt is the RK4 step (defaults to step / 10) and must divide `step`.
 */
std::vector<Ellipsoid> propagate_external(const LtiSystem& sys, const Ellipsoid& E0,
                                          double duration, double step, Direction direction,
                                          double dt = 0.0);

// --- reachability library -------------------------------------------------

/**
 * Forward and backward reach sets on a uniform duration grid.
 * forward[k] over-approximates the states reachable from the start after
 * exactly k * step. backward[k] over-approximates the states that reach the
 * goal set after exactly k * step. Immutable once built.
 */
class ReachLibrary {
public:
    ReachLibrary(std::string system_id, double step, std::vector<Ellipsoid> forward,
                 std::vector<Ellipsoid> backward);

    const std::string& system_id() const { return system_id_; }
    double step() const { return step_; }
    double horizon() const { return step_ * static_cast<double>(forward_.size() - 1); }
    int dim() const { return forward_.front().dim(); }
    std::size_t size() const { return forward_.size(); }

    const std::vector<Ellipsoid>& forward() const { return forward_; }
    const std::vector<Ellipsoid>& backward() const { return backward_; }
    const Ellipsoid& start() const { return forward_.front(); }
    const Ellipsoid& goal() const { return backward_.front(); }

    /// Nearest grid index for a time in [0, horizon]; ties go to the larger index.
    std::size_t index_of(double t) const;

private:
    std::string system_id_;
    double step_;
    std::vector<Ellipsoid> forward_;
    std::vector<Ellipsoid> backward_;
};

inline constexpr double kDefaultStartRadius = 1e-3;

ReachLibrary build_library(const LtiSystem& sys, const Vector& start, const Ellipsoid& goal,
                           double horizon, double step,
                           double start_radius = kDefaultStartRadius,
                           std::string system_id = {});

const Ellipsoid& lookup_forward(const ReachLibrary& lib, double t);
const Ellipsoid& lookup_backward(const ReachLibrary& lib, double duration);

// --- persistence ------------------------------------------------------------

class LibraryFormatError : public std::runtime_error {
public:
    enum class Kind { io, bad_magic, version_mismatch, truncated, not_positive_definite, invalid };

    LibraryFormatError(Kind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

inline constexpr std::uint32_t kLibraryFormatVersion = 1;

/// Binary layout (little endian): "TIRL", u32 version, u32 n, f64 horizon,
/// f64 step, u32 count, then `count` forward and `count` backward ellipsoids,
/// each as n f64 center values followed by n*n f64 shape values row-major.
std::vector<std::uint8_t> serialize_library(const ReachLibrary& lib);
ReachLibrary deserialize_library(const std::vector<std::uint8_t>& bytes,
                                 std::string system_id = {});

void save_library(const ReachLibrary& lib, const std::filesystem::path& path);
ReachLibrary load_library(const std::filesystem::path& path);

}  // namespace tis
