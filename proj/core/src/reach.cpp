#include "tis/reach.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace tis {

// ---------------------------------------------------------------------------
// Ellipsoid

Ellipsoid::Ellipsoid(Vector center, Matrix shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
    const auto n = center_.size();
    if (n == 0 || shape_.rows() != n || shape_.cols() != n) {
        throw std::invalid_argument("Ellipsoid: shape must be n x n with n = center size");
    }
    if (!center_.allFinite() || !shape_.allFinite()) {
        throw std::invalid_argument("Ellipsoid: non-finite entries");
    }
    const double scale = std::max(shape_.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((shape_ - shape_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
        throw NotPositiveDefinite("Ellipsoid: shape matrix is not symmetric");
    }
    Eigen::LLT<Matrix> llt(shape_);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefinite("Ellipsoid: shape matrix is not positive definite");
    }
    chol_ = llt.matrixL();
    if ((chol_.diagonal().array() <= 0.0).any() || !chol_.allFinite()) {
        throw NotPositiveDefinite("Ellipsoid: non-positive Cholesky pivot");
    }
}

Ellipsoid Ellipsoid::ball(Vector center, double radius) {
    if (!(radius > 0.0)) {
        throw std::invalid_argument("Ellipsoid::ball: radius must be positive");
    }
    const auto n = center.size();
    return Ellipsoid(std::move(center), Matrix::Identity(n, n) * (radius * radius));
}

double Ellipsoid::quadratic_form(const Vector& x) const {
    const auto n = center_.size();
    // Forward substitution L y = x - c without heap traffic for the usual small n.
    constexpr Eigen::Index kStack = 16;
    double stack_buf[kStack];
    std::vector<double> heap_buf;
    double* y = stack_buf;
    if (n > kStack) {
        heap_buf.resize(static_cast<std::size_t>(n));
        y = heap_buf.data();
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double r = x[i] - center_[i];
        for (Eigen::Index j = 0; j < i; ++j) {
            r -= chol_(i, j) * y[j];
        }
        y[i] = r / chol_(i, i);
        sum += y[i] * y[i];
    }
    return sum;
}

double Ellipsoid::max_semi_axis() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(shape_, Eigen::EigenvaluesOnly);
    return std::sqrt(es.eigenvalues().maxCoeff());
}

bool contains(const Ellipsoid& E, const Vector& x) {
    if (x.size() != E.dim()) {
        throw std::invalid_argument("contains: dimension mismatch");
    }
    return E.quadratic_form(x) <= 1.0 + kContainsTolerance;
}

Vector sample_unit_ball(int n, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector dir(n);
    double norm = 0.0;
    do {
        for (int i = 0; i < n; ++i) {
            dir[i] = normal(rng);
        }
        norm = dir.norm();
    } while (norm == 0.0);
    const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(n));
    return dir * (radius / norm);
}

Vector sample_uniform(const Ellipsoid& E, Rng& rng) {
    return E.center() + E.cholesky() * sample_unit_ball(E.dim(), rng);
}

double log_measure(const Ellipsoid& E) {
    return E.cholesky().diagonal().array().log().sum();
}

// ---------------------------------------------------------------------------
// Hyper-sphere bound

double sphere_radius(const LtiSystem& sys, double t1, double t2, double u_max) {
    if (!(t2 >= t1)) {
        throw std::invalid_argument("sphere_radius: require t2 >= t1");
    }
    if (!(u_max > 0.0)) {
        throw std::invalid_argument("sphere_radius: u_max must be positive");
    }
    const double a = induced_norm2(sys.A());
    const double b = induced_norm2(sys.B());
    const double elapsed = t2 - t1;
    if (a == 0.0) {
        return elapsed * b * u_max;
    }
    return std::expm1(a * elapsed) * b * u_max / a;
}

Ball sphere_forward(const LtiSystem& sys, const Vector& start, double t, double u_max) {
    if (!(t >= 0.0)) {
        throw std::invalid_argument("sphere_forward: t must be non-negative");
    }
    return {mat_exp(sys.A(), t) * start, sphere_radius(sys, 0.0, t, u_max)};
}

Ball sphere_backward(const LtiSystem& sys, const Vector& goal, double duration, double u_max) {
    if (!(duration >= 0.0)) {
        throw std::invalid_argument("sphere_backward: duration must be non-negative");
    }
    return {mat_exp(-sys.A(), duration) * goal, sphere_radius(sys, 0.0, duration, u_max)};
}

// ---------------------------------------------------------------------------
// Ellipsoidal propagation

ControlEllipsoid control_ellipsoid(const LtiSystem& sys) {
    const Vector& lo = sys.control_lo();
    const Vector& hi = sys.control_hi();
    const auto m = static_cast<double>(lo.size());
    const Vector half = 0.5 * (hi - lo);
    return {0.5 * (hi + lo), (m * half.array().square()).matrix().asDiagonal()};
}

namespace {

struct ShapeOde {
    Matrix A;
    Vector drive;  // B q
    Matrix noise;  // B P B^T
    double noise_trace;
    double a_norm;

    double pi(const Matrix& Q) const {
        if (noise_trace <= 0.0) {
            return 0.0;
        }
        return std::sqrt(noise_trace / Q.trace());
    }

    Vector center_rate(const Vector& c) const { return A * c + drive; }

    Matrix shape_rate(const Matrix& Q) const {
        Matrix rate = A * Q + Q * A.transpose();
        const double p = pi(Q);
        if (p > 0.0) {
            rate += p * Q + noise / p;
        }
        return rate;
    }

    void step(Vector& c, Matrix& Q, double h) const {
        const Vector c1 = center_rate(c);
        const Vector c2 = center_rate(c + 0.5 * h * c1);
        const Vector c3 = center_rate(c + 0.5 * h * c2);
        const Vector c4 = center_rate(c + h * c3);
        c += (h / 6.0) * (c1 + 2.0 * c2 + 2.0 * c3 + c4);

        const Matrix q1 = shape_rate(Q);
        const Matrix q2 = shape_rate(Q + 0.5 * h * q1);
        const Matrix q3 = shape_rate(Q + 0.5 * h * q2);
        const Matrix q4 = shape_rate(Q + h * q3);
        Q += (h / 6.0) * (q1 + 2.0 * q2 + 2.0 * q3 + q4);
        Q = 0.5 * (Q + Q.transpose()).eval();
    }
};

long checked_ratio(double numer, double denom, const char* what) {
    const double r = numer / denom;
    const long k = std::lround(r);
    if (k < 1 || std::abs(r - static_cast<double>(k)) > 1e-6 * std::max(1.0, r)) {
        std::ostringstream os;
        os << "propagate_external: " << what << " (" << numer << " / " << denom
           << ") is not a positive integer";
        throw std::invalid_argument(os.str());
    }
    return k;
}

}  // namespace

std::vector<Ellipsoid> propagate_external(const LtiSystem& sys, const Ellipsoid& E0,
                                          double duration, double step, Direction direction,
                                          double dt) {
    if (E0.dim() != sys.state_dim()) {
        throw std::invalid_argument("propagate_external: dimension mismatch");
    }
    if (!(duration > 0.0) || !(step > 0.0)) {
        throw std::invalid_argument("propagate_external: duration and step must be positive");
    }
    if (dt <= 0.0) {
        dt = step / 10.0;
    }
    const long grid = checked_ratio(duration, step, "duration / step");
    const long inner = checked_ratio(step, dt, "step / dt");
    const double h = step / static_cast<double>(inner);

    const double sign = direction == Direction::forward ? 1.0 : -1.0;
    const ControlEllipsoid ctrl = control_ellipsoid(sys);
    ShapeOde ode;
    ode.A = sign * sys.A();
    ode.drive = sign * (sys.B() * ctrl.center);
    ode.noise = sys.B() * ctrl.shape * sys.B().transpose();
    ode.noise = 0.5 * (ode.noise + ode.noise.transpose()).eval();
    ode.noise_trace = ode.noise.trace();
    ode.a_norm = induced_norm2(ode.A);

    std::vector<Ellipsoid> out;
    out.reserve(static_cast<std::size_t>(grid) + 1);
    out.push_back(E0);

    Vector c = E0.center();
    Matrix Q = E0.shape();
    for (long k = 1; k <= grid; ++k) {
        for (long i = 0; i < inner; ++i) {
            // pi(t) ~ 1 / sqrt(trace Q) makes the shape ODE fast while Q is
            // tiny; subdivide so pi * h stays small.
            const double rate = ode.pi(Q) + ode.a_norm;
            const long sub = std::max(1L, static_cast<long>(std::ceil(rate * h / 0.1)));
            const double hs = h / static_cast<double>(sub);
            for (long s = 0; s < sub; ++s) {
                ode.step(c, Q, hs);
            }
        }
        const double time = static_cast<double>(k) * step;
        try {
            out.emplace_back(c, Q);
        } catch (const std::exception& e) {
            std::ostringstream os;
            os << "propagate_external: shape matrix lost positive definiteness at t = " << time
               << " (" << e.what() << ")";
            throw PropagationError(os.str(), time);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Library

ReachLibrary::ReachLibrary(std::string system_id, double step, std::vector<Ellipsoid> forward,
                           std::vector<Ellipsoid> backward)
    : system_id_(std::move(system_id)),
      step_(step),
      forward_(std::move(forward)),
      backward_(std::move(backward)) {
    if (!(step_ > 0.0) || !std::isfinite(step_)) {
        throw std::invalid_argument("ReachLibrary: step must be positive");
    }
    if (forward_.empty() || forward_.size() != backward_.size()) {
        throw std::invalid_argument("ReachLibrary: forward and backward lists must be non-empty "
                                    "and of equal length");
    }
    const int n = forward_.front().dim();
    auto same_dim = [n](const Ellipsoid& e) { return e.dim() == n; };
    if (!std::all_of(forward_.begin(), forward_.end(), same_dim) ||
        !std::all_of(backward_.begin(), backward_.end(), same_dim)) {
        throw std::invalid_argument("ReachLibrary: inconsistent ellipsoid dimensions");
    }
}

std::size_t ReachLibrary::index_of(double t) const {
    const double h = horizon();
    if (!(t >= 0.0) || t > h + 1e-9 * std::max(1.0, h)) {
        std::ostringstream os;
        os << "reach library: time " << t << " outside [0, " << h << "]";
        throw OutOfHorizon(os.str());
    }
    const auto k = static_cast<std::size_t>(std::floor(t / step_ + 0.5 + 1e-9));
    return std::min(k, forward_.size() - 1);
}

ReachLibrary build_library(const LtiSystem& sys, const Vector& start, const Ellipsoid& goal,
                           double horizon, double step, double start_radius,
                           std::string system_id) {
    if (!(step > 0.0) || !(horizon >= step)) {
        throw std::invalid_argument("build_library: require horizon >= step > 0");
    }
    if (start.size() != sys.state_dim() || goal.dim() != sys.state_dim()) {
        throw std::invalid_argument("build_library: dimension mismatch");
    }
    const auto count = static_cast<long>(std::ceil(horizon / step - 1e-9));
    const double span = static_cast<double>(count) * step;
    auto forward = propagate_external(sys, Ellipsoid::ball(start, start_radius), span, step,
                                      Direction::forward);
    auto backward = propagate_external(sys, goal, span, step, Direction::backward);
    return ReachLibrary(std::move(system_id), step, std::move(forward), std::move(backward));
}

const Ellipsoid& lookup_forward(const ReachLibrary& lib, double t) {
    return lib.forward()[lib.index_of(t)];
}

const Ellipsoid& lookup_backward(const ReachLibrary& lib, double duration) {
    return lib.backward()[lib.index_of(duration)];
}

}  // namespace tis
