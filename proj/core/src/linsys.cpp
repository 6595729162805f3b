#include "tis/linsys.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tis {

namespace {

bool all_finite(const Matrix& M) { return M.allFinite(); }

void require_box(const Vector& lo, const Vector& hi, const char* what) {
    if (lo.size() != hi.size()) {
        throw std::invalid_argument(std::string(what) + ": bound sizes differ");
    }
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        if (std::isnan(lo[i]) || std::isnan(hi[i]) || !(lo[i] < hi[i])) {
            throw std::invalid_argument(std::string(what) + ": require lo < hi in coordinate " +
                                        std::to_string(i));
        }
    }
}

}  // namespace

LtiSystem::LtiSystem(Matrix A, Matrix B, Vector control_lo, Vector control_hi,
                     Vector state_lo, Vector state_hi)
    : A_(std::move(A)),
      B_(std::move(B)),
      control_lo_(std::move(control_lo)),
      control_hi_(std::move(control_hi)),
      state_lo_(std::move(state_lo)),
      state_hi_(std::move(state_hi)) {
    if (A_.rows() != A_.cols()) {
        throw std::invalid_argument("LtiSystem: A must be square");
    }
    if (A_.rows() < 2) {
        throw std::invalid_argument("LtiSystem: state dimension must be at least 2");
    }
    if (B_.rows() != A_.rows() || B_.cols() < 1) {
        throw std::invalid_argument("LtiSystem: B must be n x m with m >= 1");
    }
    if (!all_finite(A_) || !all_finite(B_)) {
        throw std::invalid_argument("LtiSystem: A and B must be finite");
    }
    if (control_lo_.size() != B_.cols()) {
        throw std::invalid_argument("LtiSystem: control bounds must have m entries");
    }
    if (state_lo_.size() != A_.rows()) {
        throw std::invalid_argument("LtiSystem: state bounds must have n entries");
    }
    require_box(control_lo_, control_hi_, "LtiSystem control box");
    if (!control_lo_.allFinite() || !control_hi_.allFinite()) {
        throw std::invalid_argument("LtiSystem: control bounds must be finite");
    }
    require_box(state_lo_, state_hi_, "LtiSystem state box");
}

LtiSystem LtiSystem::unbounded(Matrix A, Matrix B, Vector control_lo, Vector control_hi) {
    const auto n = A.rows();
    const double inf = std::numeric_limits<double>::infinity();
    return LtiSystem(std::move(A), std::move(B), std::move(control_lo), std::move(control_hi),
                     Vector::Constant(n, -inf), Vector::Constant(n, inf));
}

bool LtiSystem::in_state_bounds(const Vector& x) const {
    return (x.array() >= state_lo_.array()).all() && (x.array() <= state_hi_.array()).all();
}

bool LtiSystem::in_control_bounds(const Vector& u) const {
    return u.size() == control_lo_.size() && (u.array() >= control_lo_.array()).all() &&
           (u.array() <= control_hi_.array()).all();
}

LtiSystem LtiSystem::reversed() const {
    return LtiSystem(-A_, -B_, control_lo_, control_hi_, state_lo_, state_hi_);
}

double LtiSystem::max_control_norm() const {
    return control_lo_.cwiseAbs().cwiseMax(control_hi_.cwiseAbs()).norm();
}

bool operator==(const LtiSystem& a, const LtiSystem& b) {
    auto same = [](const auto& x, const auto& y) {
        return x.rows() == y.rows() && x.cols() == y.cols() && x == y;
    };
    return same(a.A_, b.A_) && same(a.B_, b.B_) && same(a.control_lo_, b.control_lo_) &&
           same(a.control_hi_, b.control_hi_) && same(a.state_lo_, b.state_lo_) &&
           same(a.state_hi_, b.state_hi_);
}

Matrix mat_exp(const Matrix& M, double t) {
    if (M.rows() != M.cols()) {
        throw std::invalid_argument("mat_exp: matrix must be square");
    }
    if (!M.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("mat_exp: non-finite input");
    }
    if (t < 0.0) {
        throw std::invalid_argument("mat_exp: t must be non-negative");
    }
    const auto n = M.rows();
    Matrix X = M * t;

    // Scale so that ||X||_inf <= 1/2, where the [6/6] approximant is accurate
    // to roughly machine precision.
    const double norm = X.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(norm / 0.5))));
        X /= std::ldexp(1.0, squarings);
    }

    constexpr int q = 6;
    double c = 1.0;
    Matrix term = Matrix::Identity(n, n);
    Matrix numer = Matrix::Identity(n, n);
    Matrix denom = Matrix::Identity(n, n);
    for (int k = 1; k <= q; ++k) {
        c *= static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
        term = X * term;
        numer += c * term;
        denom += ((k % 2 == 0) ? c : -c) * term;
    }
    Matrix E = denom.partialPivLu().solve(numer);
    for (int i = 0; i < squarings; ++i) {
        E = E * E;
    }
    return E;
}

double induced_norm2(const Matrix& M) {
    if (!M.allFinite()) {
        throw std::invalid_argument("induced_norm2: non-finite input");
    }
    if (M.size() == 0) {
        return 0.0;
    }
    Eigen::JacobiSVD<Matrix> svd(M);
    return svd.singularValues()(0);
}

Vector rk4_step(const LtiSystem& sys, const Vector& x, const Vector& u, double h) {
    const Vector drive = sys.B() * u;
    const Matrix& A = sys.A();
    const Vector k1 = A * x + drive;
    const Vector k2 = A * (x + 0.5 * h * k1) + drive;
    const Vector k3 = A * (x + 0.5 * h * k2) + drive;
    const Vector k4 = A * (x + h * k3) + drive;
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory propagate(const LtiSystem& sys, const Vector& x0, const Vector& u, double duration,
                     double dt) {
    if (x0.size() != sys.state_dim() || u.size() != sys.control_dim()) {
        throw std::invalid_argument("propagate: dimension mismatch");
    }
    if (!(duration > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("propagate: duration and dt must be positive");
    }
    if (!sys.in_control_bounds(u)) {
        throw std::invalid_argument("propagate: control outside the admissible box");
    }

    Trajectory traj;
    traj.samples.push_back({0.0, x0, u});
    if (!sys.in_state_bounds(x0)) {
        traj.truncated = true;
        return traj;
    }

    // Count full steps with a relative slack so floating noise in duration/dt
    // never produces a sliver step.
    const double ratio = duration / dt;
    auto full_steps = static_cast<long>(std::floor(ratio + 1e-9));
    const double remainder = duration - static_cast<double>(full_steps) * dt;
    const bool partial = remainder > 1e-9 * dt;
    const long total = full_steps + (partial ? 1 : 0);

    traj.samples.reserve(static_cast<std::size_t>(total) + 1);
    Vector x = x0;
    for (long k = 0; k < total; ++k) {
        const bool last = (k == total - 1);
        const double h = (partial && last) ? remainder : dt;
        x = rk4_step(sys, x, u, h);
        if (!sys.in_state_bounds(x)) {
            traj.truncated = true;
            return traj;
        }
        const double time = last ? duration : static_cast<double>(k + 1) * dt;
        traj.samples.push_back({time, x, u});
    }
    return traj;
}

Vector sample_box(const Vector& lo, const Vector& hi, Rng& rng) {
    Vector out(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) {
        std::uniform_real_distribution<double> dist(lo[i], hi[i]);
        out[i] = dist(rng);
    }
    return out;
}

Vector sample_control(const LtiSystem& sys, Rng& rng) {
    return sample_box(sys.control_lo(), sys.control_hi(), rng);
}

}  // namespace tis
