#include "tis/env.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace tis {

namespace {

bool same_vec(const Vector& a, const Vector& b) { return a.size() == b.size() && a == b; }
bool same_mat(const Matrix& a, const Matrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

}  // namespace

bool ObstacleBox::contains_strictly(const Vector& x) const {
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const double v = x[dims[k]];
        const auto i = static_cast<Eigen::Index>(k);
        if (!(v > lo[i] && v < hi[i])) {
            return false;
        }
    }
    return !dims.empty();
}

bool operator==(const ObstacleBox& a, const ObstacleBox& b) {
    return a.dims == b.dims && same_vec(a.lo, b.lo) && same_vec(a.hi, b.hi);
}

Environment::Environment(Vector state_lo, Vector state_hi, std::vector<ObstacleBox> obstacles,
                         Vector start, Ellipsoid goal)
    : state_lo_(std::move(state_lo)),
      state_hi_(std::move(state_hi)),
      obstacles_(std::move(obstacles)),
      start_(std::move(start)),
      goal_(std::move(goal)) {
    const auto n = state_lo_.size();
    if (n < 2 || state_hi_.size() != n || start_.size() != n || goal_.dim() != n) {
        throw std::invalid_argument("Environment: inconsistent dimensions");
    }
    if (!state_lo_.allFinite() || !state_hi_.allFinite() ||
        !(state_lo_.array() < state_hi_.array()).all()) {
        throw std::invalid_argument("Environment: state box needs finite lo < hi");
    }
    for (std::size_t i = 0; i < obstacles_.size(); ++i) {
        const auto& box = obstacles_[i];
        const auto k = static_cast<Eigen::Index>(box.dims.size());
        if (k == 0 || box.lo.size() != k || box.hi.size() != k) {
            throw std::invalid_argument("Environment: obstacle " + std::to_string(i) +
                                        " has inconsistent dimensions");
        }
        for (int d : box.dims) {
            if (d < 0 || d >= n) {
                throw std::invalid_argument("Environment: obstacle " + std::to_string(i) +
                                            " refers to a missing state coordinate");
            }
        }
        if (!(box.lo.array() < box.hi.array()).all()) {
            throw std::invalid_argument("Environment: obstacle " + std::to_string(i) +
                                        " needs lo < hi");
        }
    }
    if (state_in_collision(*this, start_)) {
        throw std::invalid_argument("Environment: start state is not collision free");
    }
    const Vector& c = goal_.center();
    if (!((c.array() >= state_lo_.array()).all() && (c.array() <= state_hi_.array()).all())) {
        throw std::invalid_argument("Environment: goal center outside the state box");
    }
}

Environment Environment::without_obstacles() const {
    return Environment(state_lo_, state_hi_, {}, start_, goal_);
}

bool operator==(const Environment& a, const Environment& b) {
    return same_vec(a.state_lo_, b.state_lo_) && same_vec(a.state_hi_, b.state_hi_) &&
           a.obstacles_ == b.obstacles_ && same_vec(a.start_, b.start_) &&
           same_vec(a.goal_.center(), b.goal_.center()) &&
           same_mat(a.goal_.shape(), b.goal_.shape());
}

bool state_in_collision(const Environment& env, const Vector& x) {
    if (x.size() != env.dim()) {
        throw std::invalid_argument("state_in_collision: dimension mismatch");
    }
    if (!((x.array() >= env.state_lo().array()).all() &&
          (x.array() <= env.state_hi().array()).all())) {
        return true;
    }
    return std::any_of(env.obstacles().begin(), env.obstacles().end(),
                       [&](const ObstacleBox& box) { return box.contains_strictly(x); });
}

bool segment_valid(const Environment& env, const Vector& a, const Vector& b, double elapsed,
                   double resolution) {
    if (state_in_collision(env, b)) {
        return false;
    }
    const auto pieces = static_cast<long>(std::ceil(elapsed / resolution - 1e-9));
    for (long k = 1; k < pieces; ++k) {
        const double s = static_cast<double>(k) / static_cast<double>(pieces);
        if (state_in_collision(env, a + s * (b - a))) {
            return false;
        }
    }
    return true;
}

bool trajectory_valid(const Environment& env, const Trajectory& traj, double resolution) {
    if (!(resolution > 0.0)) {
        throw std::invalid_argument("trajectory_valid: resolution must be positive");
    }
    if (traj.samples.empty()) {
        return true;
    }
    if (state_in_collision(env, traj.samples.front().state)) {
        return false;
    }
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        const auto& prev = traj.samples[i - 1];
        const auto& cur = traj.samples[i];
        if (!segment_valid(env, prev.state, cur.state, cur.time - prev.time, resolution)) {
            return false;
        }
    }
    return true;
}

bool operator==(const ProblemConfig& a, const ProblemConfig& b) {
    return a.name == b.name && a.system == b.system && a.environment == b.environment &&
           a.planner == b.planner && a.tie.attempts == b.tie.attempts &&
           a.tie.delta == b.tie.delta && a.library == b.library && a.seed == b.seed;
}

// ---------------------------------------------------------------------------
// Builtin problems. Obstacle layouts are this project's defaults; everything
// else is fixed by the benchmark definitions.

namespace {

Matrix toy_a() {
    Matrix A(2, 2);
    A << 0.0, 0.5, -0.1, 0.2;
    return A;
}

Matrix toy_b() {
    Matrix B(2, 1);
    B << 0.0, 1.0;
    return B;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) {
        v[i++] = x;
    }
    return v;
}

ObstacleBox box(std::vector<int> dims, Vector lo, Vector hi) {
    return {std::move(dims), std::move(lo), std::move(hi)};
}

ProblemConfig make(std::string name, Matrix A, Matrix B, Vector ulo, Vector uhi, Vector xlo,
                   Vector xhi, std::vector<ObstacleBox> obstacles, Vector start, Vector goal,
                   double goal_radius_sq, double library_horizon) {
    const auto n = A.rows();
    LtiSystem sys(std::move(A), std::move(B), std::move(ulo), std::move(uhi), xlo, xhi);
    Environment env(std::move(xlo), std::move(xhi), std::move(obstacles), std::move(start),
                    Ellipsoid(std::move(goal), Matrix::Identity(n, n) * goal_radius_sq));
    LibraryParams lib;
    // Library pitch equals the rollout step so that every state on a solution
    // sits at an exact grid duration from the goal.
    lib.step = 0.01;
    lib.horizon = library_horizon;
    return ProblemConfig{std::move(name), std::move(sys), std::move(env), PlannerParams{},
                         TisParams{}, lib, 1};
}

ProblemConfig toy2d() {
    return make("toy2d", toy_a(), toy_b(), vec({-0.5}), vec({0.5}), vec({-6.0, -4.0}),
                vec({6.0, 4.0}), {box({0, 1}, vec({-0.5, -1.0}), vec({0.5, 1.0}))},
                vec({-3.0, 0.0}), vec({3.0, 0.0}), 0.25, 40.0);
}

ProblemConfig toy8d() {
    Matrix A = Matrix::Zero(8, 8);
    Matrix B = Matrix::Zero(8, 4);
    Vector xlo(8);
    Vector xhi(8);
    for (int k = 0; k < 4; ++k) {
        A.block(2 * k, 2 * k, 2, 2) = toy_a();
        B.block(2 * k, k, 2, 1) = toy_b();
        xlo.segment(2 * k, 2) << -6.0, -4.0;
        xhi.segment(2 * k, 2) << 6.0, 4.0;
    }
    // The toy2d phase-plane box, extended by a length of 2 centred on zero in
    // every extra coordinate.
    Vector olo = Vector::Constant(8, -1.0);
    Vector ohi = Vector::Constant(8, 1.0);
    olo.head(2) << -0.5, -1.0;
    ohi.head(2) << 0.5, 1.0;
    Vector start = Vector::Zero(8);
    Vector goal = Vector::Zero(8);
    start[0] = -2.0;
    goal[0] = 2.0;
    return make("toy8d", std::move(A), std::move(B), Vector::Constant(4, -1.0),
                Vector::Constant(4, 1.0), std::move(xlo), std::move(xhi),
                {box({0, 1, 2, 3, 4, 5, 6, 7}, olo, ohi)}, std::move(start), std::move(goal), 1.0,
                40.0);
}

ProblemConfig moonlander() {
    Matrix A = Matrix::Zero(4, 4);
    A(0, 2) = 1.0;
    A(1, 3) = 1.0;
    Matrix B = Matrix::Zero(4, 3);
    B(2, 0) = -2.0;
    B(2, 1) = 1.0;
    B(3, 2) = 1.0;
    // Two walls across the descent leaving an off-centre gap x in [0.5, 1.5].
    std::vector<ObstacleBox> walls{box({0, 1}, vec({-3.0, -2.0}), vec({0.5, -1.5})),
                                   box({0, 1}, vec({1.5, -2.0}), vec({3.0, -1.5}))};
    return make("moonlander", std::move(A), std::move(B), vec({0.0, 0.0, -2.0}),
                vec({1.0, 1.0, 2.0}), vec({-3.0, -5.0, -3.0, -4.0}), vec({3.0, 2.0, 3.0, 4.0}),
                std::move(walls), vec({0.0, 1.0, 0.0, -2.0}), vec({0.0, -4.0, 0.0, 0.0}), 0.25,
                20.0);
}

ProblemConfig quadrotor() {
    constexpr double g = 9.81;
    constexpr double mass = 1.0;
    constexpr double inertia = 1.0;
    Matrix A = Matrix::Zero(6, 6);
    A(0, 2) = 1.0;
    A(1, 3) = 1.0;
    A(2, 5) = -g;
    A(5, 4) = 1.0;
    Matrix B = Matrix::Zero(6, 2);
    B(3, 0) = 1.0 / mass;
    B(4, 1) = 1.0 / inertia;
    // A wall at x = 0 with a window for z in [-0.5, 0.5].
    std::vector<ObstacleBox> walls{box({0, 1}, vec({-0.25, 0.5}), vec({0.25, 2.0})),
                                   box({0, 1}, vec({-0.25, -2.0}), vec({0.25, -0.5}))};
    return make("quadrotor", std::move(A), std::move(B), vec({-1.0, -1.0}), vec({1.0, 1.0}),
                vec({-4.0, -2.0, -3.0, -2.0, -2.0, -0.5}), vec({4.0, 2.0, 3.0, 2.0, 2.0, 0.5}),
                std::move(walls), vec({-2.5, 0.0, 0.0, 0.0, 0.0, 0.0}),
                vec({2.5, 0.0, 0.0, 0.0, 0.0, 0.0}), 1.0, 20.0);
}

}  // namespace

std::vector<std::string> builtin_problem_names() {
    return {"toy2d", "toy8d", "moonlander", "quadrotor"};
}

ProblemConfig builtin_problem(const std::string& name) {
    if (name == "toy2d") return toy2d();
    if (name == "toy8d") return toy8d();
    if (name == "moonlander") return moonlander();
    if (name == "quadrotor") return quadrotor();
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

ProblemConfig resolve_problem(const std::string& name_or_path) {
    const auto names = builtin_problem_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) {
        return builtin_problem(name_or_path);
    }
    if (std::filesystem::exists(name_or_path)) {
        return load_config(name_or_path);
    }
    throw std::invalid_argument("'" + name_or_path +
                                "' is neither a builtin problem nor a config file");
}

}  // namespace tis
