#include "tis/env.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace tis {

using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message),
      field_(std::move(field)) {}

namespace {

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

json to_json(const Matrix& M) {
    json out = json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            row.push_back(M(r, c));
        }
        out.push_back(std::move(row));
    }
    return out;
}

/// Walks a JSON object while tracking the dotted field path for messages.
class Node {
public:
    Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

    Node child(const std::string& key) const {
        require_object();
        auto it = value_.find(key);
        if (it == value_.end()) {
            throw ConfigError(join(key), "missing field");
        }
        return Node(*it, join(key));
    }

    bool has(const std::string& key) const {
        require_object();
        return value_.contains(key);
    }

    void only_keys(std::initializer_list<const char*> allowed) const {
        require_object();
        std::set<std::string> keys(allowed.begin(), allowed.end());
        for (auto it = value_.begin(); it != value_.end(); ++it) {
            if (!keys.count(it.key())) {
                throw ConfigError(join(it.key()), "unknown field");
            }
        }
    }

    double number() const {
        if (!value_.is_number()) {
            throw ConfigError(path_, "expected a number");
        }
        return value_.get<double>();
    }

    long integer() const {
        if (!value_.is_number_integer()) {
            throw ConfigError(path_, "expected an integer");
        }
        return value_.get<long>();
    }

    std::uint64_t unsigned_integer() const {
        if (!value_.is_number_unsigned() && !(value_.is_number_integer() && value_.get<long>() >= 0)) {
            throw ConfigError(path_, "expected a non-negative integer");
        }
        return value_.get<std::uint64_t>();
    }

    std::string string() const {
        if (!value_.is_string()) {
            throw ConfigError(path_, "expected a string");
        }
        return value_.get<std::string>();
    }

    Vector vector(Eigen::Index expected = -1) const {
        if (!value_.is_array()) {
            throw ConfigError(path_, "expected an array of numbers");
        }
        const auto n = static_cast<Eigen::Index>(value_.size());
        if (expected >= 0 && n != expected) {
            throw ConfigError(path_, "expected " + std::to_string(expected) + " entries, got " +
                                         std::to_string(n));
        }
        Vector v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            v[i] = Node(value_[static_cast<std::size_t>(i)], path_ + "[" + std::to_string(i) + "]")
                       .number();
        }
        return v;
    }

    /// Row-major nested arrays.
    Matrix matrix(Eigen::Index rows = -1, Eigen::Index cols = -1) const {
        if (!value_.is_array() || value_.empty()) {
            throw ConfigError(path_, "expected a non-empty array of rows");
        }
        const auto r = static_cast<Eigen::Index>(value_.size());
        const json& first = value_.front();
        const auto c = first.is_array() ? static_cast<Eigen::Index>(first.size()) : 0;
        if ((rows >= 0 && r != rows) || (cols >= 0 && c != cols)) {
            std::ostringstream os;
            os << "expected a " << (rows >= 0 ? std::to_string(rows) : "?") << "x"
               << (cols >= 0 ? std::to_string(cols) : "?") << " matrix, got " << r << "x" << c;
            throw ConfigError(path_, os.str());
        }
        Matrix M(r, c);
        for (Eigen::Index i = 0; i < r; ++i) {
            const Node row(value_[static_cast<std::size_t>(i)], path_ + "[" + std::to_string(i) + "]");
            M.row(i) = row.vector(c).transpose();
        }
        return M;
    }

    const json& raw() const { return value_; }

private:
    void require_object() const {
        if (!value_.is_object()) {
            throw ConfigError(path_, "expected an object");
        }
    }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& value_;
    std::string path_;
};

template <typename T, typename F>
T wrap(const std::string& field, F&& make) {
    try {
        return make();
    } catch (const ConfigError&) {
        throw;
    } catch (const NotPositiveDefinite& e) {
        throw ConfigError(field, std::string("not symmetric positive definite (") + e.what() + ")");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

PlannerParams read_planner(const Node& node) {
    node.only_keys({"selection_radius", "pruning_radius", "dt", "control_step", "min_steps",
                    "max_steps", "collision_resolution", "goal_bias", "log_every_iterations",
                    "log_every_seconds"});
    PlannerParams p;
    auto num = [&](const char* key, double& out) {
        if (node.has(key)) out = node.child(key).number();
    };
    num("selection_radius", p.selection_radius);
    num("pruning_radius", p.pruning_radius);
    num("dt", p.dt);
    num("control_step", p.control_step);
    num("collision_resolution", p.collision_resolution);
    num("goal_bias", p.goal_bias);
    num("log_every_seconds", p.log_every_seconds);
    if (node.has("min_steps")) p.min_steps = static_cast<int>(node.child("min_steps").integer());
    if (node.has("max_steps")) p.max_steps = static_cast<int>(node.child("max_steps").integer());
    if (node.has("log_every_iterations")) {
        p.log_every_iterations = node.child("log_every_iterations").unsigned_integer();
    }
    if (!(p.pruning_radius > 0.0 && p.pruning_radius < p.selection_radius)) {
        throw ConfigError(node.path() + ".pruning_radius",
                          "require 0 < pruning_radius < selection_radius");
    }
    if (!(p.dt > 0.0) || !(p.control_step > 0.0) || !(p.collision_resolution > 0.0)) {
        throw ConfigError(node.path(), "dt, control_step and collision_resolution must be positive");
    }
    if (p.min_steps < 1 || p.max_steps < p.min_steps) {
        throw ConfigError(node.path() + ".max_steps", "require 1 <= min_steps <= max_steps");
    }
    if (!(p.goal_bias >= 0.0 && p.goal_bias <= 1.0)) {
        throw ConfigError(node.path() + ".goal_bias", "must lie in [0, 1]");
    }
    return p;
}

TisParams read_tie(const Node& node) {
    node.only_keys({"attempts", "delta"});
    TisParams p;
    if (node.has("attempts")) p.attempts = static_cast<int>(node.child("attempts").integer());
    if (node.has("delta")) p.delta = node.child("delta").number();
    if (p.attempts < 1) throw ConfigError(node.path() + ".attempts", "must be at least 1");
    if (!(p.delta > 0.0)) throw ConfigError(node.path() + ".delta", "must be positive");
    return p;
}

LibraryParams read_library(const Node& node) {
    node.only_keys({"step", "start_radius", "horizon", "horizon_factor"});
    LibraryParams p;
    if (node.has("step")) p.step = node.child("step").number();
    if (node.has("start_radius")) p.start_radius = node.child("start_radius").number();
    if (node.has("horizon")) p.horizon = node.child("horizon").number();
    if (node.has("horizon_factor")) p.horizon_factor = node.child("horizon_factor").number();
    if (!(p.step > 0.0)) throw ConfigError(node.path() + ".step", "must be positive");
    if (!(p.start_radius > 0.0)) throw ConfigError(node.path() + ".start_radius", "must be positive");
    if (!(p.horizon >= 0.0)) throw ConfigError(node.path() + ".horizon", "must be non-negative");
    if (!(p.horizon_factor >= 1.0)) {
        throw ConfigError(node.path() + ".horizon_factor", "must be at least 1");
    }
    return p;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

}  // namespace

std::string config_to_json(const ProblemConfig& c) {
    json obstacles = json::array();
    for (const auto& box : c.environment.obstacles()) {
        obstacles.push_back({{"dims", box.dims}, {"lo", to_json(box.lo)}, {"hi", to_json(box.hi)}});
    }
    const auto& p = c.planner;
    json doc = {
        {"name", c.name},
        {"system",
         {{"A", to_json(c.system.A())},
          {"B", to_json(c.system.B())},
          {"control_lo", to_json(c.system.control_lo())},
          {"control_hi", to_json(c.system.control_hi())}}},
        {"environment",
         {{"state_lo", to_json(c.environment.state_lo())},
          {"state_hi", to_json(c.environment.state_hi())},
          {"start", to_json(c.environment.start())},
          {"goal",
           {{"center", to_json(c.environment.goal().center())},
            {"shape", to_json(c.environment.goal().shape())}}},
          {"obstacles", obstacles}}},
        {"planner",
         {{"selection_radius", p.selection_radius},
          {"pruning_radius", p.pruning_radius},
          {"dt", p.dt},
          {"control_step", p.control_step},
          {"min_steps", p.min_steps},
          {"max_steps", p.max_steps},
          {"collision_resolution", p.collision_resolution},
          {"goal_bias", p.goal_bias},
          {"log_every_iterations", p.log_every_iterations},
          {"log_every_seconds", p.log_every_seconds}}},
        {"tie", {{"attempts", c.tie.attempts}, {"delta", c.tie.delta}}},
        {"library",
         {{"step", c.library.step},
          {"start_radius", c.library.start_radius},
          {"horizon", c.library.horizon},
          {"horizon_factor", c.library.horizon_factor}}},
        {"seed", c.seed},
    };
    return doc.dump(2) + "\n";
}

ProblemConfig config_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    const Node root(doc, "");
    root.only_keys({"name", "system", "environment", "planner", "tie", "library", "seed"});

    const std::string name = root.has("name") ? root.child("name").string() : std::string("custom");

    const Node sys = root.child("system");
    sys.only_keys({"A", "B", "control_lo", "control_hi"});
    const Matrix A = sys.child("A").matrix();
    const auto n = A.rows();
    if (A.cols() != n) {
        throw ConfigError("system.A", "expected a square matrix, got " + std::to_string(n) + "x" +
                                          std::to_string(A.cols()));
    }
    const Node bnode = sys.child("B");
    const Matrix B = bnode.matrix(n);
    const auto m = B.cols();
    const Vector ulo = sys.child("control_lo").vector(m);
    const Vector uhi = sys.child("control_hi").vector(m);

    const Node env = root.child("environment");
    env.only_keys({"state_lo", "state_hi", "start", "goal", "obstacles"});
    const Vector xlo = env.child("state_lo").vector(n);
    const Vector xhi = env.child("state_hi").vector(n);
    const Vector start = env.child("start").vector(n);

    const Node goal = env.child("goal");
    goal.only_keys({"center", "shape"});
    const Vector gc = goal.child("center").vector(n);
    const Matrix gq = goal.child("shape").matrix(n, n);
    Ellipsoid goal_set = wrap<Ellipsoid>("environment.goal.shape", [&] { return Ellipsoid(gc, gq); });

    std::vector<ObstacleBox> obstacles;
    if (env.has("obstacles")) {
        const Node list = env.child("obstacles");
        if (!list.raw().is_array()) {
            throw ConfigError(list.path(), "expected an array");
        }
        for (std::size_t i = 0; i < list.raw().size(); ++i) {
            const Node o(list.raw()[i], list.path() + "[" + std::to_string(i) + "]");
            o.only_keys({"dims", "lo", "hi"});
            const Vector dims_v = o.child("dims").vector();
            ObstacleBox box;
            for (Eigen::Index k = 0; k < dims_v.size(); ++k) {
                const double d = dims_v[k];
                if (d != std::floor(d) || d < 0 || d >= static_cast<double>(n)) {
                    throw ConfigError(o.path() + ".dims", "entries must be state indices in [0, " +
                                                               std::to_string(n) + ")");
                }
                box.dims.push_back(static_cast<int>(d));
            }
            box.lo = o.child("lo").vector(dims_v.size());
            box.hi = o.child("hi").vector(dims_v.size());
            obstacles.push_back(std::move(box));
        }
    }

    LtiSystem system = wrap<LtiSystem>("system", [&] { return LtiSystem(A, B, ulo, uhi, xlo, xhi); });
    Environment environment = wrap<Environment>("environment", [&] {
        return Environment(xlo, xhi, std::move(obstacles), start, goal_set);
    });

    PlannerParams planner = root.has("planner") ? read_planner(root.child("planner")) : PlannerParams{};
    TisParams tie = root.has("tie") ? read_tie(root.child("tie")) : TisParams{};
    LibraryParams library = root.has("library") ? read_library(root.child("library")) : LibraryParams{};
    const std::uint64_t seed = root.has("seed") ? root.child("seed").unsigned_integer() : 1;

    return ProblemConfig{name, std::move(system), std::move(environment), planner, tie, library, seed};
}

void save_config(const ProblemConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("save_config: cannot open " + path.string());
    }
    out << config_to_json(config);
    if (!out) {
        throw std::runtime_error("save_config: write failed for " + path.string());
    }
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_config: cannot open " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
}

}  // namespace tis
