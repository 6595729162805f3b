#pragma once

#include "tis/linsys.hpp"
#include "tis/params.hpp"
#include "tis/reach.hpp"
#include "tis/time_informed_set.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tis {

/// Axis-aligned box acting on a subset of the state coordinates.
struct ObstacleBox {
    std::vector<int> dims;
    Vector lo;
    Vector hi;

    /// Strict interior test on the declared coordinates; faces are free.
    bool contains_strictly(const Vector& x) const;

    friend bool operator==(const ObstacleBox& a, const ObstacleBox& b);
};

class Environment {
public:
    Environment(Vector state_lo, Vector state_hi, std::vector<ObstacleBox> obstacles, Vector start,
                Ellipsoid goal);

    int dim() const { return static_cast<int>(state_lo_.size()); }
    const Vector& state_lo() const { return state_lo_; }
    const Vector& state_hi() const { return state_hi_; }
    const std::vector<ObstacleBox>& obstacles() const { return obstacles_; }
    const Vector& start() const { return start_; }
    const Ellipsoid& goal() const { return goal_; }

    Environment without_obstacles() const;

    friend bool operator==(const Environment& a, const Environment& b);

private:
    Vector state_lo_;
    Vector state_hi_;
    std::vector<ObstacleBox> obstacles_;
    Vector start_;
    Ellipsoid goal_;
};

/// True when x leaves the state box or lies strictly inside an obstacle.
bool state_in_collision(const Environment& env, const Vector& x);

/// Checks every sample and linearly interpolated states between samples at
/// the given time resolution. Features thinner than what the resolution
/// resolves can be missed.
bool trajectory_valid(const Environment& env, const Trajectory& traj, double resolution);

/// Checks the straight segment a -> b traversed over `elapsed` seconds.
bool segment_valid(const Environment& env, const Vector& a, const Vector& b, double elapsed,
                   double resolution);

struct ProblemConfig {
    std::string name;
    LtiSystem system;
    Environment environment;
    PlannerParams planner;
    TisParams tie;
    LibraryParams library;
    std::uint64_t seed = 1;

    friend bool operator==(const ProblemConfig& a, const ProblemConfig& b);
};

/// toy2d | toy8d | moonlander | quadrotor. Throws std::invalid_argument for
/// any other name.
ProblemConfig builtin_problem(const std::string& name);

std::vector<std::string> builtin_problem_names();

/// Field-level validation failure while reading a configuration.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

std::string config_to_json(const ProblemConfig& config);
ProblemConfig config_from_json(const std::string& text);

void save_config(const ProblemConfig& config, const std::filesystem::path& path);
ProblemConfig load_config(const std::filesystem::path& path);

/// Builtin name or path to a JSON config.
ProblemConfig resolve_problem(const std::string& name_or_path);

}  // namespace tis
