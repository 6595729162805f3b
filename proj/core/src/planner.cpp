#include "tis/planner.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tis {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::uniform:
            return "uniform";
        case Strategy::informed_propagation:
            return "ip";
        case Strategy::time_informed:
            return "tie";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    if (name == "uniform") return Strategy::uniform;
    if (name == "ip") return Strategy::informed_propagation;
    if (name == "tie") return Strategy::time_informed;
    throw std::invalid_argument("unknown strategy '" + name + "' (expected uniform, ip or tie)");
}

bool same_progress(const PlannerEvent& a, const PlannerEvent& b) {
    return a.iteration == b.iteration && a.best_cost == b.best_cost && a.vertices == b.vertices &&
           a.candidates_generated == b.candidates_generated &&
           a.candidates_accepted == b.candidates_accepted && a.sampler_calls == b.sampler_calls &&
           a.fallbacks == b.fallbacks;
}

bool goal_satisfied(const Environment& env, const Vector& x) { return contains(env.goal(), x); }

SstPlanner::SstPlanner(LtiSystem system, Environment env, Strategy strategy, PlannerParams params,
                       TisParams tis_params, LibraryParams library_params,
                       std::shared_ptr<const ReachLibrary> library)
    : system_(std::move(system)),
      env_(std::move(env)),
      strategy_(strategy),
      params_(params),
      tis_params_(tis_params),
      library_params_(library_params),
      library_(std::move(library)) {
    if (system_.state_dim() != env_.dim()) {
        throw std::invalid_argument("SstPlanner: system and environment dimensions differ");
    }
    if (!(params_.pruning_radius > 0.0) || !(params_.pruning_radius < params_.selection_radius)) {
        throw std::invalid_argument("SstPlanner: require 0 < pruning radius < selection radius");
    }
    if (!(params_.dt > 0.0) || !(params_.control_step > 0.0) || params_.min_steps < 1 ||
        params_.max_steps < params_.min_steps || !(params_.collision_resolution > 0.0)) {
        throw std::invalid_argument("SstPlanner: invalid rollout parameters");
    }
    if (library_ && library_->dim() != env_.dim()) {
        throw std::invalid_argument("SstPlanner: library dimension differs from the problem");
    }
}

Vector SstPlanner::sample_target(Rng& rng) {
    if (strategy_ == Strategy::time_informed && informed_) {
        return informed_->generate_sample(rng).state;
    }
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < params_.goal_bias) {
        return sample_uniform(env_.goal(), rng);
    }
    return sample_box(env_.state_lo(), env_.state_hi(), rng);
}

std::optional<SstPlanner::Candidate> SstPlanner::extend(std::size_t node_id, Rng& rng) {
    const SstNode& node = tree_->node(node_id);
    Candidate c;
    c.control = sample_control(system_, rng);
    std::uniform_int_distribution<int> steps(params_.min_steps, params_.max_steps);
    double duration = static_cast<double>(steps(rng)) * params_.control_step;

    if (strategy_ == Strategy::informed_propagation) {
        const auto cap = ip_budget(node.cost, best_cost_);
        if (!cap || *cap <= 1e-9) {
            ++counters_.rejected_informed;
            return std::nullopt;
        }
        duration = std::min(duration, *cap);
    }

    c.rollout = propagate(system_, node.state, c.control, duration, params_.dt);
    if (c.rollout.truncated) {
        ++counters_.rejected_collision;
        return std::nullopt;
    }
    auto& samples = c.rollout.samples;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (!segment_valid(env_, samples[i - 1].state, samples[i].state,
                           samples[i].time - samples[i - 1].time, params_.collision_resolution)) {
            ++counters_.rejected_collision;
            return std::nullopt;
        }
        if (goal_satisfied(env_, samples[i].state)) {
            samples.resize(i + 1);
            c.reaches_goal = true;
            break;
        }
    }
    ++counters_.candidates_generated;

    const double cost = node.cost + c.rollout.duration();
    const bool improves = c.reaches_goal && cost < best_cost_;
    if (strategy_ == Strategy::time_informed && informed_ && !improves &&
        !informed_->include_vertex(c.rollout.final_state(), cost)) {
        ++counters_.rejected_informed;
        return std::nullopt;
    }
    return c;
}

Trajectory SstPlanner::extract(std::size_t parent, const Candidate& c) const {
    Trajectory out;
    const auto path = tree_->path_to_root(parent);
    out.samples.push_back({0.0, tree_->node(path.front()).state, Vector()});

    auto append = [&](const Trajectory& piece, double base, double end_time) {
        out.samples.back().control = piece.samples.front().control;
        for (std::size_t i = 1; i < piece.samples.size(); ++i) {
            out.samples.push_back(
                {base + piece.samples[i].time, piece.samples[i].state, piece.samples[i].control});
        }
        out.samples.back().time = end_time;
    };

    for (std::size_t k = 1; k < path.size(); ++k) {
        const SstNode& from = tree_->node(path[k - 1]);
        const SstNode& to = tree_->node(path[k]);
        const Trajectory piece = propagate(system_, from.state, to.control, to.duration, params_.dt);
        append(piece, from.cost, to.cost);
    }
    const SstNode& last = tree_->node(parent);
    append(c.rollout, last.cost, last.cost + c.rollout.duration());
    out.samples.back().control = c.control;
    return out;
}

void SstPlanner::ensure_informed_set(double best_cost, PlannerResult& result) {
    if (strategy_ != Strategy::time_informed) {
        return;
    }
    if (!library_ || library_->horizon() < best_cost) {
        const auto t0 = Clock::now();
        const double horizon =
            std::max(best_cost * library_params_.horizon_factor, best_cost + library_params_.step);
        library_ = std::make_shared<const ReachLibrary>(
            build_library(system_, env_.start(), env_.goal(), horizon, library_params_.step,
                          library_params_.start_radius));
        result.library_build_ms += ms_since(t0);
        informed_.reset();
    }
    if (!informed_) {
        informed_ = std::make_unique<TimeInformedSet>(library_, env_.state_lo(), env_.state_hi(),
                                                      tis_params_);
    }
    informed_->update_best_cost(best_cost);
}

PlannerResult SstPlanner::solve(const Budget& budget, Rng& rng) {
    if (budget.kind == Budget::Kind::wall ? !(budget.seconds > 0.0) : budget.iterations == 0) {
        throw std::invalid_argument("solve: budget must be positive");
    }
    if (state_in_collision(env_, env_.start())) {
        throw std::invalid_argument("solve: start state is not collision free");
    }

    const auto t0 = Clock::now();
    tree_ = std::make_unique<SstTree>(env_.start(), params_.selection_radius,
                                      params_.pruning_radius);
    informed_.reset();
    counters_ = {};
    best_cost_ = kInf;

    PlannerResult result;
    result.best_cost = kInf;

    auto elapsed_ms = [&] { return ms_since(t0) - result.library_build_ms; };
    auto log = [&] {
        PlannerEvent e;
        e.wall_ms = elapsed_ms();
        e.iteration = counters_.iterations;
        e.best_cost = best_cost_;
        e.vertices = tree_->size();
        e.candidates_generated = counters_.candidates_generated;
        e.candidates_accepted = counters_.candidates_accepted;
        if (informed_) {
            e.sampler_calls = informed_->stats().calls;
            e.fallbacks = informed_->stats().fallbacks;
        }
        result.events.push_back(e);
    };

    if (goal_satisfied(env_, env_.start())) {
        Trajectory traj;
        traj.samples.push_back({0.0, env_.start(), Vector::Zero(system_.control_dim())});
        best_cost_ = 0.0;
        result.best = traj;
        result.best_cost = 0.0;
        result.solutions.push_back({0.0, std::move(traj), 0, elapsed_ms()});
        log();
        result.counters = counters_;
        return result;
    }

    log();
    const bool wall = budget.kind == Budget::Kind::wall;
    const double budget_ms = budget.seconds * 1000.0;
    const double log_ms = params_.log_every_seconds * 1000.0;
    double next_log_ms = log_ms;

    while (wall ? elapsed_ms() < budget_ms : counters_.iterations < budget.iterations) {
        ++counters_.iterations;
        const Vector target = sample_target(rng);
        const std::size_t parent = tree_->select_node(target);
        auto cand = extend(parent, rng);

        if (cand) {
            const double cost = tree_->node(parent).cost + cand->rollout.duration();
            const Vector& end = cand->rollout.final_state();
            if (cand->reaches_goal && cost < best_cost_) {
                Trajectory traj = extract(parent, *cand);
                best_cost_ = cost;
                result.best_cost = cost;
                ensure_informed_set(cost, result);
                result.solutions.push_back({cost, traj, counters_.iterations, elapsed_ms()});
                result.best = std::move(traj);
            }
            const WitnessDecision decision = tree_->witness_accept(end, cost);
            if (decision.accept) {
                tree_->insert(end, cost, parent, cand->control, cand->rollout.duration(),
                              decision);
                ++counters_.candidates_accepted;
            } else {
                ++counters_.rejected_witness;
            }
            if (!result.solutions.empty() && result.solutions.back().iteration ==
                                                 counters_.iterations) {
                log();
                continue;
            }
        }

        if (wall) {
            if (elapsed_ms() >= next_log_ms) {
                log();
                next_log_ms += log_ms;
            }
        } else if (params_.log_every_iterations > 0 &&
                   counters_.iterations % params_.log_every_iterations == 0) {
            log();
        }
    }
    log();

    result.counters = counters_;
    if (informed_) {
        result.sampler = informed_->stats();
    }
    return result;
}

PlannerResult solve(const ProblemConfig& config, Strategy strategy, const Budget& budget, Rng& rng,
                    std::shared_ptr<const ReachLibrary> library) {
    SstPlanner planner(config.system, config.environment, strategy, config.planner, config.tie,
                       config.library, std::move(library));
    return planner.solve(budget, rng);
}

}  // namespace tis
