#pragma once

#include "tis/linsys.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tis {

/**
 * Brute-force Euclidean index over a dynamic set of points. Ids are caller
 * supplied and dense. Ties are broken toward the lower id so results do not
 * depend on insertion/removal history.
 */
class PointIndex {
public:
    explicit PointIndex(int dim) : dim_(dim) {}

    void insert(std::size_t id, const Vector& point);
    void erase(std::size_t id);
    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }

    struct Hit {
        std::size_t id;
        double distance_sq;
    };

    std::optional<Hit> nearest(const Vector& query) const;

    /// Calls f(id, distance_sq) for every point within `radius`.
    template <typename F>
    void for_each_within(const Vector& query, double radius, F&& f) const {
        const double r2 = radius * radius;
        for (std::size_t k = 0; k < ids_.size(); ++k) {
            const double d2 = distance_sq(k, query);
            if (d2 <= r2) {
                f(ids_[k], d2);
            }
        }
    }

private:
    double distance_sq(std::size_t slot, const Vector& query) const;

    int dim_;
    std::vector<double> coords_;
    std::vector<std::size_t> ids_;
    std::vector<std::size_t> slot_of_;  // id -> slot, npos when absent
};

struct SstNode {
    Vector state;
    /// Cost-to-come, seconds.
    double cost = 0.0;
    std::optional<std::size_t> parent;
    Vector control;
    double duration = 0.0;
    bool active = true;
    bool removed = false;
    std::size_t children = 0;
};

struct Witness {
    Vector state;
    std::optional<std::size_t> representative;
};

struct WitnessDecision {
    bool accept = false;
    /// Existing witness the candidate falls under; empty means a new witness.
    std::optional<std::size_t> witness;
    /// Representative that the candidate would replace.
    std::optional<std::size_t> displaced;
};

/**
 * Sparse tree: nodes plus the witness set that keeps at most one active
 * representative within the pruning radius of each witness.
 */
class SstTree {
public:
    SstTree(const Vector& root, double selection_radius, double pruning_radius);

    /// Best-near rule: cheapest active node within the selection radius, or
    /// the nearest active node when none is that close.
    std::size_t select_node(const Vector& target) const;

    WitnessDecision witness_accept(const Vector& state, double cost) const;

    /// Adds an accepted candidate; applies the witness decision (new witness,
    /// or representative swap with deactivation and leaf-chain pruning).
    std::size_t insert(const Vector& state, double cost, std::size_t parent, Vector control,
                       double duration, const WitnessDecision& decision);

    const SstNode& node(std::size_t id) const { return nodes_[id]; }
    const std::vector<SstNode>& nodes() const { return nodes_; }
    const std::vector<Witness>& witnesses() const { return witnesses_; }

    /// Nodes not pruned (active or kept as interior of the tree).
    std::size_t size() const { return alive_; }
    std::size_t active_size() const { return active_.size(); }

    /// Node ids from the root to `id`.
    std::vector<std::size_t> path_to_root(std::size_t id) const;

    /// Cost bookkeeping and witness sparsity. Returns an empty string when
    /// all invariants hold, otherwise a description of the first violation.
    std::string check_invariants() const;

    double selection_radius() const { return selection_radius_; }
    double pruning_radius() const { return pruning_radius_; }

private:
    void deactivate(std::size_t id);

    double selection_radius_;
    double pruning_radius_;
    std::vector<SstNode> nodes_;
    std::vector<Witness> witnesses_;
    PointIndex active_;
    PointIndex witness_index_;
    std::size_t alive_ = 0;
};

}  // namespace tis
