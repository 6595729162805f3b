#include "tis/sst_tree.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tis {

namespace {
constexpr std::size_t kNoSlot = std::numeric_limits<std::size_t>::max();
}

// ---------------------------------------------------------------------------
// PointIndex

void PointIndex::insert(std::size_t id, const Vector& point) {
    if (point.size() != dim_) {
        throw std::invalid_argument("PointIndex: dimension mismatch");
    }
    if (id >= slot_of_.size()) {
        slot_of_.resize(id + 1, kNoSlot);
    }
    if (slot_of_[id] != kNoSlot) {
        throw std::invalid_argument("PointIndex: duplicate id");
    }
    slot_of_[id] = ids_.size();
    ids_.push_back(id);
    coords_.insert(coords_.end(), point.data(), point.data() + dim_);
}

void PointIndex::erase(std::size_t id) {
    if (id >= slot_of_.size() || slot_of_[id] == kNoSlot) {
        return;
    }
    const std::size_t slot = slot_of_[id];
    const std::size_t last = ids_.size() - 1;
    if (slot != last) {
        ids_[slot] = ids_[last];
        slot_of_[ids_[slot]] = slot;
        std::copy_n(coords_.begin() + static_cast<long>(last * dim_), dim_,
                    coords_.begin() + static_cast<long>(slot * dim_));
    }
    ids_.pop_back();
    coords_.resize(coords_.size() - static_cast<std::size_t>(dim_));
    slot_of_[id] = kNoSlot;
}

double PointIndex::distance_sq(std::size_t slot, const Vector& query) const {
    const double* p = coords_.data() + slot * static_cast<std::size_t>(dim_);
    double sum = 0.0;
    for (int i = 0; i < dim_; ++i) {
        const double d = p[i] - query[i];
        sum += d * d;
    }
    return sum;
}

std::optional<PointIndex::Hit> PointIndex::nearest(const Vector& query) const {
    std::optional<Hit> best;
    for (std::size_t k = 0; k < ids_.size(); ++k) {
        const double d2 = distance_sq(k, query);
        if (!best || d2 < best->distance_sq || (d2 == best->distance_sq && ids_[k] < best->id)) {
            best = Hit{ids_[k], d2};
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// SstTree

SstTree::SstTree(const Vector& root, double selection_radius, double pruning_radius)
    : selection_radius_(selection_radius),
      pruning_radius_(pruning_radius),
      active_(static_cast<int>(root.size())),
      witness_index_(static_cast<int>(root.size())) {
    if (!(pruning_radius_ > 0.0) || !(pruning_radius_ < selection_radius_)) {
        throw std::invalid_argument("SstTree: require 0 < pruning radius < selection radius");
    }
    SstNode r;
    r.state = root;
    nodes_.push_back(std::move(r));
    active_.insert(0, root);
    witnesses_.push_back({root, 0});
    witness_index_.insert(0, root);
    alive_ = 1;
}

std::size_t SstTree::select_node(const Vector& target) const {
    std::optional<std::size_t> best;
    active_.for_each_within(target, selection_radius_, [&](std::size_t id, double) {
        if (!best) {
            best = id;
            return;
        }
        const double c = nodes_[id].cost;
        const double b = nodes_[*best].cost;
        if (c < b || (c == b && id < *best)) {
            best = id;
        }
    });
    if (best) {
        return *best;
    }
    return active_.nearest(target)->id;
}

WitnessDecision SstTree::witness_accept(const Vector& state, double cost) const {
    const auto hit = witness_index_.nearest(state);
    if (!hit || hit->distance_sq > pruning_radius_ * pruning_radius_) {
        return {true, std::nullopt, std::nullopt};
    }
    const Witness& w = witnesses_[hit->id];
    if (!w.representative || cost < nodes_[*w.representative].cost) {
        return {true, hit->id, w.representative};
    }
    return {false, hit->id, std::nullopt};
}

std::size_t SstTree::insert(const Vector& state, double cost, std::size_t parent, Vector control,
                            double duration, const WitnessDecision& decision) {
    if (!decision.accept) {
        throw std::logic_error("SstTree::insert: candidate was rejected");
    }
    if (parent >= nodes_.size() || nodes_[parent].removed) {
        throw std::invalid_argument("SstTree::insert: invalid parent");
    }
    const std::size_t id = nodes_.size();
    SstNode n;
    n.state = state;
    n.cost = cost;
    n.parent = parent;
    n.control = std::move(control);
    n.duration = duration;
    nodes_.push_back(std::move(n));
    ++nodes_[parent].children;
    ++alive_;
    active_.insert(id, state);

    if (decision.witness) {
        witnesses_[*decision.witness].representative = id;
        if (decision.displaced) {
            deactivate(*decision.displaced);
        }
    } else {
        const std::size_t w = witnesses_.size();
        witnesses_.push_back({state, id});
        witness_index_.insert(w, state);
    }
    return id;
}

void SstTree::deactivate(std::size_t id) {
    SstNode& n = nodes_[id];
    if (!n.active) {
        return;
    }
    n.active = false;
    active_.erase(id);
    // Remove the chain of inactive leaves this leaves behind.
    std::size_t cur = id;
    while (nodes_[cur].parent && !nodes_[cur].active && nodes_[cur].children == 0 &&
           !nodes_[cur].removed) {
        nodes_[cur].removed = true;
        --alive_;
        const std::size_t p = *nodes_[cur].parent;
        --nodes_[p].children;
        cur = p;
    }
}

std::vector<std::size_t> SstTree::path_to_root(std::size_t id) const {
    std::vector<std::size_t> path;
    std::optional<std::size_t> cur = id;
    while (cur) {
        path.push_back(*cur);
        cur = nodes_[*cur].parent;
    }
    return {path.rbegin(), path.rend()};
}

std::string SstTree::check_invariants() const {
    std::ostringstream os;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
        const SstNode& n = nodes_[id];
        if (n.removed || !n.active) {
            continue;
        }
        double sum = 0.0;
        std::optional<std::size_t> cur = id;
        while (cur && nodes_[*cur].parent) {
            if (nodes_[*cur].removed) {
                os << "node " << id << " has a removed ancestor " << *cur;
                return os.str();
            }
            sum += nodes_[*cur].duration;
            cur = nodes_[*cur].parent;
        }
        if (std::abs(sum - n.cost) > 1e-9 * std::max(1.0, n.cost)) {
            os << "node " << id << " cost " << n.cost << " differs from path duration " << sum;
            return os.str();
        }
    }
    const double floor = pruning_radius_ - 1e-12;
    for (std::size_t i = 0; i < witnesses_.size(); ++i) {
        for (std::size_t j = i + 1; j < witnesses_.size(); ++j) {
            const double d = (witnesses_[i].state - witnesses_[j].state).norm();
            if (d < floor) {
                os << "witnesses " << i << " and " << j << " are " << d << " apart";
                return os.str();
            }
        }
    }
    return {};
}

}  // namespace tis
