#pragma once

#include "tis/reach.hpp"

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>

namespace tis {

struct TisParams {
    /// Attempts per call before falling back to a uniform state-box sample.
    int attempts = 10;
    /// Duration grid pitch of the vertex inclusion test, seconds.
    double delta = 0.1;
};

struct SamplerStats {
    std::size_t calls = 0;
    std::size_t fallbacks = 0;
    std::size_t informed_samples = 0;

    friend bool operator==(const SamplerStats&, const SamplerStats&) = default;
};

enum class SampleOrigin { informed, fallback };

struct TisSample {
    Vector state;
    SampleOrigin origin;
};

/**
 * The set of states that can lie on a trajectory of cost at most T, built
 * from a reachability library: a state v with cost-to-come t belongs to it
 * when v lies in one of the backward sets of duration tau - t, tau in [t, T].
 *
 * One instance per planner task. The library is shared read-only.
 */
class TimeInformedSet {
public:
    TimeInformedSet(std::shared_ptr<const ReachLibrary> library, Vector state_lo, Vector state_hi,
                    TisParams params = {});

    /// Best known solution cost; +inf until the first update.
    double best_cost() const { return best_cost_; }

    /// best_cost := min(best_cost, cost). Requires cost > 0.
    void update_best_cost(double cost);

    /**
     * Draws t ~ U[0, T], then up to `attempts` times samples the smaller of
     * F[0,t] and B[T-t] and keeps the draw if it lies in the other one (and in
     * the state box). Otherwise returns a uniform state-box sample.
     *
     * Requires a finite best cost no larger than the library horizon.
     */
    TisSample generate_sample(Rng& rng);

    /**
     * Vertex inclusion test for a state with cost-to-come t: false when t > T,
     * otherwise whether v lies in a backward set of duration T - t, k * delta
     * (k >= 1, below T - t) or 0. Always true while T is infinite.
     */
    bool include_vertex(const Vector& v, double cost_to_come) const;

    const SamplerStats& stats() const { return stats_; }
    const TisParams& params() const { return params_; }
    const ReachLibrary& library() const { return *library_; }
    std::shared_ptr<const ReachLibrary> library_handle() const { return library_; }

private:
    bool in_state_box(const Vector& x) const;

    std::shared_ptr<const ReachLibrary> library_;
    Vector state_lo_;
    Vector state_hi_;
    TisParams params_;
    double best_cost_ = std::numeric_limits<double>::infinity();
    SamplerStats stats_;
};

/// Informed-propagation rule: nullopt rejects the expansion (t > T); otherwise
/// the maximum rollout duration T - t (infinite while T is).
std::optional<double> ip_budget(double cost_to_come, double best_cost);

/// fallbacks / calls. Throws std::domain_error when calls == 0.
double fallback_ratio(const SamplerStats& stats);

}  // namespace tis
