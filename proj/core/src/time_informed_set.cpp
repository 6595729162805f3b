#include "tis/time_informed_set.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tis {

TimeInformedSet::TimeInformedSet(std::shared_ptr<const ReachLibrary> library, Vector state_lo,
                                 Vector state_hi, TisParams params)
    : library_(std::move(library)),
      state_lo_(std::move(state_lo)),
      state_hi_(std::move(state_hi)),
      params_(params) {
    if (!library_) {
        throw std::invalid_argument("TimeInformedSet: library is required");
    }
    if (params_.attempts < 1 || !(params_.delta > 0.0)) {
        throw std::invalid_argument("TimeInformedSet: require attempts >= 1 and delta > 0");
    }
    if (state_lo_.size() != library_->dim() || state_hi_.size() != library_->dim() ||
        !state_lo_.allFinite() || !state_hi_.allFinite() ||
        !(state_lo_.array() < state_hi_.array()).all()) {
        throw std::invalid_argument("TimeInformedSet: need a finite state box matching the library");
    }
}

void TimeInformedSet::update_best_cost(double cost) {
    if (!(cost > 0.0)) {
        throw std::invalid_argument("update_best_cost: cost must be positive");
    }
    best_cost_ = std::min(best_cost_, cost);
}

bool TimeInformedSet::in_state_box(const Vector& x) const {
    return (x.array() >= state_lo_.array()).all() && (x.array() <= state_hi_.array()).all();
}

TisSample TimeInformedSet::generate_sample(Rng& rng) {
    const double T = best_cost_;
    if (!std::isfinite(T)) {
        throw std::logic_error("generate_sample: no solution cost yet");
    }
    if (T > library_->horizon() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "generate_sample: best cost " << T << " exceeds library horizon "
           << library_->horizon();
        throw OutOfHorizon(os.str());
    }
    ++stats_.calls;

    std::uniform_real_distribution<double> time_dist(0.0, T);
    const double t = time_dist(rng);
    const Ellipsoid& forward = lookup_forward(*library_, t);
    const Ellipsoid& backward = lookup_backward(*library_, std::max(0.0, T - t));
    const bool sample_forward = log_measure(forward) < log_measure(backward);
    const Ellipsoid& proposal = sample_forward ? forward : backward;
    const Ellipsoid& check = sample_forward ? backward : forward;

    for (int i = 0; i < params_.attempts; ++i) {
        Vector candidate = sample_uniform(proposal, rng);
        if (contains(check, candidate) && in_state_box(candidate)) {
            ++stats_.informed_samples;
            return {std::move(candidate), SampleOrigin::informed};
        }
    }
    ++stats_.fallbacks;
    return {sample_box(state_lo_, state_hi_, rng), SampleOrigin::fallback};
}

bool TimeInformedSet::include_vertex(const Vector& v, double cost_to_come) const {
    if (!(cost_to_come >= 0.0)) {
        throw std::invalid_argument("include_vertex: cost-to-come must be non-negative");
    }
    const double T = best_cost_;
    if (cost_to_come > T) {
        return false;
    }
    if (!std::isinf(T)) {
        const double remaining = T - cost_to_come;
        // The endpoint tau = T is always on the grid; test it first since the
        // largest duration usually has the largest set.
        if (contains(lookup_backward(*library_, remaining), v)) {
            return true;
        }
        const double slack = 1e-9 * std::max(1.0, T);
        const auto steps = static_cast<long>(std::ceil((remaining - slack) / params_.delta)) - 1;
        for (long k = steps; k >= 1; --k) {
            const double duration = static_cast<double>(k) * params_.delta;
            if (contains(lookup_backward(*library_, duration), v)) {
                return true;
            }
        }
        // tau = t: the vertex is already in the goal set.
        return contains(library_->goal(), v);
    }
    // No solution yet: nothing can be excluded.
    return true;
}

std::optional<double> ip_budget(double cost_to_come, double best_cost) {
    if (!(cost_to_come >= 0.0)) {
        throw std::invalid_argument("ip_budget: cost-to-come must be non-negative");
    }
    if (cost_to_come > best_cost) {
        return std::nullopt;
    }
    return best_cost - cost_to_come;
}

double fallback_ratio(const SamplerStats& stats) {
    if (stats.calls == 0) {
        throw std::domain_error("fallback_ratio: no sampler calls");
    }
    return static_cast<double>(stats.fallbacks) / static_cast<double>(stats.calls);
}

}  // namespace tis
