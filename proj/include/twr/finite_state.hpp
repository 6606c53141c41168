#pragma once

/**
 * @file finite_state.hpp
 * @brief Scheduling over links whose rates take finitely many levels.
 *
 * Each link rate is one of s_1 < ... < s_n per slot, so the joint channel
 * state is one of n^2 pairs, drawn independently every slot from a known PMF.
 * The scheduler picks an assumed state before the slot; transmissions at the
 * assumed rates succeed only when the assumed pair is element-wise <= the
 * actual pair, and a failed slot delivers nothing.
 *
 * Picking assumed state i delivers, in expectation, success(i) times the
 * cross-point rates of state i. The expected sum rate alpha_i is linear in the
 * policy q, so the best policy puts all mass on argmax alpha_i.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "core_rates.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace twr {

class RateLevels {
public:
    explicit RateLevels(std::vector<double> levels) : levels_(std::move(levels)) {
        if (levels_.empty())
            throw DomainError("rate levels must be non-empty");
        for (std::size_t i = 0; i < levels_.size(); ++i) {
            if (!(levels_[i] > 0.0) || !std::isfinite(levels_[i]))
                throw DomainError("rate levels must be finite and > 0");
            if (i > 0 && !(levels_[i] > levels_[i - 1]))
                throw DomainError("rate levels must be strictly increasing");
        }
    }

    const std::vector<double>& values() const { return levels_; }
    std::size_t size() const { return levels_.size(); }
    double operator[](std::size_t i) const { return levels_[i]; }

private:
    std::vector<double> levels_;
};

/// One joint state: level indices of link 1 and link 2 plus their rates.
struct ChannelState {
    std::size_t level1 = 0;
    std::size_t level2 = 0;
    LinkCapacities caps;

    /// Element-wise <=, compared on level indices so it is exact.
    bool dominated_by(const ChannelState& other) const {
        return level1 <= other.level1 && level2 <= other.level2;
    }
};

/// All n^2 pairs, lexicographic by (link-1 level, link-2 level).
inline std::vector<ChannelState> enumerate_states(const RateLevels& levels) {
    std::vector<ChannelState> states;
    states.reserve(levels.size() * levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        for (std::size_t j = 0; j < levels.size(); ++j)
            states.push_back({i, j, {levels[i], levels[j]}});
    return states;
}

class FiniteStateModel {
public:
    static constexpr double kPmfTolerance = 1e-12;

    FiniteStateModel(RateLevels levels, std::vector<double> probs)
        : levels_(std::move(levels)), states_(enumerate_states(levels_)), probs_(std::move(probs)) {
        if (probs_.size() != states_.size())
            throw DomainError("state PMF needs " + std::to_string(states_.size()) +
                              " entries, got " + std::to_string(probs_.size()));
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || !std::isfinite(p))
                throw DomainError("state probabilities must be finite and >= 0");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kPmfTolerance)
            throw DomainError("state probabilities must sum to 1");
    }

    /// Uniform PMF over all states.
    static FiniteStateModel uniform(RateLevels levels) {
        const std::size_t n = levels.size() * levels.size();
        return {std::move(levels), std::vector<double>(n, 1.0 / static_cast<double>(n))};
    }

    const RateLevels& levels() const { return levels_; }
    const std::vector<ChannelState>& states() const { return states_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t size() const { return states_.size(); }

private:
    RateLevels levels_;
    std::vector<ChannelState> states_;
    std::vector<double> probs_;
};

/// Actual states k in which rates assumed from state i get through.
inline std::vector<std::size_t> success_set(std::size_t i, const FiniteStateModel& model) {
    if (i >= model.size())
        throw DomainError("state index out of range");
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < model.size(); ++k)
        if (model.states()[i].dominated_by(model.states()[k]))
            out.push_back(k);
    return out;
}

inline double success_probability(std::size_t i, const FiniteStateModel& model) {
    double p = 0.0;
    for (std::size_t k : success_set(i, model))
        p += model.probs()[k];
    return p;
}

struct AlphaVector {
    std::vector<double> alphas;  // expected per-slot sum rate for each assumed state
};

inline AlphaVector alpha_coefficients(const FiniteStateModel& model, const Backlog& backlog) {
    AlphaVector out;
    out.alphas.reserve(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        const RatePoint rp = cross_point(model.states()[i].caps, backlog);
        out.alphas.push_back(success_probability(i, model) * (rp.x + rp.y));
    }
    return out;
}

struct StatePolicy {
    std::vector<double> q;
    std::size_t selected = 0;  // the state carrying all mass for a degenerate policy

    static StatePolicy degenerate(std::size_t n_states, std::size_t i) {
        StatePolicy p;
        p.q.assign(n_states, 0.0);
        p.q.at(i) = 1.0;
        p.selected = i;
        return p;
    }
};

/// Degenerate policy on argmax alpha; ties go to the lexicographically
/// smallest (most conservative) state.
inline StatePolicy optimal_policy(const FiniteStateModel& model, const Backlog& backlog) {
    const AlphaVector a = alpha_coefficients(model, backlog);
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.alphas.size(); ++i)
        if (a.alphas[i] > a.alphas[best])
            best = i;
    return StatePolicy::degenerate(model.size(), best);
}

inline std::pair<double, double> expected_rate(const FiniteStateModel& model,
                                               const StatePolicy& policy, const Backlog& backlog) {
    if (policy.q.size() != model.size())
        throw DomainError("policy size does not match the model");
    double e1 = 0.0;
    double e2 = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (policy.q[i] == 0.0)
            continue;
        const RatePoint rp = cross_point(model.states()[i].caps, backlog);
        const double weight = policy.q[i] * success_probability(i, model);
        e1 += weight * rp.x;
        e2 += weight * rp.y;
    }
    return {e1, e2};
}

struct FiniteStateSimOptions {
    std::uint64_t slot_cap = 10'000'000;
    /// Re-select the assumed state and rates from the remaining backlog every
    /// slot instead of fixing both at t = 0.
    bool recompute_per_slot = false;
};

/// Time span of one random episode, with a fractional final slot.
///
/// Draws the actual state each slot. On success the backlog shrinks by the
/// assumed state's cross-point rates; the episode ends in the slot that can
/// clear what is left, counting only the fraction of that slot it needs.
inline double simulate_finite_state(const FiniteStateModel& model, const Backlog& backlog,
                                    const StatePolicy& policy, Engine& engine,
                                    const FiniteStateSimOptions& options = {}) {
    backlog.validate();
    if (policy.q.size() != model.size() || policy.selected >= model.size())
        throw DomainError("policy does not match the model");
    if (backlog.empty())
        return 0.0;

    constexpr double kFinishTolerance = 1e-12;
    std::discrete_distribution<std::size_t> draw(model.probs().begin(), model.probs().end());

    double rem1 = backlog.b1;
    double rem2 = backlog.b2;
    std::size_t assumed = policy.selected;
    RatePoint rate = cross_point(model.states()[assumed].caps, backlog);
    double span = 0.0;

    for (std::uint64_t slot = 0; slot < options.slot_cap; ++slot) {
        if (options.recompute_per_slot && slot > 0) {
            const Backlog now{rem1, rem2};
            assumed = optimal_policy(model, now).selected;
            rate = cross_point(model.states()[assumed].caps, now);
        }
        const std::size_t actual = draw(engine);
        if (!model.states()[assumed].dominated_by(model.states()[actual])) {
            span += 1.0;
            continue;
        }
        double needed = 0.0;  // fraction of this slot that clears the backlog
        if (rate.x > 0.0)
            needed = std::max(needed, rem1 / rate.x);
        if (rate.y > 0.0)
            needed = std::max(needed, rem2 / rate.y);
        if (needed <= 1.0 + kFinishTolerance) {
            return span + std::min(needed, 1.0);
        }
        rem1 = std::max(0.0, rem1 - rate.x);
        rem2 = std::max(0.0, rem2 - rate.y);
        span += 1.0;
    }
    throw GuardError("finite-state episode exceeded the slot cap");
}

/// Independent episodes with per-trial substreams derived from the seed.
inline std::vector<double> finite_state_trials(const FiniteStateModel& model,
                                               const Backlog& backlog, const StatePolicy& policy,
                                               std::size_t trials, std::uint64_t master_seed,
                                               const FiniteStateSimOptions& options = {}) {
    std::vector<double> spans;
    spans.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        Engine engine(derive_seed(master_seed, {t}));
        spans.push_back(simulate_finite_state(model, backlog, policy, engine, options));
    }
    return spans;
}

} // namespace twr
