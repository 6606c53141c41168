#pragma once

/**
 * @file waterfill.hpp
 * @brief Relay power allocation over fading slots.
 *
 * Units: power in watts, noise as a density I (W/Hz) over bandwidth W, so a
 * slot with power gain g and power p has SNR g*p/(I*W). A slot of duration T
 * carries W*T*log2(1 + SNR) bits one way; a coded broadcast carries twice
 * that at the weaker link's gain. "Effective gain" below is h = g/(I*W) in
 * 1/W, so SNR = h*p.
 *
 * The budget P caps the sum of per-slot powers over the whole transmission.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace twr {

/// Relative slack when comparing delivered throughput against a demand.
inline constexpr double kDemandTolerance = 1e-12;

struct PowerConfig {
    double budget_w = 1e-4;        // P
    double noise_density = 1e-12;  // I, W/Hz
    double bandwidth_hz = 100e6;   // W
    double slot_duration_s = 1.0;  // T

    void validate() const {
        for (double v : {budget_w, noise_density, bandwidth_hz, slot_duration_s})
            if (!(v > 0.0) || !std::isfinite(v))
                throw DomainError("power configuration values must be finite and > 0");
    }
    double noise_power() const { return noise_density * bandwidth_hz; }
    double bits_per_unit_log() const { return bandwidth_hz * slot_duration_s; }
    double effective_gain(double g) const { return g / noise_power(); }
};

struct FadingConfig {
    double mean_gain_1 = 1.0;
    double mean_gain_2 = 1.0;
    std::uint64_t seed = 1;
    /// Gains fixed at their means every slot.
    bool deterministic = false;

    void validate() const {
        if (!(mean_gain_1 > 0.0) || !(mean_gain_2 > 0.0))
            throw DomainError("mean channel gains must be > 0");
    }
    double mean_gain(int link) const { return link == 1 ? mean_gain_1 : mean_gain_2; }
    /// E[min(g1, g2)]; for independent exponentials the min is exponential
    /// with rate 1/mu1 + 1/mu2.
    double mean_min_gain() const {
        if (deterministic)
            return std::min(mean_gain_1, mean_gain_2);
        return 1.0 / (1.0 / mean_gain_1 + 1.0 / mean_gain_2);
    }
    double mean_max_gain() const {
        if (deterministic)
            return std::max(mean_gain_1, mean_gain_2);
        return mean_gain_1 + mean_gain_2 - mean_min_gain();
    }
};

struct SlotGains {
    double g1 = 1.0;
    double g2 = 1.0;

    double weaker() const { return std::min(g1, g2); }
    double stronger() const { return std::max(g1, g2); }
    double link(int i) const { return i == 1 ? g1 : g2; }
};

inline SlotGains draw_slot_gains(const FadingConfig& fading, Engine& engine) {
    if (fading.deterministic)
        return {fading.mean_gain_1, fading.mean_gain_2};
    std::exponential_distribution<double> d1(1.0 / fading.mean_gain_1);
    std::exponential_distribution<double> d2(1.0 / fading.mean_gain_2);
    const double g1 = d1(engine);
    return {g1, d2(engine)};
}

/// factor * W*T*log2(1 + h*p); factor is 2 for a coded broadcast, 1 for forwarding.
inline double slot_throughput(double h, double p, double factor, const PowerConfig& cfg) {
    if (p <= 0.0)
        return 0.0;
    return factor * cfg.bits_per_unit_log() * std::log2(1.0 + h * p);
}

/// Power that makes slot_throughput(h, p, factor) equal `data`.
inline double power_for_throughput(double h, double data, double factor, const PowerConfig& cfg) {
    if (data <= 0.0)
        return 0.0;
    if (!(h > 0.0))
        return std::numeric_limits<double>::infinity();
    return std::expm1(data / (factor * cfg.bits_per_unit_log()) * std::log(2.0)) / h;
}

inline double nc_slot_throughput(double g1, double g2, double p, const PowerConfig& cfg) {
    return slot_throughput(cfg.effective_gain(std::min(g1, g2)), p, 2.0, cfg);
}

inline double fwd_slot_throughput(double g, double p, const PowerConfig& cfg) {
    return slot_throughput(cfg.effective_gain(g), p, 1.0, cfg);
}

struct PowerAllocation {
    std::vector<double> powers;
    double water_level = 0.0;
    std::size_t n_slots = 0;
};

/// p_k = max(0, nu - 1/h_k) with sum p_k == budget.
///
/// Sorts the inverse gains and grows the active set until the next channel's
/// floor lies at or above the level.
inline PowerAllocation waterfill(std::span<const double> gains, double budget) {
    if (gains.empty())
        throw DomainError("water filling needs at least one channel");
    if (!(budget >= 0.0) || !std::isfinite(budget))
        throw DomainError("power budget must be finite and >= 0");
    std::vector<double> floors;
    floors.reserve(gains.size());
    for (double h : gains) {
        if (!(h > 0.0) || !std::isfinite(h))
            throw DomainError("channel gains must be finite and > 0");
        floors.push_back(1.0 / h);
    }
    std::sort(floors.begin(), floors.end());

    double level = floors.front() + budget;
    double prefix = 0.0;
    for (std::size_t k = 1; k <= floors.size(); ++k) {
        prefix += floors[k - 1];
        level = (budget + prefix) / static_cast<double>(k);
        if (k == floors.size() || level <= floors[k])
            break;
    }

    PowerAllocation out;
    out.water_level = level;
    out.n_slots = gains.size();
    out.powers.reserve(gains.size());
    for (double h : gains)
        out.powers.push_back(std::max(0.0, level - 1.0 / h));
    return out;
}

inline double allocation_throughput(std::span<const double> gains, const PowerAllocation& alloc,
                                    double factor, const PowerConfig& cfg) {
    double total = 0.0;
    for (std::size_t k = 0; k < gains.size(); ++k)
        total += slot_throughput(gains[k], alloc.powers[k], factor, cfg);
    return total;
}

/// Outcome of a minimum-horizon search for the current slot.
struct SlotPlan {
    double power = 0.0;        // for the current slot
    double water_level = 0.0;
    std::uint64_t horizon = 0; // slots in the plan, current one included
    bool feasible = false;
};

/// Smallest horizon n such that water filling `budget` over slots 0..n-1 with
/// known effective gains delivers `demand`.
///
/// Slot 0 is the current slot; its contribution counts at most `current_cap`
/// (what the current mode can still deliver). Horizons are tried in order
/// n = 1, 2, ... up to `max_slots`.
template <class GainAt>
SlotPlan plan_noncausal(GainAt&& gain_at, double demand, double budget, double factor,
                        double current_cap, const PowerConfig& cfg, std::size_t max_slots) {
    SlotPlan plan;
    if (demand <= 0.0) {
        plan.feasible = true;
        return plan;
    }
    std::vector<double> gains;
    for (std::size_t n = 1; n <= max_slots; ++n) {
        gains.push_back(gain_at(n - 1));
        const PowerAllocation alloc = waterfill(gains, budget);
        double useful = std::min(slot_throughput(gains[0], alloc.powers[0], factor, cfg), current_cap);
        for (std::size_t k = 1; k < n; ++k)
            useful += slot_throughput(gains[k], alloc.powers[k], factor, cfg);
        if (useful >= demand * (1.0 - kDemandTolerance)) {
            plan.power = alloc.powers[0];
            plan.water_level = alloc.water_level;
            plan.horizon = n;
            plan.feasible = true;
            return plan;
        }
    }
    return plan;
}

struct NoncausalResult {
    std::size_t n_slots = 0;
    PowerAllocation allocation;
};

/// Fewest slots whose coded throughput can flush `data`, knowing all future
/// gains: water-fill the whole budget over slots 1..N for N = 1, 2, ...
inline NoncausalResult noncausal_min_slots(std::span<const SlotGains> gains, double data,
                                           const PowerConfig& cfg) {
    cfg.validate();
    if (!(data >= 0.0))
        throw DomainError("data size must be >= 0");
    NoncausalResult out;
    if (data == 0.0)
        return out;
    auto gain_at = [&](std::size_t k) { return cfg.effective_gain(gains[k].weaker()); };
    const SlotPlan plan = plan_noncausal(gain_at, data, cfg.budget_w, 2.0,
                                         std::numeric_limits<double>::infinity(), cfg, gains.size());
    if (!plan.feasible)
        throw GuardError("no horizon within the available gain sequence flushes the data");
    out.n_slots = plan.horizon;
    std::vector<double> h(plan.horizon);
    for (std::size_t k = 0; k < plan.horizon; ++k)
        h[k] = gain_at(k);
    out.allocation = waterfill(h, cfg.budget_w);
    return out;
}

struct TwoLevelFill {
    double current = 0.0;     // power of the current slot
    double each_future = 0.0; // power of each virtual slot
    double water_level = 0.0;
};

/// Water filling over one current slot plus `n_future` identical slots, in
/// closed form.
inline TwoLevelFill waterfill_current_and_future(double h_current, double h_future,
                                                 std::uint64_t n_future, double budget) {
    const double fc = 1.0 / h_current;
    if (n_future == 0)
        return {budget, 0.0, fc + budget};
    const double ff = 1.0 / h_future;
    const double n = static_cast<double>(n_future);
    const double level = (budget + fc + n * ff) / (n + 1.0);
    if (level > std::max(fc, ff))
        return {level - fc, level - ff, level};
    if (fc < ff)
        return {budget, 0.0, fc + budget};
    return {0.0, budget / n, ff + budget / n};
}

/// Current-slot power from the virtual-horizon heuristic.
///
/// Future slots are assumed to have the mean effective gain `h_future`. Tries
/// 0, 1, 2, ... virtual future slots and stops at the first count whose water
/// filling delivers `demand`. When even infinitely many future slots cannot
/// deliver it, returns the infinite-horizon limit (level 1/h_future) with
/// feasible == false.
inline SlotPlan plan_causal(double h_current, double h_future, double demand, double budget,
                            double factor, double current_cap, const PowerConfig& cfg,
                            std::uint64_t max_virtual = std::uint64_t{1} << 24) {
    SlotPlan plan;
    if (demand <= 0.0) {
        plan.feasible = true;
        return plan;
    }
    const double target = demand * (1.0 - kDemandTolerance);
    auto useful = [&](std::uint64_t n) {
        const TwoLevelFill f = waterfill_current_and_future(h_current, h_future, n, budget);
        return std::min(slot_throughput(h_current, f.current, factor, cfg), current_cap) +
               static_cast<double>(n) * slot_throughput(h_future, f.each_future, factor, cfg);
    };
    auto finish = [&](std::uint64_t n) {
        const TwoLevelFill f = waterfill_current_and_future(h_current, h_future, n, budget);
        plan.power = f.current;
        plan.water_level = f.water_level;
        plan.horizon = n + 1;
        plan.feasible = true;
        return plan;
    };

    if (useful(0) >= target)
        return finish(0);

    // Limit of infinitely many future slots: level -> 1/h_future and the
    // future slots run in the linear regime.
    const double limit_power = std::clamp(1.0 / h_future - 1.0 / h_current, 0.0, budget);
    const double supremum =
        std::min(slot_throughput(h_current, limit_power, factor, cfg), current_cap) +
        factor * cfg.bits_per_unit_log() * h_future * (budget - limit_power) / std::log(2.0);
    auto infeasible = [&] {
        plan.power = limit_power;
        plan.water_level = limit_power < budget ? 1.0 / h_future : 1.0 / h_current + budget;
        plan.horizon = 0;
        plan.feasible = false;
        return plan;
    };
    if (supremum < target)
        return infeasible();

    // Useful throughput is nondecreasing in the number of future slots.
    std::uint64_t lo = 0;
    std::uint64_t hi = 1;
    while (useful(hi) < target) {
        lo = hi;
        if (hi > max_virtual / 2)
            return infeasible();
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (useful(mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return finish(hi);
}

/// Power for the current slot of a coded flush under causal knowledge.
inline double causal_allocate_slot(const SlotGains& current, double remaining_data,
                                   double remaining_budget, const FadingConfig& fading,
                                   const PowerConfig& cfg,
                                   std::uint64_t max_virtual = std::uint64_t{1} << 24) {
    if (!(remaining_data > 0.0) || !(remaining_budget > 0.0))
        throw DomainError("causal allocation needs remaining data and budget > 0");
    const SlotPlan plan = plan_causal(cfg.effective_gain(current.weaker()),
                                      cfg.effective_gain(fading.mean_min_gain()), remaining_data,
                                      remaining_budget, 2.0,
                                      std::numeric_limits<double>::infinity(), cfg, max_virtual);
    if (!plan.feasible)
        throw GuardError("no virtual horizon delivers the remaining data");
    return plan.power;
}

struct CausalEpisode {
    std::size_t n_slots = 0;
    std::vector<double> powers;
};

/// Coded flush of `data` slot by slot with causal allocation, spending the
/// budget as it goes. Stops once the remaining data is gone.
inline CausalEpisode causal_episode(std::span<const SlotGains> gains, double data,
                                    const FadingConfig& fading, const PowerConfig& cfg) {
    cfg.validate();
    CausalEpisode out;
    double remaining = data;
    double budget = cfg.budget_w;
    const double done_below = data * kDemandTolerance;
    for (std::size_t k = 0; k < gains.size(); ++k) {
        if (remaining <= done_below)
            return out;
        const double p = causal_allocate_slot(gains[k], remaining, budget, fading, cfg);
        out.powers.push_back(p);
        out.n_slots = k + 1;
        remaining -= nc_slot_throughput(gains[k].g1, gains[k].g2, p, cfg);
        budget = std::max(0.0, budget - p);
    }
    if (remaining <= done_below)
        return out;
    throw GuardError("gain sequence exhausted before the data was flushed");
}

} // namespace twr
