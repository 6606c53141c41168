#pragma once

/**
 * @file relay.hpp
 * @brief Slot-by-slot relay episodes under Rayleigh fading.
 *
 * The relay already holds both sources' data: `toward_1` goes out over link
 * 1, `toward_2` over link 2. Each slot it picks one mode:
 *
 *   - coded broadcast: needs both buffers non-empty, runs at the weaker gain,
 *     takes half of its throughput from each buffer (at most the smaller one);
 *   - forward to 1 / forward to 2: one buffer, that link's gain.
 *
 * The slot power comes from the knowledge model's planner (causal virtual
 * horizon or noncausal look-ahead) for the chosen mode. A slot that cannot
 * clear everything spends no more power than its mode can use; the final
 * slot counts only the fraction of the slot it needs.
 */

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "waterfill.hpp"

namespace twr {

enum class Strategy { NcOnly, Opportunistic, NcFirst, OneDirectional };
enum class Knowledge { Causal, Noncausal };
enum class Mode { Coded, ForwardTo1, ForwardTo2 };

inline constexpr std::array<Strategy, 4> kAllStrategies{
    Strategy::NcOnly, Strategy::Opportunistic, Strategy::NcFirst, Strategy::OneDirectional};

inline std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::NcOnly: return "nc-only";
    case Strategy::Opportunistic: return "opportunistic";
    case Strategy::NcFirst: return "nc-first";
    case Strategy::OneDirectional: return "one-directional";
    }
    return "?";
}

inline std::string_view to_string(Knowledge k) {
    return k == Knowledge::Causal ? "causal" : "noncausal";
}

inline std::string_view to_string(Mode m) {
    switch (m) {
    case Mode::Coded: return "nc";
    case Mode::ForwardTo1: return "fwd1";
    case Mode::ForwardTo2: return "fwd2";
    }
    return "?";
}

inline std::optional<Strategy> parse_strategy(std::string_view name) {
    for (Strategy s : kAllStrategies)
        if (to_string(s) == name)
            return s;
    return std::nullopt;
}

inline std::optional<Knowledge> parse_knowledge(std::string_view name) {
    if (name == "causal")
        return Knowledge::Causal;
    if (name == "noncausal")
        return Knowledge::Noncausal;
    return std::nullopt;
}

struct RelayBuffers {
    double toward_1 = 0.0;  // received from source 2
    double toward_2 = 0.0;  // received from source 1

    double total() const { return toward_1 + toward_2; }
};

struct TraceRow {
    std::size_t slot = 0;
    SlotGains gains;
    Mode mode = Mode::Coded;
    double power = 0.0;
    double water_level = 0.0;
    double delivered = 0.0;
    RelayBuffers remaining;
};

struct RelayOptions {
    std::size_t slot_cap = 100'000;
    std::size_t noncausal_horizon_cap = 4096;
};

struct RelayOutcome {
    double span = 0.0;            // slots, fractional final slot
    std::size_t slots_used = 0;   // including the final one
    double delivered = 0.0;
    double energy = 0.0;          // sum of committed slot powers
};

/// Gains drawn lazily in slot order, so look-ahead never changes the values a
/// later slot sees.
class GainTape {
public:
    GainTape(const FadingConfig& fading, Engine& engine) : fading_(fading), engine_(engine) {}

    const SlotGains& at(std::size_t k) {
        while (tape_.size() <= k)
            tape_.push_back(draw_slot_gains(fading_, engine_));
        return tape_[k];
    }

private:
    const FadingConfig& fading_;
    Engine& engine_;
    std::vector<SlotGains> tape_;
};

namespace detail {

inline int link_of(Mode m) { return m == Mode::ForwardTo1 ? 1 : 2; }

struct ModeChoice {
    Mode mode = Mode::Coded;
    double power = 0.0;
    double water_level = 0.0;
    double throughput = 0.0;
    double h = 0.0;
    double factor = 1.0;
    bool final_slot = false;
    bool usable = true;  // false when the planner found no horizon for this mode
};

class RelayEpisode {
public:
    RelayEpisode(Strategy strategy, Knowledge knowledge, const FadingConfig& fading,
                 const PowerConfig& cfg, GainTape& tape, const RelayOptions& options)
        : strategy_(strategy), knowledge_(knowledge), fading_(fading), cfg_(cfg), tape_(tape),
          options_(options) {}

    ModeChoice plan(Mode mode, std::size_t slot, const RelayBuffers& buf, double budget) {
        const SlotGains& g = tape_.at(slot);
        const bool both = buf.toward_1 > 0.0 && buf.toward_2 > 0.0;
        ModeChoice c;
        c.mode = mode;
        double cap = 0.0;
        double h_future_mean = 0.0;
        int future_link = 0;  // 0: weaker of both, -1: stronger of both, else that link
        if (mode == Mode::Coded) {
            c.factor = 2.0;
            c.h = cfg_.effective_gain(g.weaker());
            cap = 2.0 * std::min(buf.toward_1, buf.toward_2);
            h_future_mean = cfg_.effective_gain(fading_.mean_min_gain());
        } else {
            const int link = link_of(mode);
            c.factor = 1.0;
            c.h = cfg_.effective_gain(g.link(link));
            cap = link == 1 ? buf.toward_1 : buf.toward_2;
            if (strategy_ == Strategy::OneDirectional && both) {
                future_link = -1;
                h_future_mean = cfg_.effective_gain(fading_.mean_max_gain());
            } else {
                future_link = link;
                h_future_mean = cfg_.effective_gain(fading_.mean_gain(link));
            }
        }
        const double demand = buf.total();
        c.final_slot = cap >= demand * (1.0 - kDemandTolerance);

        SlotPlan sp;
        if (knowledge_ == Knowledge::Causal) {
            sp = plan_causal(c.h, h_future_mean, demand, budget, c.factor, cap, cfg_);
            // On a random channel the infinite-horizon fallback is still a
            // sensible power; on a fixed one the data can never be delivered.
            c.usable = sp.feasible || !fading_.deterministic;
        } else {
            auto gain_at = [&](std::size_t k) {
                if (k == 0)
                    return c.h;
                const SlotGains& f = tape_.at(slot + k);
                if (future_link == 0)
                    return cfg_.effective_gain(f.weaker());
                if (future_link == -1)
                    return cfg_.effective_gain(f.stronger());
                return cfg_.effective_gain(f.link(future_link));
            };
            sp = plan_noncausal(gain_at, demand, budget, c.factor, cap, cfg_,
                                options_.noncausal_horizon_cap);
            c.usable = sp.feasible;
        }
        c.power = sp.power;
        c.water_level = sp.water_level;
        if (!c.final_slot)
            c.power = std::min(c.power, power_for_throughput(c.h, cap, c.factor, cfg_));
        c.throughput = slot_throughput(c.h, c.power, c.factor, cfg_);
        return c;
    }

    std::vector<Mode> candidates(const SlotGains& g, const RelayBuffers& buf) const {
        const bool has1 = buf.toward_1 > 0.0;
        const bool has2 = buf.toward_2 > 0.0;
        auto forward_only = [&]() -> std::vector<Mode> {
            if (has1 && has2)
                return {g.g1 >= g.g2 ? Mode::ForwardTo1 : Mode::ForwardTo2};
            return {has1 ? Mode::ForwardTo1 : Mode::ForwardTo2};
        };
        switch (strategy_) {
        case Strategy::NcOnly:
        case Strategy::NcFirst:
            if (has1 && has2)
                return {Mode::Coded};
            return forward_only();
        case Strategy::OneDirectional:
            return forward_only();
        case Strategy::Opportunistic: {
            std::vector<Mode> out;
            if (has1 && has2)
                out.push_back(Mode::Coded);
            if (has1)
                out.push_back(Mode::ForwardTo1);
            if (has2)
                out.push_back(Mode::ForwardTo2);
            return out;
        }
        }
        return {};
    }

private:
    Strategy strategy_;
    Knowledge knowledge_;
    const FadingConfig& fading_;
    const PowerConfig& cfg_;
    GainTape& tape_;
    const RelayOptions& options_;
};

} // namespace detail

/// Runs one episode until both buffers are empty and returns its span.
///
/// Strategies:
///   - NcOnly / NcFirst: code whenever both buffers hold data, otherwise
///     forward what is left;
///   - Opportunistic: plan every available mode and take the one with the
///     largest slot throughput;
///   - OneDirectional: never code; forward over the stronger link among
///     those with pending data.
/// Appends one row per slot to `trace` when given.
inline RelayOutcome run_relay(Strategy strategy, RelayBuffers buffers, const FadingConfig& fading,
                              const PowerConfig& cfg, Knowledge knowledge, Engine& engine,
                              std::vector<TraceRow>* trace = nullptr,
                              const RelayOptions& options = {}) {
    cfg.validate();
    fading.validate();
    if (!(buffers.toward_1 >= 0.0) || !(buffers.toward_2 >= 0.0))
        throw DomainError("relay buffers must be >= 0");

    RelayOutcome out;
    const double initial = buffers.total();
    if (initial == 0.0)
        return out;
    const double snap = initial * kDemandTolerance;

    GainTape tape(fading, engine);
    detail::RelayEpisode episode(strategy, knowledge, fading, cfg, tape, options);
    double budget = cfg.budget_w;

    for (std::size_t slot = 0; slot < options.slot_cap; ++slot) {
        const SlotGains& g = tape.at(slot);
        std::optional<detail::ModeChoice> best;
        for (Mode m : episode.candidates(g, buffers)) {
            detail::ModeChoice c = episode.plan(m, slot, buffers, budget);
            if (c.usable && (!best || c.throughput > best->throughput))
                best = c;
        }
        if (!best)
            throw GuardError(knowledge == Knowledge::Noncausal
                                 ? "noncausal planner found no horizon within its cap"
                                 : "budget cannot deliver the data on a fixed channel");
        const detail::ModeChoice& c = *best;

        const double remaining = buffers.total();
        if (c.final_slot && c.throughput >= remaining * (1.0 - kDemandTolerance) && c.throughput > 0.0) {
            out.span = static_cast<double>(slot) + std::min(1.0, remaining / c.throughput);
            out.slots_used = slot + 1;
            out.delivered += remaining;
            out.energy += c.power;
            if (trace)
                trace->push_back({slot, g, c.mode, c.power, c.water_level, remaining, {}});
            return out;
        }

        double delivered = 0.0;
        if (c.mode == Mode::Coded) {
            const double each =
                std::min({c.throughput / 2.0, buffers.toward_1, buffers.toward_2});
            buffers.toward_1 -= each;
            buffers.toward_2 -= each;
            delivered = 2.0 * each;
        } else if (c.mode == Mode::ForwardTo1) {
            delivered = std::min(c.throughput, buffers.toward_1);
            buffers.toward_1 -= delivered;
        } else {
            delivered = std::min(c.throughput, buffers.toward_2);
            buffers.toward_2 -= delivered;
        }
        // Round-off residue left by a power sized to drain a buffer exactly.
        for (double* b : {&buffers.toward_1, &buffers.toward_2}) {
            if (*b <= snap) {
                delivered += *b;
                *b = 0.0;
            }
        }
        out.delivered += delivered;
        out.energy += c.power;
        budget = std::max(0.0, budget - c.power);
        if (trace)
            trace->push_back({slot, g, c.mode, c.power, c.water_level, delivered, buffers});

        if (buffers.total() == 0.0) {
            out.span = static_cast<double>(slot + 1);
            out.slots_used = slot + 1;
            return out;
        }
        if (budget <= 0.0)
            throw GuardError("power budget exhausted with data still queued");
    }
    throw GuardError("relay episode exceeded the slot cap");
}

} // namespace twr
