#pragma once

/**
 * @file cli.hpp
 * @brief Subcommands of the twr-sched tool, as plain functions over streams.
 *
 * Each command returns a process exit code. Configuration comes from a
 * ConfigFile; CommandOverrides carries command-line flags that win over it.
 * Data sizes of relay experiments are given in MBytes (10^6 bytes) and run
 * internally in bits.
 */

#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "core_rates.hpp"
#include "errors.hpp"
#include "finite_state.hpp"
#include "relay.hpp"
#include "sim_harness.hpp"
#include "span_scheduler.hpp"
#include "waterfill.hpp"

namespace twr::cli {

struct CommandOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::vector<double>> budgets_dbm;
    std::optional<std::vector<double>> ratios;
    std::optional<unsigned> threads;
};

/// Applies overrides onto the file, so file and flags share one code path.
inline ConfigFile merged(ConfigFile cfg, const CommandOverrides& o) {
    if (o.seed)
        cfg.set("seed", static_cast<std::int64_t>(*o.seed));
    if (o.trials)
        cfg.set("trials", static_cast<std::int64_t>(*o.trials));
    if (o.budgets_dbm)
        cfg.set("budgets_dbm", *o.budgets_dbm);
    if (o.ratios)
        cfg.set("ratios", *o.ratios);
    if (o.threads)
        cfg.set("threads", static_cast<std::int64_t>(*o.threads));
    return cfg;
}

namespace detail {

inline std::int64_t nonnegative(const ConfigFile& cfg, const std::string& key, std::int64_t fallback) {
    const std::int64_t v = cfg.get_or<std::int64_t>(key, fallback);
    if (v < 0)
        throw ConfigError("key '" + key + "' must be >= 0");
    return v;
}

inline Strategy strategy_named(const std::string& name) {
    if (auto s = parse_strategy(name))
        return *s;
    throw ConfigError("unknown strategy '" + name + "'");
}

inline Knowledge knowledge_named(const std::string& name) {
    if (auto k = parse_knowledge(name))
        return *k;
    throw ConfigError("unknown knowledge mode '" + name + "'");
}

inline PowerConfig power_from(const ConfigFile& cfg) {
    PowerConfig p;
    p.noise_density = cfg.get_or("noise_w_per_hz", p.noise_density);
    p.bandwidth_hz = cfg.get_or("bandwidth_hz", p.bandwidth_hz);
    p.slot_duration_s = cfg.get_or("slot_s", p.slot_duration_s);
    return p;
}

inline FadingConfig fading_from(const ConfigFile& cfg) {
    FadingConfig f;
    f.mean_gain_1 = cfg.get_or("mean_gain_1", f.mean_gain_1);
    f.mean_gain_2 = cfg.get_or("mean_gain_2", f.mean_gain_2);
    f.deterministic = cfg.get_or("deterministic", f.deterministic);
    f.seed = static_cast<std::uint64_t>(nonnegative(cfg, "seed", 1));
    return f;
}

} // namespace detail

/// Sweep settings from a config file; unset keys keep the defaults of
/// ExperimentConfig.
inline ExperimentConfig experiment_from(const ConfigFile& cfg) {
    ExperimentConfig e;
    e.master_seed = static_cast<std::uint64_t>(detail::nonnegative(cfg, "seed", 1));
    e.trials = static_cast<std::size_t>(detail::nonnegative(cfg, "trials", 200));
    e.threads = static_cast<unsigned>(detail::nonnegative(cfg, "threads", 0));
    if (cfg.has("strategies")) {
        e.strategies.clear();
        for (const std::string& s : cfg.get_or("strategies", std::vector<std::string>{}))
            e.strategies.push_back(detail::strategy_named(s));
    }
    if (cfg.has("knowledge")) {
        e.knowledge.clear();
        for (const std::string& k : cfg.get_or("knowledge", std::vector<std::string>{}))
            e.knowledge.push_back(detail::knowledge_named(k));
    }
    e.budgets_dbm = cfg.get_or("budgets_dbm", e.budgets_dbm);
    e.ratios = cfg.get_or("ratios", e.ratios);
    e.ratio_budget_dbm = cfg.get_or("budget_dbm", e.ratio_budget_dbm);
    e.b1_bits = cfg.get_or("b1_mbytes", e.b1_bits / kBitsPerMByte) * kBitsPerMByte;
    e.b2_bits = cfg.get_or("b2_mbytes", e.b2_bits / kBitsPerMByte) * kBitsPerMByte;
    e.total_bits = cfg.get_or("total_mbytes", e.total_bits / kBitsPerMByte) * kBitsPerMByte;
    e.power = detail::power_from(cfg);
    e.fading = detail::fading_from(cfg);
    return e;
}

inline int cmd_schedule(const LinkCapacities& caps, const Backlog& backlog, std::ostream& out) {
    const Schedule s = optimal_schedule(caps, backlog);
    const auto old_precision = out.precision();
    out << std::setprecision(12);
    out << "theta1 " << s.theta1 << '\n'
        << "theta2 " << s.theta2 << '\n'
        << "theta3 " << s.theta3 << '\n'
        << "span " << time_span(s) << '\n';
    out.precision(old_precision);
    return 0;
}

inline FiniteStateModel finite_state_model_from(const ConfigFile& cfg) {
    if (!cfg.has("levels") || !cfg.has("probs"))
        throw ConfigError("finite-state config needs 'levels' and 'probs'");
    try {
        return FiniteStateModel(RateLevels(cfg.get_or("levels", std::vector<double>{})),
                                cfg.get_or("probs", std::vector<double>{}));
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

/// Prints the alpha table as CSV and the selected state. With trials > 0
/// also simulates the selected policy and prints its mean span.
inline int cmd_finite_state(const ConfigFile& cfg, std::ostream& out) {
    const FiniteStateModel model = finite_state_model_from(cfg);
    const Backlog backlog{cfg.get_or("backlog_1", 1.0), cfg.get_or("backlog_2", 1.0)};
    try {
        backlog.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const AlphaVector alpha = alpha_coefficients(model, backlog);
    const StatePolicy policy = optimal_policy(model, backlog);

    const auto old_precision = out.precision();
    out << std::setprecision(12);
    out << "state,c1,c2,success_probability,alpha\n";
    for (std::size_t i = 0; i < model.size(); ++i) {
        const ChannelState& s = model.states()[i];
        out << i + 1 << ',' << s.caps.c1 << ',' << s.caps.c2 << ','
            << success_probability(i, model) << ',' << alpha.alphas[i] << '\n';
    }
    const ChannelState& chosen = model.states()[policy.selected];
    out << "selected " << policy.selected + 1 << " (" << chosen.caps.c1 << ',' << chosen.caps.c2
        << ")\n";

    const auto trials = static_cast<std::size_t>(detail::nonnegative(cfg, "trials", 0));
    if (trials > 0) {
        FiniteStateSimOptions opts;
        opts.recompute_per_slot = cfg.get_or("recompute_per_slot", false);
        const auto seed = static_cast<std::uint64_t>(detail::nonnegative(cfg, "seed", 1));
        const SampleStats s =
            summarize(finite_state_trials(model, backlog, policy, trials, seed, opts));
        out << "simulated_mean_span " << s.mean << " stderr " << s.stderr_ << " trials "
            << s.count << '\n';
    }
    out.precision(old_precision);
    return 0;
}

inline int cmd_power_sweep(const ConfigFile& cfg, std::ostream& csv, std::ostream& table) {
    const std::vector<SummaryRow> rows = power_sweep(experiment_from(cfg));
    write_summary_csv(csv, rows);
    write_summary_table(table, rows, "budget_dbm");
    return 0;
}

inline int cmd_ratio_sweep(const ConfigFile& cfg, std::ostream& csv, std::ostream& table) {
    const std::vector<SummaryRow> rows = ratio_sweep(experiment_from(cfg));
    write_summary_csv(csv, rows);
    write_summary_table(table, rows, "b1/b2");
    return 0;
}

inline constexpr const char* kTraceCsvHeader =
    "slot,g1,g2,mode,power_w,water_level_w,delivered_mbytes,toward_1_mbytes,toward_2_mbytes";

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& rows) {
    os << kTraceCsvHeader << '\n';
    const auto old_precision = os.precision();
    os << std::setprecision(12);
    for (const TraceRow& r : rows)
        os << r.slot + 1 << ',' << r.gains.g1 << ',' << r.gains.g2 << ',' << to_string(r.mode)
           << ',' << r.power << ',' << r.water_level << ',' << r.delivered / kBitsPerMByte << ','
           << r.remaining.toward_1 / kBitsPerMByte << ',' << r.remaining.toward_2 / kBitsPerMByte
           << '\n';
    os.precision(old_precision);
}

/// One seeded relay episode, one CSV row per slot.
inline int cmd_waterfill_trace(const ConfigFile& cfg, std::ostream& csv, std::ostream& log) {
    PowerConfig power = detail::power_from(cfg);
    power.budget_w = dbm_to_watts(cfg.get_or("budget_dbm", -6.0));
    const FadingConfig fading = detail::fading_from(cfg);
    const Strategy strategy = detail::strategy_named(cfg.get_or<std::string>("strategy", "nc-only"));
    const Knowledge knowledge =
        detail::knowledge_named(cfg.get_or<std::string>("knowledge_mode", "causal"));
    const double b1 = cfg.get_or("b1_mbytes", 7.5) * kBitsPerMByte;
    const double b2 = cfg.get_or("b2_mbytes", 7.5) * kBitsPerMByte;

    Engine engine(fading.seed);
    std::vector<TraceRow> rows;
    const RelayOutcome outcome =
        run_relay(strategy, {b2, b1}, fading, power, knowledge, engine, &rows);
    write_trace_csv(csv, rows);
    log << "slots " << outcome.slots_used << " span " << outcome.span << '\n';
    return 0;
}

} // namespace twr::cli
