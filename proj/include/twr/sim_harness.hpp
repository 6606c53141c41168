#pragma once

/**
 * @file sim_harness.hpp
 * @brief Monte-Carlo sweeps of relay strategies over power budget or data ratio.
 *
 * Every (point, trial) pair gets its own substream seeded from
 * (master seed, point index, trial index). Strategies share that seed, so all
 * curves at a point see the same fading realisations. Results are stored by
 * index, which makes the output independent of the thread count.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "random.hpp"
#include "relay.hpp"
#include "waterfill.hpp"

namespace twr {

inline constexpr double kBitsPerMByte = 8e6;

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

enum class SweepKind { PowerBudget, DataRatio };

struct Curve {
    Strategy strategy = Strategy::NcOnly;
    Knowledge knowledge = Knowledge::Causal;
};

struct ExperimentConfig {
    std::vector<Strategy> strategies{Strategy::NcOnly, Strategy::Opportunistic,
                                     Strategy::OneDirectional};
    std::vector<Knowledge> knowledge{Knowledge::Causal, Knowledge::Noncausal};
    std::vector<double> budgets_dbm{-10, -9, -8, -7, -6, -5, -4, -3, -2, -1, 0};
    std::vector<double> ratios{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};  // b1 / b2
    double ratio_budget_dbm = -5.0;     // budget used by the ratio sweep
    double b1_bits = 8.5 * kBitsPerMByte;  // power sweep backlog
    double b2_bits = 8.5 * kBitsPerMByte;
    double total_bits = 17.0 * kBitsPerMByte;  // ratio sweep b1 + b2
    std::size_t trials = 200;
    std::uint64_t master_seed = 1;
    unsigned threads = 0;  // 0: hardware concurrency
    PowerConfig power;     // budget_w is overwritten per sweep point
    FadingConfig fading;
    RelayOptions relay;

    std::vector<Curve> curves() const {
        std::vector<Curve> out;
        for (Strategy s : strategies)
            for (Knowledge k : knowledge)
                out.push_back({s, k});
        return out;
    }

    void validate(SweepKind kind) const {
        if (trials < 1)
            throw ConfigError("trials must be >= 1");
        if (strategies.empty() || knowledge.empty())
            throw ConfigError("at least one strategy and one knowledge mode are required");
        if (kind == SweepKind::PowerBudget) {
            if (budgets_dbm.empty())
                throw ConfigError("budget sweep is empty");
            if (!(b1_bits >= 0.0) || !(b2_bits >= 0.0))
                throw ConfigError("backlogs must be >= 0");
        } else {
            if (ratios.empty())
                throw ConfigError("ratio sweep is empty");
            for (double r : ratios)
                if (!(r >= 0.0 && r <= 1.0))
                    throw ConfigError("data ratios must lie in [0, 1]");
            if (!(total_bits > 0.0))
                throw ConfigError("total data must be > 0");
        }
        PowerConfig probe = power;
        probe.budget_w = 1.0;
        probe.validate();
        fading.validate();
    }
};

struct SummaryRow {
    double sweep_value = 0.0;
    Strategy strategy = Strategy::NcOnly;
    Knowledge knowledge = Knowledge::Causal;
    double mean_span = 0.0;
    double stderr_ = 0.0;
    std::size_t trials = 0;
};

/// Calls fn(i) for i in [0, count) on `threads` workers. The first exception
/// thrown by any call is rethrown after all workers stop.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = count;
                }
            }
        });
    }
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

namespace detail {

struct SweepPoint {
    double value = 0.0;
    PowerConfig power;
    RelayBuffers buffers;
};

inline std::vector<SummaryRow> run_points(const ExperimentConfig& cfg,
                                          const std::vector<SweepPoint>& points) {
    const std::vector<Curve> curves = cfg.curves();
    const std::size_t per_point = curves.size() * cfg.trials;
    std::vector<double> spans(points.size() * per_point);

    parallel_for(spans.size(), cfg.threads, [&](std::size_t idx) {
        const std::size_t point = idx / per_point;
        const std::size_t curve = (idx % per_point) / cfg.trials;
        const std::size_t trial = idx % cfg.trials;
        Engine engine(derive_seed(cfg.master_seed, {point, trial}));
        spans[idx] = run_relay(curves[curve].strategy, points[point].buffers, cfg.fading,
                               points[point].power, curves[curve].knowledge, engine, nullptr,
                               cfg.relay)
                         .span;
    });

    std::vector<SummaryRow> rows;
    rows.reserve(points.size() * curves.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (std::size_t c = 0; c < curves.size(); ++c) {
            const auto first = spans.begin() + static_cast<std::ptrdiff_t>(p * per_point + c * cfg.trials);
            const SampleStats s = summarize(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(cfg.trials)));
            rows.push_back({points[p].value, curves[c].strategy, curves[c].knowledge, s.mean,
                            s.stderr_, s.count});
        }
    }
    return rows;
}

} // namespace detail

/// Mean span versus power budget at a fixed backlog.
inline std::vector<SummaryRow> power_sweep(const ExperimentConfig& cfg) {
    cfg.validate(SweepKind::PowerBudget);
    std::vector<detail::SweepPoint> points;
    for (double dbm : cfg.budgets_dbm) {
        PowerConfig p = cfg.power;
        p.budget_w = dbm_to_watts(dbm);
        points.push_back({dbm, p, {cfg.b2_bits, cfg.b1_bits}});
    }
    return detail::run_points(cfg, points);
}

/// Mean span versus b1/b2 at a fixed total and budget.
inline std::vector<SummaryRow> ratio_sweep(const ExperimentConfig& cfg) {
    cfg.validate(SweepKind::DataRatio);
    std::vector<detail::SweepPoint> points;
    PowerConfig p = cfg.power;
    p.budget_w = dbm_to_watts(cfg.ratio_budget_dbm);
    for (double r : cfg.ratios) {
        const double b1 = cfg.total_bits * r / (1.0 + r);
        const double b2 = cfg.total_bits - b1;
        points.push_back({r, p, {b2, b1}});
    }
    return detail::run_points(cfg, points);
}

inline constexpr const char* kSummaryCsvHeader =
    "sweep_value,strategy,knowledge,mean_span_slots,stderr,trials";

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << kSummaryCsvHeader << '\n';
    const auto old_flags = os.flags();
    const auto old_precision = os.precision();
    os << std::setprecision(12);
    for (const SummaryRow& r : rows)
        os << r.sweep_value << ',' << to_string(r.strategy) << ',' << to_string(r.knowledge) << ','
           << r.mean_span << ',' << r.stderr_ << ',' << r.trials << '\n';
    os.flags(old_flags);
    os.precision(old_precision);
}

inline void write_summary_table(std::ostream& os, const std::vector<SummaryRow>& rows,
                                const std::string& sweep_label) {
    const auto old_flags = os.flags();
    const auto old_precision = os.precision();
    os << std::left << std::setw(12) << sweep_label << std::setw(17) << "strategy" << std::setw(11)
       << "knowledge" << std::right << std::setw(12) << "mean span" << std::setw(10) << "stderr"
       << '\n';
    os << std::fixed << std::setprecision(4);
    for (const SummaryRow& r : rows)
        os << std::left << std::setw(12) << r.sweep_value << std::setw(17) << to_string(r.strategy)
           << std::setw(11) << to_string(r.knowledge) << std::right << std::setw(12) << r.mean_span
           << std::setw(10) << r.stderr_ << '\n';
    os.flags(old_flags);
    os.precision(old_precision);
}

} // namespace twr
