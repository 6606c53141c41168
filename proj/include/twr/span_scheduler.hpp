#pragma once

/**
 * @file span_scheduler.hpp
 * @brief Minimum time span schedules for time-invariant links.
 *
 * A schedule splits continuous time into theta1 (relay forwards source 1's
 * data), theta2 (forwards source 2's data) and theta3 (coded exchange). The
 * delivery constraints theta1*r1 + theta3*r_nc == b1 and
 * theta2*r2 + theta3*r_nc == b2 leave theta3 as the single free variable,
 * and the span is affine in it with a negative slope. So coding as much as
 * the smaller backlog allows is optimal.
 *
 * Phase order is sources first, then the relay; the span itself does not
 * depend on the order because only one node transmits at a time.
 */

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "core_rates.hpp"

namespace twr {

struct Schedule {
    double theta1 = 0.0;
    double theta2 = 0.0;
    double theta3 = 0.0;
};

inline double time_span(const Schedule& s) { return s.theta1 + s.theta2 + s.theta3; }

/// Schedule with a given coded time; forwarding times follow from delivery,
/// clipped at zero. theta3 is clamped into its feasible interval.
inline Schedule schedule_for_coded_time(const LinkCapacities& caps, const Backlog& backlog,
                                        double theta3) {
    caps.validate();
    backlog.validate();
    const RateTriple r = forwarding_rates(caps);
    const double theta3_max = backlog.smaller() / r.r_nc;
    theta3 = std::clamp(theta3, 0.0, theta3_max);
    const double coded = theta3 * r.r_nc;
    return {std::max(0.0, (backlog.b1 - coded) / r.r1), std::max(0.0, (backlog.b2 - coded) / r.r2),
            theta3};
}

inline Schedule optimal_schedule(const LinkCapacities& caps, const Backlog& backlog) {
    caps.validate();
    backlog.validate();
    const RateTriple r = forwarding_rates(caps);
    const double shared = backlog.smaller();
    // Subtract the shared amount directly so the shorter side is exactly zero.
    return {(backlog.b1 - shared) / r.r1, (backlog.b2 - shared) / r.r2, shared / r.r_nc};
}

/// max(B)/c1 + max(B)/c2 + min(B)/min(c1,c2): the coded phase plus forwarding
/// the excess over two hops.
inline double closed_form_span(const LinkCapacities& caps, const Backlog& backlog) {
    caps.validate();
    backlog.validate();
    const double big = backlog.larger();
    return big / caps.c1 + big / caps.c2 + backlog.smaller() / std::min(caps.c1, caps.c2);
}

struct LpOracleResult {
    Schedule best;
    double best_span = 0.0;
    std::vector<double> grid_theta3;  // ascending, endpoints included
    std::vector<double> grid_span;
};

/// Brute-force solution of the span LP over its one free variable.
///
/// Evaluates the span at both ends of theta3's feasible interval and on a
/// uniform grid of `grid_points` samples, returning the smallest.
inline LpOracleResult lp_oracle(const LinkCapacities& caps, const Backlog& backlog,
                                std::size_t grid_points = 1001) {
    caps.validate();
    backlog.validate();
    const RateTriple r = forwarding_rates(caps);
    const double upper = backlog.smaller() / r.r_nc;

    LpOracleResult out;
    out.best_span = std::numeric_limits<double>::infinity();
    auto consider = [&](double theta3) {
        const Schedule s = schedule_for_coded_time(caps, backlog, theta3);
        const double span = time_span(s);
        if (span < out.best_span) {
            out.best_span = span;
            out.best = s;
        }
        return span;
    };

    consider(0.0);
    consider(upper);
    const std::size_t n = std::max<std::size_t>(grid_points, 2);
    out.grid_theta3.reserve(n);
    out.grid_span.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta3 =
            (i + 1 == n) ? upper : upper * static_cast<double>(i) / static_cast<double>(n - 1);
        out.grid_theta3.push_back(theta3);
        out.grid_span.push_back(consider(theta3));
    }
    return out;
}

} // namespace twr
