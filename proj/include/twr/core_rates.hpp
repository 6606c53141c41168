#pragma once

/**
 * @file core_rates.hpp
 * @brief Rates and rate-region geometry of a two-way relay link pair.
 *
 * Link i carries at most c_i data units per slot in either direction. A relay
 * that forwards one source's data uncoded reaches the one-directional rate
 * r = (1/c1 + 1/c2)^-1 (two hops in sequence). The three-phase coded exchange
 * (source 1 -> relay, source 2 -> relay, coded broadcast) reaches r_nc in
 * both directions at once, where the broadcast runs at the weaker link rate.
 *
 * The per-slot rate region is the polygon (0,0), a=(0,r), b=(r_nc,r_nc),
 * c=(r,0). x counts data of source 1 (delivered toward source 2), y counts
 * data of source 2.
 */

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace twr {

struct LinkCapacities {
    double c1 = 1.0;
    double c2 = 1.0;

    void validate() const {
        if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
            throw DomainError("link capacities must be finite and > 0");
    }
    LinkCapacities scaled(double factor) const { return {c1 * factor, c2 * factor}; }
};

struct Backlog {
    double b1 = 0.0;  // remaining at source 1
    double b2 = 0.0;  // remaining at source 2

    void validate() const {
        if (!(b1 >= 0.0) || !(b2 >= 0.0) || !std::isfinite(b1) || !std::isfinite(b2))
            throw DomainError("backlogs must be finite and >= 0");
    }
    double total() const { return b1 + b2; }
    double smaller() const { return std::min(b1, b2); }
    double larger() const { return std::max(b1, b2); }
    bool empty() const { return b1 == 0.0 && b2 == 0.0; }
};

struct RateTriple {
    double r1 = 0.0;
    double r2 = 0.0;
    double r_nc = 0.0;
};

struct RatePoint {
    double x = 0.0;
    double y = 0.0;
};

struct RegionVertices {
    RatePoint a;  // (0, r2)
    RatePoint b;  // (r_nc, r_nc)
    RatePoint c;  // (r1, 0)
};

inline RateTriple forwarding_rates(const LinkCapacities& caps) {
    caps.validate();
    const double inv_sum = 1.0 / caps.c1 + 1.0 / caps.c2;
    const double forward = 1.0 / inv_sum;  // computed once so r1 == r2 exactly
    const double coded = 1.0 / (inv_sum + 1.0 / std::min(caps.c1, caps.c2));
    return {forward, forward, coded};
}

inline RegionVertices region_vertices(const LinkCapacities& caps) {
    const RateTriple r = forwarding_rates(caps);
    return {{0.0, r.r2}, {r.r_nc, r.r_nc}, {r.r1, 0.0}};
}

/// Intersection of the ray through (b1, b2) with the outer boundary a-b-c.
///
/// This is the per-slot rate pair that drains both backlogs at the same time
/// (time sharing between coded exchange and one-directional forwarding).
inline RatePoint cross_point(const LinkCapacities& caps, const Backlog& backlog) {
    backlog.validate();
    if (backlog.empty())
        throw DegenerateInputError("cross point undefined for an empty backlog");
    const RateTriple r = forwarding_rates(caps);
    if (backlog.b2 == 0.0)
        return {r.r1, 0.0};
    if (backlog.b1 == 0.0)
        return {0.0, r.r2};
    if (backlog.b1 == backlog.b2)
        return {r.r_nc, r.r_nc};

    // Boundary segment from b to the axis vertex on the larger backlog's side:
    // points (t*b1, t*b2) with t = r*r_nc / (min*(r - r_nc) + max*r_nc).
    const double t = r.r1 * r.r_nc /
        (backlog.smaller() * (r.r1 - r.r_nc) + backlog.larger() * r.r_nc);
    return {t * backlog.b1, t * backlog.b2};
}

} // namespace twr
