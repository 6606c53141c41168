#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <twr/relay.hpp>

using namespace twr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kMB = 8e6;

PowerConfig power_dbm(double dbm) {
    PowerConfig p;
    p.budget_w = std::pow(10.0, (dbm - 30.0) / 10.0);
    return p;
}

RelayOutcome run(Strategy s, RelayBuffers b, const FadingConfig& f, const PowerConfig& p,
                 Knowledge k, std::uint64_t seed, std::vector<TraceRow>* trace = nullptr) {
    Engine e(seed);
    return run_relay(s, b, f, p, k, e, trace);
}

/// Coded flush of `data` on a flat channel: fewest N equal slots that carry
/// it, and the span counts the last slot fractionally.
double flat_coded_span(double data, double h, const PowerConfig& p) {
    for (int n = 1;; ++n) {
        const double per_slot = 2.0 * p.bits_per_unit_log() * std::log2(1.0 + h * p.budget_w / n);
        if (n * per_slot >= data * (1.0 - 1e-12))
            return data / per_slot;
    }
}

} // namespace

TEST_CASE("names round-trip") {
    for (Strategy s : kAllStrategies)
        CHECK(parse_strategy(to_string(s)) == s);
    CHECK(parse_knowledge("causal") == Knowledge::Causal);
    CHECK(parse_knowledge("noncausal") == Knowledge::Noncausal);
    CHECK_FALSE(parse_strategy("nc").has_value());
    CHECK_FALSE(parse_knowledge("oracle").has_value());
}

TEST_CASE("empty buffers take no time") {
    std::vector<TraceRow> trace;
    const RelayOutcome o = run(Strategy::NcOnly, {0, 0}, {}, power_dbm(-5), Knowledge::Causal, 1, &trace);
    CHECK(o.span == 0.0);
    CHECK(o.slots_used == 0);
    CHECK(trace.empty());
    CHECK_THROWS_AS(run(Strategy::NcOnly, {-1, 0}, {}, power_dbm(-5), Knowledge::Causal, 1), DomainError);
}

TEST_CASE("one-sided data reduces every strategy to forwarding") {
    for (Knowledge k : {Knowledge::Causal, Knowledge::Noncausal})
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const RelayBuffers b{0, 12 * kMB};
            const double ref = run(Strategy::OneDirectional, b, {}, power_dbm(-6), k, seed).span;
            for (Strategy s : kAllStrategies)
                REQUIRE(run(s, b, {}, power_dbm(-6), k, seed).span == ref);
        }
}

TEST_CASE("equal data on a flat channel: coding strategies coincide with the closed form") {
    FadingConfig f;
    f.deterministic = true;
    for (double dbm : {-10.0, -7.0, -4.0, 0.0})
        for (double mb : {2.0, 8.5, 20.0}) {
            const PowerConfig p = power_dbm(dbm);
            const double limit =
                2.0 * p.bits_per_unit_log() * p.effective_gain(1.0) * p.budget_w / std::log(2.0);
            if (2 * mb * kMB >= limit)
                continue;
            const RelayBuffers b{mb * kMB, mb * kMB};
            const double expected = flat_coded_span(2 * mb * kMB, p.effective_gain(1.0), p);
            for (Knowledge k : {Knowledge::Causal, Knowledge::Noncausal}) {
                const double nc = run(Strategy::NcOnly, b, f, p, k, 1).span;
                CHECK_THAT(nc, WithinRel(expected, 1e-9));
                CHECK(run(Strategy::NcFirst, b, f, p, k, 1).span == nc);
                CHECK(run(Strategy::Opportunistic, b, f, p, k, 1).span == nc);
            }
        }
}

TEST_CASE("flat channel with unequal links: coding at the weaker gain against forwarding") {
    FadingConfig f;
    f.deterministic = true;
    f.mean_gain_1 = 1.0;
    f.mean_gain_2 = 0.3;
    const PowerConfig p = power_dbm(-3);
    const RelayBuffers b{5 * kMB, 5 * kMB};
    std::vector<TraceRow> trace;
    const RelayOutcome nc = run(Strategy::NcOnly, b, f, p, Knowledge::Noncausal, 1, &trace);
    for (const TraceRow& r : trace)
        CHECK(r.mode == Mode::Coded);
    CHECK_THAT(nc.span, WithinRel(flat_coded_span(10 * kMB, p.effective_gain(0.3), p), 1e-9));
    const RelayOutcome opp = run(Strategy::Opportunistic, b, f, p, Knowledge::Noncausal, 1);
    CHECK(opp.span <= nc.span * (1.0 + 1e-12));
}

TEST_CASE("data is conserved and the budget respected") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> mb(0.0, 12.0);
    std::uniform_real_distribution<double> dbm(-6.0, 0.0);
    for (int i = 0; i < 200; ++i) {
        const Strategy s = kAllStrategies[i % 4];
        const Knowledge k = i % 3 == 0 ? Knowledge::Noncausal : Knowledge::Causal;
        const RelayBuffers b{mb(rng) * kMB, mb(rng) * kMB};
        const PowerConfig p = power_dbm(dbm(rng));
        std::vector<TraceRow> trace;
        RelayOutcome o;
        try {
            o = run(s, b, {}, p, k, 1000 + i, &trace);
        } catch (const GuardError&) {
            continue;
        }
        REQUIRE_THAT(o.delivered, WithinRel(b.total(), 1e-9));
        double traced = 0.0, energy = 0.0;
        for (const TraceRow& r : trace) {
            traced += r.delivered;
            energy += r.power;
            REQUIRE(r.power >= 0.0);
        }
        REQUIRE_THAT(traced, WithinRel(b.total(), 1e-9));
        REQUIRE(energy <= p.budget_w * (1.0 + 1e-12));
        REQUIRE(trace.size() == o.slots_used);
        REQUIRE(o.span <= double(o.slots_used));
        REQUIRE(o.span > double(o.slots_used) - 1.0);
        REQUIRE(trace.back().remaining.total() == 0.0);
    }
}

TEST_CASE("episodes are reproducible from the seed") {
    for (Strategy s : kAllStrategies) {
        std::vector<TraceRow> a, b;
        const RelayOutcome x = run(s, {4 * kMB, 7 * kMB}, {}, power_dbm(-5), Knowledge::Causal, 9, &a);
        const RelayOutcome y = run(s, {4 * kMB, 7 * kMB}, {}, power_dbm(-5), Knowledge::Causal, 9, &b);
        CHECK(x.span == y.span);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            CHECK((a[i].power == b[i].power && a[i].gains.g1 == b[i].gains.g1));
    }
}

TEST_CASE("flat channel trace has a flat water level") {
    FadingConfig f;
    f.deterministic = true;
    std::vector<TraceRow> trace;
    run(Strategy::NcOnly, {50 * kMB, 50 * kMB}, f, power_dbm(-5), Knowledge::Causal, 3, &trace);
    REQUIRE(trace.size() > 5);
    for (const TraceRow& r : trace) {
        CHECK_THAT(r.power, WithinRel(trace.front().power, 1e-9));
        CHECK_THAT(r.water_level, WithinRel(trace.front().water_level, 1e-9));
    }
}

TEST_CASE("causal power follows the weaker-link gain") {
    // pooled over episodes: correlation of min gain and power > 0
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    int n = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        std::vector<TraceRow> trace;
        run(Strategy::NcOnly, {30 * kMB, 30 * kMB}, {}, power_dbm(-5), Knowledge::Causal, seed, &trace);
        for (const TraceRow& r : trace) {
            const double x = r.gains.weaker(), y = r.power;
            sx += x, sy += y, sxx += x * x, syy += y * y, sxy += x * y;
            ++n;
        }
    }
    const double cov = sxy / n - sx / n * sy / n;
    const double corr = cov / std::sqrt((sxx / n - sx / n * sx / n) * (syy / n - sy / n * sy / n));
    CHECK(corr > 0.0);
}

TEST_CASE("guards stop hopeless episodes") {
    FadingConfig flat;
    flat.deterministic = true;
    CHECK_THROWS_AS(run(Strategy::NcOnly, {60 * kMB, 60 * kMB}, flat, power_dbm(-10), Knowledge::Causal, 1),
                    GuardError);
    CHECK_THROWS_AS(run(Strategy::NcOnly, {60 * kMB, 60 * kMB}, flat, power_dbm(-10), Knowledge::Noncausal, 1),
                    GuardError);
    CHECK_THROWS_AS(run(Strategy::NcOnly, {500 * kMB, 500 * kMB}, {}, power_dbm(-10), Knowledge::Causal, 1),
                    GuardError);
}

TEST_CASE("coding beats forwarding on average") {
    for (double dbm : {-8.0, -4.0, 0.0}) {
        double nc = 0, fwd = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            nc += run(Strategy::NcOnly, {8.5 * kMB, 8.5 * kMB}, {}, power_dbm(dbm), Knowledge::Causal, seed).span;
            fwd += run(Strategy::OneDirectional, {8.5 * kMB, 8.5 * kMB}, {}, power_dbm(dbm), Knowledge::Causal, seed).span;
        }
        CHECK(nc < fwd);
    }
}
