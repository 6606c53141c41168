#include <catch_amalgamated.hpp>

#include <atomic>
#include <sstream>

#include <twr/sim_harness.hpp>

using namespace twr;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ExperimentConfig small_power_sweep(std::size_t trials = 40) {
    ExperimentConfig cfg;
    cfg.budgets_dbm = {-8, -4, 0};
    cfg.trials = trials;
    cfg.master_seed = 5;
    return cfg;
}

} // namespace

TEST_CASE("dBm conversion") {
    CHECK_THAT(dbm_to_watts(30.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(dbm_to_watts(0.0), WithinRel(1e-3, 1e-15));
    CHECK_THAT(dbm_to_watts(-10.0), WithinRel(1e-4, 1e-15));
    CHECK_THAT(dbm_to_watts(-5.0), WithinRel(std::pow(10.0, -3.5), 1e-15));
}

TEST_CASE("default experiment matches the stated setup") {
    const ExperimentConfig cfg;
    CHECK(cfg.trials == 200);
    CHECK(cfg.budgets_dbm.front() == -10.0);
    CHECK(cfg.budgets_dbm.back() == 0.0);
    CHECK(cfg.budgets_dbm.size() == 11);
    CHECK(cfg.b1_bits == 8.5 * 8e6);
    CHECK(cfg.b2_bits == 8.5 * 8e6);
    CHECK(cfg.total_bits == 17 * 8e6);
    CHECK(cfg.power.bandwidth_hz == 1e8);
    CHECK(cfg.power.noise_density == 1e-12);
    CHECK(cfg.curves().size() == 6);
}

TEST_CASE("config validation") {
    ExperimentConfig cfg = small_power_sweep();
    cfg.trials = 0;
    CHECK_THROWS_AS(power_sweep(cfg), ConfigError);
    cfg = small_power_sweep();
    cfg.budgets_dbm.clear();
    CHECK_THROWS_AS(power_sweep(cfg), ConfigError);
    cfg = small_power_sweep();
    cfg.ratios = {0.5, 1.5};
    CHECK_THROWS_AS(ratio_sweep(cfg), ConfigError);
    cfg = small_power_sweep();
    cfg.strategies.clear();
    CHECK_THROWS_AS(power_sweep(cfg), ConfigError);
    cfg = small_power_sweep();
    cfg.power.bandwidth_hz = -1;
    CHECK_THROWS_AS(power_sweep(cfg), DomainError);
}

TEST_CASE("rows cover every point and curve in order") {
    const ExperimentConfig cfg = small_power_sweep();
    const auto rows = power_sweep(cfg);
    REQUIRE(rows.size() == 3 * 6);
    std::size_t i = 0;
    for (double dbm : cfg.budgets_dbm)
        for (const Curve& c : cfg.curves()) {
            CHECK(rows[i].sweep_value == dbm);
            CHECK(rows[i].strategy == c.strategy);
            CHECK(rows[i].knowledge == c.knowledge);
            CHECK(rows[i].trials == cfg.trials);
            CHECK(rows[i].mean_span > 0.0);
            CHECK(rows[i].stderr_ >= 0.0);
            ++i;
        }
}

TEST_CASE("rows are reproducible and independent of the thread count") {
    ExperimentConfig cfg = small_power_sweep();
    cfg.threads = 1;
    const auto a = power_sweep(cfg);
    cfg.threads = 4;
    const auto b = power_sweep(cfg);
    const auto c = power_sweep(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].mean_span == b[i].mean_span);
        CHECK(a[i].stderr_ == b[i].stderr_);
        CHECK(b[i].mean_span == c[i].mean_span);
    }
    cfg.master_seed = 6;
    const auto d = power_sweep(cfg);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        differs = differs || a[i].mean_span != d[i].mean_span;
    CHECK(differs);
}

TEST_CASE("single trial reports zero standard error") {
    ExperimentConfig cfg = small_power_sweep(1);
    for (const SummaryRow& r : power_sweep(cfg))
        CHECK(r.stderr_ == 0.0);
}

TEST_CASE("standard error shrinks as one over root trials") {
    ExperimentConfig cfg;
    cfg.budgets_dbm = {-6};
    cfg.strategies = {Strategy::NcOnly};
    cfg.knowledge = {Knowledge::Causal};
    cfg.trials = 2000;
    cfg.master_seed = 8;
    const double se1 = power_sweep(cfg).front().stderr_;
    cfg.trials = 8000;
    cfg.master_seed = 9;
    const double se4 = power_sweep(cfg).front().stderr_;
    CHECK_THAT(se1 / se4, WithinRel(2.0, 0.25));
}

TEST_CASE("ratio sweep splits the total") {
    ExperimentConfig cfg;
    cfg.ratios = {0.0, 1.0};
    cfg.strategies = {Strategy::NcFirst, Strategy::Opportunistic, Strategy::OneDirectional};
    cfg.knowledge = {Knowledge::Causal};
    cfg.trials = 30;
    const auto rows = ratio_sweep(cfg);
    REQUIRE(rows.size() == 6);
    // nothing to code at ratio 0, so all three are the same forwarding run
    CHECK(rows[0].mean_span == rows[1].mean_span);
    CHECK(rows[1].mean_span == rows[2].mean_span);

    for (std::size_t i = 3; i < 6; ++i)
        CHECK(rows[i].sweep_value == 1.0);
    // equal halves: coding strategies finish no later than forwarding on average
    CHECK(rows[3].mean_span < rows[5].mean_span);
}

TEST_CASE("summary csv format") {
    std::vector<SummaryRow> rows{{-10, Strategy::NcOnly, Knowledge::Causal, 3.25, 0.125, 200},
                                 {0.4, Strategy::OneDirectional, Knowledge::Noncausal, 1.5, 0, 1}};
    std::ostringstream os;
    write_summary_csv(os, rows);
    CHECK(os.str() ==
          "sweep_value,strategy,knowledge,mean_span_slots,stderr,trials\n"
          "-10,nc-only,causal,3.25,0.125,200\n"
          "0.4,one-directional,noncausal,1.5,0,1\n");
    std::ostringstream table;
    write_summary_table(table, rows, "budget_dbm");
    CHECK(table.str().find("nc-only") != std::string::npos);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits)
        REQUIRE(h.load() == 1);
    CHECK_THROWS_AS(parallel_for(100, 3,
                                 [](std::size_t i) {
                                     if (i == 57)
                                         throw GuardError("boom");
                                 }),
                    GuardError);
    int serial = 0;
    parallel_for(10, 1, [&](std::size_t) { ++serial; });
    CHECK(serial == 10);
}
