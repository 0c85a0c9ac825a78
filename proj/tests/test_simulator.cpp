#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "agcore/core_alloc.hpp"
#include "agcore/errors.hpp"
#include "agcore/market.hpp"
#include "agcore/matching.hpp"
#include "agcore/simulator.hpp"

using namespace agcore;

TEST_CASE("worker-count rules") {
    CHECK(KRuleSpec{KRule::balanced, 0}.k_for(50) == 0);
    CHECK(KRuleSpec{KRule::plus_one, 0}.k_for(50) == 1);
    CHECK(KRuleSpec{KRule::fixed, 7}.k_for(50) == 7);
    CHECK(KRuleSpec{KRule::fixed_workers, 80}.k_for(50) == 30);
    CHECK_THROWS_AS(KRuleSpec({KRule::fixed_workers, 80}).k_for(81), DataError);

    for (const char* text : {"balanced", "plus-one", "fixed:7", "workers:80"}) {
        CHECK(KRuleSpec::parse(text).label() == text);
    }
    for (const char* bad : {"", "fixed", "fixed:", "fixed:-1", "fixed:2x", "workers:0", "both"}) {
        CHECK_THROWS_AS(KRuleSpec::parse(bad), DataError);
    }
    CHECK_THROWS_AS(parse_allocation_rule("auction"), DataError);
}

TEST_CASE("trial seeds separate both by size and by trial") {
    CHECK(trial_seed(1, 100, 0) != trial_seed(1, 100, 1));
    CHECK(trial_seed(1, 100, 0) != trial_seed(1, 200, 0));
    CHECK(trial_seed(1, 100, 5) == trial_seed(1, 100, 5));
    CHECK(trial_seed(2, 100, 5) != trial_seed(1, 100, 5));
}

TEST_CASE("a one-firm market yields degenerate but well-defined metrics") {
    TrialStats s = run_single_trial(1, 0, DistributionSpec::Uniform01(), AllocationRule::firm_optimal,
                                    9, 0);
    CHECK(s.n == 1);
    CHECK(s.k == 0);
    CHECK(s.surplus > 0.0);
    CHECK(s.sum_v == 0.0); // the single firm keeps everything
    CHECK(s.workers_share == 0.0);
    CHECK(s.du == 0.0);
    CHECK(s.dv == 0.0);
    CHECK(s.worst_q == s.second_worst_q); // one worker: both quantities coincide
}

TEST_CASE("trial metrics match a by-hand recomputation") {
    const std::uint64_t seed = trial_seed(123, 12, 4);
    TrialStats s = run_single_trial(12, 2, DistributionSpec::Uniform01(),
                                    AllocationRule::worker_optimal, seed, 4);
    Market m = generate_market(12, 2, DistributionSpec::Uniform01(), seed);
    MatchResult opt = max_weight_matching(m);
    Allocation a = worker_optimal(m, opt);
    CHECK(s.surplus == opt.surplus);
    double sum_v = 0.0, max_v = 0.0;
    for (double x : a.v) {
        sum_v += x;
        max_v = std::max(max_v, x);
    }
    CHECK(s.sum_v == sum_v);
    CHECK(s.max_v == max_v);
    CHECK(s.mean_v == sum_v / m.workers());
    CHECK(s.workers_share == doctest::Approx(sum_v / opt.surplus).epsilon(1e-12));
    Dispersion d = dispersion(a);
    CHECK(s.du == d.du);
    CHECK(s.dv == d.dv);
}

TEST_CASE("run_trials is deterministic and thread-count invariant") {
    SimConfig cfg;
    cfg.n_values = {8, 12};
    cfg.k_rule = {KRule::plus_one, 0};
    cfg.dist = DistributionSpec::Uniform01();
    cfg.rule = AllocationRule::firm_optimal;
    cfg.trials = 6;
    cfg.base_seed = 77;

    cfg.threads = 1;
    SimResult serial = run_trials(cfg);
    cfg.threads = 4;
    SimResult parallel = run_trials(cfg);

    REQUIRE(serial.rows.size() == 12);
    REQUIRE(parallel.rows.size() == 12);
    CHECK(serial.errors.empty());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
        const TrialStats& a = serial.rows[i];
        const TrialStats& b = parallel.rows[i];
        CHECK(a.n == b.n);
        CHECK(a.trial == b.trial);
        CHECK(a.surplus == b.surplus);
        CHECK(a.sum_v == b.sum_v);
        CHECK(a.dv == b.dv);
        CHECK(a.worst_q == b.worst_q);
    }
    // rows are ordered by (n position, trial)
    for (int t = 0; t < 6; ++t) {
        CHECK(serial.rows[t].n == 8);
        CHECK(serial.rows[t].trial == t);
        CHECK(serial.rows[6 + t].n == 12);
    }
}

TEST_CASE("run_trials validates its configuration") {
    SimConfig cfg;
    cfg.dist = DistributionSpec::Uniform01();
    CHECK_THROWS_AS(run_trials(cfg), DataError); // no sizes
    cfg.n_values = {10};
    cfg.trials = 0;
    CHECK_THROWS_AS(run_trials(cfg), DataError);
    cfg.trials = 1;
    cfg.n_values = {0};
    CHECK_THROWS_AS(run_trials(cfg), DataError);
}

TEST_CASE("workers' share crosses one half as firms flood a fixed labor pool") {
    std::vector<SweepRow> rows =
        sweep_firms(24, {6, 24, 96}, DistributionSpec::Uniform01(), AllocationRule::firm_optimal,
                    12, 5, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].workers == 24);
    CHECK(rows[0].trials == 12);
    CHECK(rows[0].mean_share < 0.2);  // 6 firms, 24 workers: workers compete
    CHECK(rows[2].mean_share > 0.8);  // 96 firms, 24 workers: firms compete
    CHECK(rows[0].mean_share < rows[1].mean_share);
    CHECK(rows[1].mean_share < rows[2].mean_share);
    for (const SweepRow& r : rows) {
        CHECK(r.stderr_share >= 0.0);
        CHECK(r.mean_share >= 0.0);
        CHECK(r.mean_share <= 1.0);
    }
}

TEST_CASE("the sweep is deterministic across thread counts") {
    std::vector<SweepRow> one =
        sweep_firms(10, {5, 20}, DistributionSpec::Uniform01(), AllocationRule::worker_optimal, 8,
                    3, 1);
    std::vector<SweepRow> four =
        sweep_firms(10, {5, 20}, DistributionSpec::Uniform01(), AllocationRule::worker_optimal, 8,
                    3, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].mean_share == four[i].mean_share);
        CHECK(one[i].stderr_share == four[i].stderr_share);
    }
}

TEST_CASE("histogram bins cover every worker") {
    Market m = generate_market(40, 2, DistributionSpec::Uniform01(), 8);
    MatchResult opt = max_weight_matching(m);
    Allocation a = worker_optimal(m, opt);
    Histogram h = salary_histogram(m, a, 10);
    REQUIRE(h.counts.size() == 10);
    long long total = 0;
    for (long long c : h.counts) total += c;
    CHECK(total == m.workers());
    CHECK(h.lo <= h.hi);
    CHECK_THROWS_AS(salary_histogram(m, a, 0), DataError);
}

TEST_CASE("constant salaries land in a single bin") {
    Market m;
    m.n = 2;
    m.k = 0;
    m.alpha = {1.0, 1.0, 1.0, 1.0};
    MatchResult opt = max_weight_matching(m);
    Allocation a = worker_optimal(m, opt); // both workers get exactly 1
    Histogram h = salary_histogram(m, a, 5);
    CHECK(h.lo == h.hi);
    CHECK(h.counts[0] == 2);
    for (std::size_t b = 1; b < h.counts.size(); ++b) CHECK(h.counts[b] == 0);
}

TEST_CASE("linear fits recover exact lines and flag degenerate clouds") {
    RegressionResult exact = linear_fit({{0.0, 1.0}, {1.0, 3.0}, {2.0, 5.0}});
    CHECK_FALSE(exact.degenerate);
    CHECK(exact.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(exact.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact.r2 == doctest::Approx(1.0).epsilon(1e-12));

    RegressionResult flat_x = linear_fit({{1.0, 0.0}, {1.0, 5.0}, {1.0, 9.0}});
    CHECK(flat_x.degenerate);
    RegressionResult single = linear_fit({{1.0, 2.0}});
    CHECK(single.degenerate);
}

TEST_CASE("worst-worker regression produces one point per trial") {
    RegressionResult r = worst_worker_regression(20, 30, DistributionSpec::Uniform01(), 17, 2);
    REQUIRE(r.points.size() == 30);
    CHECK_FALSE(r.degenerate);
    for (const auto& [x, y] : r.points) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);  // worst quality is a max of uniforms
        CHECK(y >= 0.0);  // salary sums cannot be negative
    }
}

TEST_CASE("windowed sampling pins the worst quality where asked") {
    WindowSample w = second_worst_window(12, 5, DistributionSpec::Uniform01(), 3, 0.7, 0.1, 200000);
    CHECK(w.center == 0.7);
    CHECK(w.halfwidth == 0.1);
    REQUIRE(w.points.size() == 5);
    CHECK(w.attempts >= 5);
    for (const auto& [second, sum_v] : w.points) {
        CHECK(second >= 0.0); // second-worst quality, paired with the salary sum
        CHECK(sum_v >= 0.0);
    }
}

TEST_CASE("exponential outlier counting follows its definition") {
    Market m;
    m.n = 3;
    m.k = 0;
    double L = std::log(3.0);
    m.alpha = {1.2 * L, 0.1, 0.1,   // outlier: best clears 1.1*ln n, rest below ln n
               0.9 * L, 0.8 * L, 0.1,  // best too small
               1.2 * L, 1.05 * L, 0.1}; // second entry above ln n disqualifies
    CHECK(exp_outlier_count(m) == 1);

    Market none;
    none.n = 2;
    none.k = 0;
    none.alpha = {0.1, 0.2, 0.3, 0.4};
    CHECK(exp_outlier_count(none) == 0);
}
