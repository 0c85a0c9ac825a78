#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "agcore/core_alloc.hpp"
#include "agcore/market.hpp"

namespace agcore {

enum class KRule { fixed, balanced, plus_one, fixed_workers };

// How the worker surplus k follows n across a sweep.
struct KRuleSpec {
    KRule kind = KRule::balanced;
    int value = 0; // k itself for fixed, the total worker count for fixed_workers

    int k_for(int n) const;
    std::string label() const;
    // accepts: balanced | plus-one | fixed:K | workers:TOTAL
    static KRuleSpec parse(const std::string& text);
};

enum class AllocationRule { firm_optimal, worker_optimal };

AllocationRule parse_allocation_rule(const std::string& text); // "firm" | "worker"

struct SimConfig {
    std::vector<int> n_values;
    KRuleSpec k_rule;
    DistributionSpec dist;
    AllocationRule rule = AllocationRule::firm_optimal;
    int trials = 400;
    std::uint64_t base_seed = 0;
    int threads = 0; // 0 = hardware default
};

struct TrialStats {
    int n = 0;
    int k = 0;
    int trial = 0;
    double surplus = 0.0;
    double sum_v = 0.0;
    double max_v = 0.0;
    double min_v = 0.0;
    double mean_v = 0.0;
    double du = 0.0;
    double dv = 0.0;
    double workers_share = 0.0;   // sum_v / surplus, zero when surplus is zero
    double worst_q = 0.0;         // min over workers of their best pairing value
    double second_worst_q = 0.0;
};

struct TrialError {
    int n = 0;
    int trial = 0;
    std::string message;
};

// Rows come back ordered by (position of n in the config, trial index)
// regardless of how many threads ran; failed trials land in errors instead,
// in the same order.
struct SimResult {
    std::vector<TrialStats> rows;
    std::vector<TrialError> errors;
};

// Seed of trial t at data point n, mixed from the base seed so every
// (n, t) pair gets an independent stream.
std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial);

// Generates one market, solves the requested extreme allocation, verifies
// core membership at 1e-6 (a failure here is an internal error), and fills
// the metric record.
TrialStats run_single_trial(int n, int k, const DistributionSpec& dist, AllocationRule rule,
                            std::uint64_t seed, int trial_index);

SimResult run_trials(const SimConfig& cfg);

struct SweepRow {
    int firms = 0;
    int workers = 0;
    int trials = 0;
    double mean_share = 0.0;   // workers' share of the surplus
    double stderr_share = 0.0; // standard error of that mean
};

// Workers' share of the surplus as the firm count crosses a fixed worker
// count. When firms outnumber workers the instance is generated transposed
// (the short side must index the rows) and the rule is mirrored so it still
// refers to the actual firms.
std::vector<SweepRow> sweep_firms(int total_workers, const std::vector<int>& firm_counts,
                                  const DistributionSpec& dist, AllocationRule rule, int trials,
                                  std::uint64_t base_seed, int threads = 0);

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<long long> counts;
};

// Equal-width bins spanning [min salary, max salary]; constant salaries all
// land in bin zero. Counts always sum to the worker count.
Histogram salary_histogram(const Market& m, const Allocation& a, int bin_count);

struct RegressionResult {
    std::vector<std::pair<double, double>> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    bool degenerate = false; // x (or y) carried no variance; fit is undefined
};

RegressionResult linear_fit(const std::vector<std::pair<double, double>>& points);

// Balanced firm-optimal markets: one (worst worker quality, salary sum) point
// per trial, plus the least-squares fit through them.
RegressionResult worst_worker_regression(int n, int trials, const DistributionSpec& dist,
                                         std::uint64_t base_seed, int threads = 0);

// Rejection-sampled companion: keeps only markets whose worst worker quality
// falls in [center - halfwidth, center + halfwidth] and pairs the second
// worst quality with the salary sum. The window is part of the report.
struct WindowSample {
    double center = 0.0;
    double halfwidth = 0.0;
    long long attempts = 0;
    std::vector<std::pair<double, double>> points;
};

WindowSample second_worst_window(int n, int wanted_points, const DistributionSpec& dist,
                                 std::uint64_t base_seed, double center = 0.95,
                                 double halfwidth = 0.01, long long max_attempts = 2000000);

// Firms whose best row entry clears 1.1*ln(n) while every other entry stays
// below ln(n); under heavy-tailed laws these seed the high-salary outliers.
int exp_outlier_count(const Market& m);

} // namespace agcore
