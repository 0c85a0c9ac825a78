#include "agcore/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agcore/errors.hpp"
#include "agcore/parallel.hpp"
#include "agcore/rng.hpp"

namespace agcore {

int KRuleSpec::k_for(int n) const {
    switch (kind) {
        case KRule::fixed:
            return value;
        case KRule::balanced:
            return 0;
        case KRule::plus_one:
            return 1;
        case KRule::fixed_workers:
            if (value < n) {
                throw DataError("fixed worker total " + std::to_string(value) +
                                " is below the firm count " + std::to_string(n));
            }
            return value - n;
    }
    return 0;
}

std::string KRuleSpec::label() const {
    switch (kind) {
        case KRule::fixed:
            return "fixed:" + std::to_string(value);
        case KRule::balanced:
            return "balanced";
        case KRule::plus_one:
            return "plus-one";
        case KRule::fixed_workers:
            return "workers:" + std::to_string(value);
    }
    return "balanced";
}

KRuleSpec KRuleSpec::parse(const std::string& text) {
    if (text == "balanced") return {KRule::balanced, 0};
    if (text == "plus-one") return {KRule::plus_one, 0};
    auto tail_int = [&](std::size_t at) {
        try {
            std::size_t used = 0;
            int v = std::stoi(text.substr(at), &used);
            if (at + used != text.size()) throw DataError("");
            return v;
        } catch (const std::exception&) {
            throw DataError("bad worker rule '" + text + "'");
        }
    };
    if (text.rfind("fixed:", 0) == 0) {
        int k = tail_int(6);
        if (k < 0) throw DataError("fixed worker surplus must be non-negative");
        return {KRule::fixed, k};
    }
    if (text.rfind("workers:", 0) == 0) {
        int total = tail_int(8);
        if (total < 1) throw DataError("worker total must be positive");
        return {KRule::fixed_workers, total};
    }
    throw DataError("unknown worker rule '" + text + "' (expected balanced, plus-one, fixed:K or workers:TOTAL)");
}

AllocationRule parse_allocation_rule(const std::string& text) {
    if (text == "firm") return AllocationRule::firm_optimal;
    if (text == "worker") return AllocationRule::worker_optimal;
    throw DataError("unknown allocation rule '" + text + "' (expected firm or worker)");
}

std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial) {
    return stream_word(stream_word(base_seed, static_cast<std::uint64_t>(n)),
                       static_cast<std::uint64_t>(trial));
}

namespace {

void worst_qualities(const Market& m, double& worst, double& second) {
    double lo1 = std::numeric_limits<double>::infinity();
    double lo2 = std::numeric_limits<double>::infinity();
    for (int w = 0; w < m.workers(); ++w) {
        double best = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < m.n; ++f) best = std::max(best, m.at(f, w));
        if (best < lo1) {
            lo2 = lo1;
            lo1 = best;
        } else if (best < lo2) {
            lo2 = best;
        }
    }
    worst = lo1;
    second = m.workers() > 1 ? lo2 : lo1;
}

TrialStats stats_from_allocation(const Market& m, const MatchResult& opt, const Allocation& a,
                                 int trial_index) {
    TrialStats s;
    s.n = m.n;
    s.k = m.k;
    s.trial = trial_index;
    s.surplus = opt.surplus;
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : a.v) {
        sum += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    s.sum_v = sum;
    s.min_v = lo;
    s.max_v = hi;
    s.mean_v = sum / m.workers();
    Dispersion d = dispersion(a);
    s.du = d.du;
    s.dv = d.dv;
    s.workers_share = s.surplus > 0.0 ? std::clamp(sum / s.surplus, 0.0, 1.0) : 0.0;
    worst_qualities(m, s.worst_q, s.second_worst_q);
    return s;
}

} // namespace

TrialStats run_single_trial(int n, int k, const DistributionSpec& dist, AllocationRule rule,
                            std::uint64_t seed, int trial_index) {
    Market m = generate_market(n, k, dist, seed);
    MatchResult opt = max_weight_matching(m);
    Allocation a =
        rule == AllocationRule::firm_optimal ? firm_optimal(m, opt) : worker_optimal(m, opt);
    if (!is_core(m, a, 1e-6, opt.surplus).empty()) {
        throw InternalError("extreme allocation failed the core check at tolerance 1e-6");
    }
    return stats_from_allocation(m, opt, a, trial_index);
}

SimResult run_trials(const SimConfig& cfg) {
    if (cfg.n_values.empty()) throw DataError("no market sizes given");
    if (cfg.trials < 1) throw DataError("need at least one trial");
    for (int n : cfg.n_values) {
        if (n < 1) throw DataError("market sizes must be positive");
        cfg.k_rule.k_for(n); // validates, e.g. a fixed worker total below n
    }

    struct Slot {
        bool ok = false;
        TrialStats stats;
        std::string error;
    };
    const long long per_n = cfg.trials;
    std::vector<Slot> slots(cfg.n_values.size() * static_cast<std::size_t>(per_n));

    parallel_for(static_cast<long long>(slots.size()), cfg.threads, [&](long long i) {
        const int n = cfg.n_values[static_cast<std::size_t>(i / per_n)];
        const int trial = static_cast<int>(i % per_n);
        Slot& slot = slots[static_cast<std::size_t>(i)];
        try {
            slot.stats = run_single_trial(n, cfg.k_rule.k_for(n), cfg.dist, cfg.rule,
                                          trial_seed(cfg.base_seed, n, trial), trial);
            slot.ok = true;
        } catch (const std::exception& e) {
            slot.error = e.what();
        }
    });

    SimResult out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const int n = cfg.n_values[i / static_cast<std::size_t>(per_n)];
        const int trial = static_cast<int>(i % static_cast<std::size_t>(per_n));
        if (slots[i].ok) {
            out.rows.push_back(slots[i].stats);
        } else {
            out.errors.push_back({n, trial, slots[i].error});
        }
    }
    return out;
}

std::vector<SweepRow> sweep_firms(int total_workers, const std::vector<int>& firm_counts,
                                  const DistributionSpec& dist, AllocationRule rule, int trials,
                                  std::uint64_t base_seed, int threads) {
    if (total_workers < 1) throw DataError("worker total must be positive");
    if (firm_counts.empty()) throw DataError("no firm counts given");
    if (trials < 1) throw DataError("need at least one trial");
    for (int c : firm_counts) {
        if (c < 1) throw DataError("firm counts must be positive");
    }

    std::vector<SweepRow> out;
    for (int firms : firm_counts) {
        std::vector<double> share(static_cast<std::size_t>(trials));
        std::vector<std::string> failures(static_cast<std::size_t>(trials));
        parallel_for(trials, threads, [&](long long t) {
            try {
                std::uint64_t seed = trial_seed(base_seed, firms, static_cast<int>(t));
                const bool transposed = firms > total_workers;
                const int rows = transposed ? total_workers : firms;
                const int cols = transposed ? firms : total_workers;
                Market m = generate_market(rows, cols - rows, dist, seed);
                MatchResult opt = max_weight_matching(m);
                // mirrored market: the row side is the actual workers, so the
                // firm-favoring rule must favor the column side instead
                const bool favor_rows = transposed ? rule == AllocationRule::worker_optimal
                                                   : rule == AllocationRule::firm_optimal;
                Allocation a = favor_rows ? firm_optimal(m, opt) : worker_optimal(m, opt);
                if (!is_core(m, a, 1e-6, opt.surplus).empty()) {
                    throw InternalError("extreme allocation failed the core check at tolerance 1e-6");
                }
                double worker_pay = 0.0;
                if (transposed) {
                    for (double x : a.u) worker_pay += x;
                } else {
                    for (double x : a.v) worker_pay += x;
                }
                share[static_cast<std::size_t>(t)] =
                    opt.surplus > 0.0 ? std::clamp(worker_pay / opt.surplus, 0.0, 1.0) : 0.0;
            } catch (const std::exception& e) {
                failures[static_cast<std::size_t>(t)] = e.what();
            }
        });
        for (int t = 0; t < trials; ++t) {
            if (!failures[static_cast<std::size_t>(t)].empty()) {
                throw InternalError("sweep trial " + std::to_string(t) + " at " +
                                    std::to_string(firms) + " firms failed: " +
                                    failures[static_cast<std::size_t>(t)]);
            }
        }

        SweepRow row;
        row.firms = firms;
        row.workers = total_workers;
        row.trials = trials;
        double mean = 0.0;
        for (double x : share) mean += x;
        mean /= trials;
        double var = 0.0;
        for (double x : share) var += (x - mean) * (x - mean);
        row.mean_share = mean;
        row.stderr_share = trials > 1 ? std::sqrt(var / (trials - 1) / trials) : 0.0;
        out.push_back(row);
    }
    return out;
}

Histogram salary_histogram(const Market& m, const Allocation& a, int bin_count) {
    if (bin_count < 1) throw DataError("need at least one bin");
    if (static_cast<int>(a.v.size()) != m.workers()) {
        throw DataError("allocation dimensions do not match the market");
    }
    Histogram h;
    auto [lo_it, hi_it] = std::minmax_element(a.v.begin(), a.v.end());
    h.lo = *lo_it;
    h.hi = *hi_it;
    h.counts.assign(static_cast<std::size_t>(bin_count), 0);
    const double span = h.hi - h.lo;
    for (double x : a.v) {
        int bin = 0;
        if (span > 0.0) {
            bin = static_cast<int>((x - h.lo) / span * bin_count);
            bin = std::clamp(bin, 0, bin_count - 1);
        }
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

RegressionResult linear_fit(const std::vector<std::pair<double, double>>& points) {
    RegressionResult r;
    r.points = points;
    const std::size_t n = points.size();
    if (n < 2) {
        r.degenerate = true;
        return r;
    }
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        r.degenerate = true;
        r.intercept = my;
        return r;
    }
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.r2 = (sxy * sxy) / (sxx * syy);
    return r;
}

RegressionResult worst_worker_regression(int n, int trials, const DistributionSpec& dist,
                                         std::uint64_t base_seed, int threads) {
    if (n < 1) throw DataError("market size must be positive");
    if (trials < 1) throw DataError("need at least one trial");
    std::vector<std::pair<double, double>> pts(static_cast<std::size_t>(trials));
    std::vector<std::string> failures(static_cast<std::size_t>(trials));
    parallel_for(trials, threads, [&](long long t) {
        try {
            TrialStats s = run_single_trial(n, 0, dist, AllocationRule::firm_optimal,
                                            trial_seed(base_seed, n, static_cast<int>(t)),
                                            static_cast<int>(t));
            pts[static_cast<std::size_t>(t)] = {s.worst_q, s.sum_v};
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(t)] = e.what();
        }
    });
    for (int t = 0; t < trials; ++t) {
        if (!failures[static_cast<std::size_t>(t)].empty()) {
            throw InternalError("regression trial " + std::to_string(t) +
                                " failed: " + failures[static_cast<std::size_t>(t)]);
        }
    }
    return linear_fit(pts);
}

WindowSample second_worst_window(int n, int wanted_points, const DistributionSpec& dist,
                                 std::uint64_t base_seed, double center, double halfwidth,
                                 long long max_attempts) {
    if (n < 1) throw DataError("market size must be positive");
    if (wanted_points < 1) throw DataError("need at least one point");
    if (!(halfwidth > 0.0)) throw DataError("window halfwidth must be positive");
    WindowSample out;
    out.center = center;
    out.halfwidth = halfwidth;
    for (long long attempt = 0; attempt < max_attempts; ++attempt) {
        ++out.attempts;
        std::uint64_t seed = trial_seed(base_seed, n, static_cast<int>(attempt));
        Market m = generate_market(n, 0, dist, seed);
        double worst = 0.0, second = 0.0;
        worst_qualities(m, worst, second);
        if (std::abs(worst - center) > halfwidth) continue;
        MatchResult opt = max_weight_matching(m);
        Allocation a = firm_optimal(m, opt);
        if (!is_core(m, a, 1e-6, opt.surplus).empty()) {
            throw InternalError("extreme allocation failed the core check at tolerance 1e-6");
        }
        double sum_v = 0.0;
        for (double x : a.v) sum_v += x;
        out.points.emplace_back(second, sum_v);
        if (static_cast<int>(out.points.size()) >= wanted_points) break;
    }
    return out;
}

int exp_outlier_count(const Market& m) {
    const double t_hi = 1.1 * std::log(static_cast<double>(m.n));
    const double t_lo = std::log(static_cast<double>(m.n));
    int count = 0;
    for (int f = 0; f < m.n; ++f) {
        double best = -std::numeric_limits<double>::infinity();
        double second = -std::numeric_limits<double>::infinity();
        for (int w = 0; w < m.workers(); ++w) {
            double x = m.at(f, w);
            if (x > best) {
                second = best;
                best = x;
            } else if (x > second) {
                second = x;
            }
        }
        if (best > t_hi && (m.workers() == 1 || second < t_lo)) ++count;
    }
    return count;
}

} // namespace agcore
