#include "agcore/core_alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "agcore/errors.hpp"

namespace agcore {

namespace {

constexpr double kFixpointTol = 1e-12;
constexpr double kOracleTol = 1e-9;

void check_dims(const Market& m, const Allocation& a) {
    if (static_cast<int>(a.u.size()) != m.n || static_cast<int>(a.v.size()) != m.workers() ||
        static_cast<int>(a.matching.firm_to_worker.size()) != m.n ||
        static_cast<int>(a.matching.worker_to_firm.size()) != m.workers()) {
        throw DataError("allocation dimensions do not match the market");
    }
    if (!a.matching.consistent()) throw DataError("allocation matching is inconsistent");
}

void check_finite(const Market& m) {
    if (m.n < 1 || m.k < 0 ||
        m.alpha.size() != static_cast<std::size_t>(m.n) * static_cast<std::size_t>(m.workers())) {
        throw DataError("market shape does not match its matrix");
    }
    for (double x : m.alpha) {
        if (!std::isfinite(x)) throw DataError("matrix has non-finite entries");
    }
}

} // namespace

std::vector<CoreViolation> is_core(const Market& m, const Allocation& a, const CoreTolerances& tol,
                                   std::optional<double> optimal_surplus) {
    check_dims(m, a);
    check_finite(m);
    std::vector<CoreViolation> out;

    for (int f = 0; f < m.n; ++f) {
        if (a.u[f] < -tol.nonneg) {
            out.push_back({CoreViolation::Kind::negative_payoff, CoreViolation::Side::firm, f,
                           kUnmatched, -a.u[f]});
        }
    }
    for (int w = 0; w < m.workers(); ++w) {
        if (a.v[w] < -tol.nonneg) {
            out.push_back({CoreViolation::Kind::negative_payoff, CoreViolation::Side::worker,
                           kUnmatched, w, -a.v[w]});
        }
    }

    for (int f = 0; f < m.n; ++f) {
        for (int w = 0; w < m.workers(); ++w) {
            double deficit = m.at(f, w) - a.u[f] - a.v[w];
            if (deficit > tol.pair) {
                out.push_back({CoreViolation::Kind::pair_block, CoreViolation::Side::none, f, w,
                               deficit});
            }
        }
    }

    for (int f = 0; f < m.n; ++f) {
        int w = a.matching.firm_to_worker[f];
        if (w == kUnmatched) continue;
        double gap = std::abs(a.u[f] + a.v[w] - m.at(f, w));
        if (gap > tol.split) {
            out.push_back({CoreViolation::Kind::split_mismatch, CoreViolation::Side::none, f, w,
                           gap});
        }
    }

    double total = 0.0;
    for (double x : a.u) total += x;
    for (double x : a.v) total += x;
    double best = optimal_surplus ? *optimal_surplus : max_weight_matching(m).surplus;
    if (std::abs(total - best) > tol.efficiency) {
        out.push_back({CoreViolation::Kind::suboptimal_matching, CoreViolation::Side::none,
                       kUnmatched, kUnmatched, std::abs(total - best)});
    }
    return out;
}

std::vector<CoreViolation> is_core(const Market& m, const Allocation& a, double tol,
                                   std::optional<double> optimal_surplus) {
    return is_core(m, a, CoreTolerances::uniform(tol), optimal_surplus);
}

namespace {

// Both extremes are least fixpoints of a monotone lower-bound operator over
// the optimal matching, reached by ascending iteration from zero. Raising
// salaries from the floor converges onto the firm-optimal point; feasibility
// of the remaining (upper-bound) constraints follows from the core being
// non-empty. Swapping the roles of u and v yields the worker-optimal point.
// Unmatched agents are pinned at exactly zero throughout.
Allocation extreme_by_fixpoint(const Market& m, const MatchResult& opt, bool favor_firms) {
    const int n = m.n;
    const int mw = m.workers();
    Allocation a;
    a.matching = opt.matching;
    a.u.assign(n, 0.0);
    a.v.assign(mw, 0.0);

    auto settle_dependent_side = [&] {
        if (favor_firms) {
            for (int f = 0; f < n; ++f) {
                int w = a.matching.firm_to_worker[f];
                a.u[f] = w == kUnmatched ? 0.0 : m.at(f, w) - a.v[w];
            }
        } else {
            for (int w = 0; w < mw; ++w) {
                int f = a.matching.worker_to_firm[w];
                a.v[w] = f == kUnmatched ? 0.0 : m.at(f, w) - a.u[f];
            }
        }
    };

    const int cap = 10 * mw + 10;
    for (int round = 0; round <= cap; ++round) {
        settle_dependent_side();

        double change = 0.0;
        if (favor_firms) {
            for (int w = 0; w < mw; ++w) {
                if (a.matching.worker_to_firm[w] == kUnmatched) continue;
                double lb = 0.0;
                for (int f = 0; f < n; ++f) {
                    if (f == a.matching.worker_to_firm[w]) continue;
                    lb = std::max(lb, m.at(f, w) - a.u[f]);
                }
                if (lb > a.v[w]) {
                    change = std::max(change, lb - a.v[w]);
                    a.v[w] = lb;
                }
            }
        } else {
            for (int f = 0; f < n; ++f) {
                if (a.matching.firm_to_worker[f] == kUnmatched) continue;
                double lb = 0.0;
                for (int w = 0; w < mw; ++w) {
                    if (w == a.matching.firm_to_worker[f]) continue;
                    lb = std::max(lb, m.at(f, w) - a.v[w]);
                }
                if (lb > a.u[f]) {
                    change = std::max(change, lb - a.u[f]);
                    a.u[f] = lb;
                }
            }
        }
        if (change <= kFixpointTol) {
            settle_dependent_side(); // exact splits against the final salaries
            return a;
        }
    }
    throw InternalError("extreme core allocation did not reach a fixpoint within the round cap");
}

} // namespace

Allocation firm_optimal(const Market& m, const MatchResult& opt) {
    return extreme_by_fixpoint(m, opt, true);
}

Allocation firm_optimal(const Market& m) {
    return firm_optimal(m, max_weight_matching(m));
}

Allocation worker_optimal(const Market& m, const MatchResult& opt) {
    return extreme_by_fixpoint(m, opt, false);
}

Allocation worker_optimal(const Market& m) {
    return worker_optimal(m, max_weight_matching(m));
}

namespace {

// One linear constraint sum_i coef[i] * v[i] >= bound over matched-worker
// salaries.
struct HalfPlane {
    std::vector<double> coef;
    double bound;
};

// Solves the d x d system given by the selected constraints treated as
// equalities. Returns false when singular.
bool solve_square(const std::vector<HalfPlane>& cons, const std::vector<int>& pick,
                  std::vector<double>& x) {
    const int d = static_cast<int>(pick.size());
    std::vector<std::vector<double>> a(d, std::vector<double>(d + 1));
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) a[r][c] = cons[pick[r]].coef[c];
        a[r][d] = cons[pick[r]].bound;
    }
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        }
        if (std::abs(a[piv][col]) < 1e-12) return false;
        std::swap(a[col], a[piv]);
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            double factor = a[r][col] / a[col][col];
            for (int c = col; c <= d; ++c) a[r][c] -= factor * a[col][c];
        }
    }
    x.resize(d);
    for (int r = 0; r < d; ++r) x[r] = a[r][d] / a[r][r];
    return true;
}

Allocation allocation_from_salaries(const Market& m, const Matching& mu,
                                    const std::vector<int>& matched_workers,
                                    const std::vector<double>& vals) {
    Allocation a;
    a.matching = mu;
    a.u.assign(m.n, 0.0);
    a.v.assign(m.workers(), 0.0);
    for (std::size_t i = 0; i < matched_workers.size(); ++i) a.v[matched_workers[i]] = vals[i];
    for (int f = 0; f < m.n; ++f) {
        int w = mu.firm_to_worker[f];
        if (w != kUnmatched) a.u[f] = m.at(f, w) - a.v[w];
    }
    return a;
}

} // namespace

ExtremePair brute_force_extremes(const Market& m) {
    if (m.n > 3 || m.workers() > 4) {
        throw DataError("brute force extremes limited to 3 firms and 4 workers");
    }
    check_finite(m);
    MatchResult opt = brute_force_matching(m);
    const Matching& mu = opt.matching;

    std::vector<int> mwork; // matched workers, index order
    for (int w = 0; w < m.workers(); ++w) {
        if (mu.worker_to_firm[w] != kUnmatched) mwork.push_back(w);
    }
    const int d = static_cast<int>(mwork.size());
    if (d == 0) {
        Allocation zero = allocation_from_salaries(m, mu, mwork, {});
        return {zero, zero};
    }
    std::vector<int> slot(m.workers(), -1);
    for (int i = 0; i < d; ++i) slot[mwork[i]] = i;

    std::vector<HalfPlane> cons;
    auto add = [&](std::vector<double> coef, double bound) {
        cons.push_back({std::move(coef), bound});
    };
    for (int i = 0; i < d; ++i) {
        int w = mwork[i];
        int f = mu.worker_to_firm[w];
        std::vector<double> lo(d, 0.0), hi(d, 0.0);
        lo[i] = 1.0;
        hi[i] = -1.0;
        add(lo, 0.0);               // v_w >= 0
        add(hi, -m.at(f, w));       // u_f >= 0, i.e. v_w <= alpha
    }
    for (int f = 0; f < m.n; ++f) {
        int wf = mu.firm_to_worker[f];
        if (wf != kUnmatched) {
            for (int w = 0; w < m.workers(); ++w) {
                if (w == wf) continue;
                if (slot[w] >= 0) {
                    // u_f + v_w >= alpha[f][w] with u_f substituted out
                    std::vector<double> c(d, 0.0);
                    c[slot[w]] += 1.0;
                    c[slot[wf]] -= 1.0;
                    add(c, m.at(f, w) - m.at(f, wf));
                } else {
                    // unmatched worker can be hired at zero salary
                    std::vector<double> c(d, 0.0);
                    c[slot[wf]] = -1.0;
                    add(c, m.at(f, w) - m.at(f, wf));
                }
            }
        } else {
            for (int w = 0; w < m.workers(); ++w) {
                if (slot[w] >= 0) {
                    std::vector<double> c(d, 0.0);
                    c[slot[w]] = 1.0;
                    add(c, m.at(f, w)); // 0 + v_w >= alpha[f][w]
                } else if (m.at(f, w) > kOracleTol) {
                    throw InternalError("unmatched pair with positive value in an optimal matching");
                }
            }
        }
    }

    const int nc = static_cast<int>(cons.size());
    auto feasible = [&](const std::vector<double>& x) {
        for (const HalfPlane& h : cons) {
            double lhs = 0.0;
            for (int i = 0; i < d; ++i) lhs += h.coef[i] * x[i];
            if (lhs < h.bound - kOracleTol) return false;
        }
        return true;
    };

    std::vector<double> best_lo, best_hi, x;
    double lo_sum = std::numeric_limits<double>::infinity();
    double hi_sum = -std::numeric_limits<double>::infinity();
    std::vector<int> pick(d);
    auto consider = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double c : v) s += c;
        if (s < lo_sum) {
            lo_sum = s;
            best_lo = v;
        }
        if (s > hi_sum) {
            hi_sum = s;
            best_hi = v;
        }
    };
    // all d-subsets of constraints as candidate tight sets
    std::vector<int> idx(d);
    for (int i = 0; i < d; ++i) idx[i] = i;
    for (;;) {
        if (solve_square(cons, idx, x) && feasible(x)) consider(x);
        int pos = d - 1;
        while (pos >= 0 && idx[pos] == nc - d + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < d; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (best_lo.empty()) throw InternalError("no feasible core vertex found by enumeration");

    return {allocation_from_salaries(m, mu, mwork, best_lo),
            allocation_from_salaries(m, mu, mwork, best_hi)};
}

Allocation ck_auction(const Market& m, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DataError("auction increment must be positive");
    check_finite(m);
    const int n = m.n;
    const int mw = m.workers();

    std::vector<double> salary(mw, 0.0);
    std::vector<int> employer(mw, kUnmatched);
    std::set<int> queue;
    for (int f = 0; f < n; ++f) queue.insert(f);

    double max_alpha = 0.0;
    for (double x : m.alpha) max_alpha = std::max(max_alpha, x);
    // every displacing proposal raises some salary by eps, and salaries stay
    // below max_alpha, so this bound can only trip on a logic error
    long long budget = 2 * (static_cast<long long>(mw) + n) + 16 +
                       static_cast<long long>(std::ceil(max_alpha / eps)) *
                           (static_cast<long long>(mw) + 1);

    while (!queue.empty()) {
        if (--budget < 0) throw InternalError("auction failed to terminate within its budget");
        int f = *queue.begin();
        queue.erase(queue.begin());

        int best_w = kUnmatched;
        double best_util = 0.0, best_cost = 0.0;
        for (int w = 0; w < mw; ++w) {
            double cost = employer[w] == kUnmatched ? 0.0 : salary[w] + eps;
            double util = m.at(f, w) - cost;
            if (util > best_util || (best_w == kUnmatched && util >= 0.0)) {
                best_w = w;
                best_util = util;
                best_cost = cost;
            }
        }
        if (best_w == kUnmatched) continue; // no acceptable offer, firm stays out

        int displaced = employer[best_w];
        employer[best_w] = f;
        salary[best_w] = best_cost;
        if (displaced != kUnmatched) queue.insert(displaced);
    }

    Allocation a;
    a.matching = Matching::empty(n, mw);
    a.u.assign(n, 0.0);
    a.v.assign(mw, 0.0);
    for (int w = 0; w < mw; ++w) {
        if (employer[w] == kUnmatched) continue;
        a.matching.link(employer[w], w);
        a.v[w] = salary[w];
        a.u[employer[w]] = m.at(employer[w], w) - salary[w];
    }
    return a;
}

Dispersion dispersion(const Allocation& a) {
    Dispersion d;
    if (!a.u.empty()) {
        auto [lo, hi] = std::minmax_element(a.u.begin(), a.u.end());
        d.du = *hi - *lo;
    }
    if (!a.v.empty()) {
        auto [lo, hi] = std::minmax_element(a.v.begin(), a.v.end());
        d.dv = *hi - *lo;
    }
    return d;
}

} // namespace agcore
