#pragma once

#include <optional>
#include <vector>

#include "agcore/market.hpp"
#include "agcore/matching.hpp"

namespace agcore {

// A matching together with firm profits u and worker salaries v.
struct Allocation {
    Matching matching;
    std::vector<double> u;
    std::vector<double> v;
};

struct CoreViolation {
    enum class Kind { pair_block, negative_payoff, split_mismatch, suboptimal_matching };
    enum class Side { firm, worker, none };

    Kind kind;
    Side side = Side::none; // which side a negative_payoff is on
    int firm = kUnmatched;
    int worker = kUnmatched;
    double magnitude = 0.0; // deficit or gap, always positive beyond tolerance
};

// Separate tolerances for the four core conditions. The epsilon-auction needs
// a relaxed pair bound (eps) and a relaxed efficiency bound (n*eps) while its
// splits stay exact; the extreme allocations use one uniform tolerance.
struct CoreTolerances {
    double nonneg = 0.0;
    double pair = 0.0;
    double split = 0.0;
    double efficiency = 0.0;

    static CoreTolerances uniform(double tol) { return CoreTolerances{tol, tol, tol, tol}; }
};

// Empty result means the allocation is a core member: payoffs non-negative,
// no blocking pair, matched pairs split their value exactly, and the total
// payoff equals the optimal surplus. Violations are reported exhaustively.
// Pass the optimal surplus if already known to avoid a redundant solve.
std::vector<CoreViolation> is_core(const Market& m, const Allocation& a, const CoreTolerances& tol,
                                   std::optional<double> optimal_surplus = std::nullopt);
std::vector<CoreViolation> is_core(const Market& m, const Allocation& a, double tol,
                                   std::optional<double> optimal_surplus = std::nullopt);

// Lattice extremes of the core: firm_optimal minimizes every worker salary
// simultaneously, worker_optimal maximizes them. The overloads taking a
// MatchResult reuse an optimal matching that was already computed.
Allocation firm_optimal(const Market& m);
Allocation firm_optimal(const Market& m, const MatchResult& opt);
Allocation worker_optimal(const Market& m);
Allocation worker_optimal(const Market& m, const MatchResult& opt);

struct ExtremePair {
    Allocation firm_opt;
    Allocation worker_opt;
};

// Oracle: enumerates vertex candidates of the core polytope in salary space
// (all d-subsets of tight constraints) and keeps the feasible vertices with
// minimal / maximal salary sum. Requires n <= 3 and n+k <= 4.
ExtremePair brute_force_extremes(const Market& m);

// Ascending-salary auction with increment eps: firms propose in index order,
// lowest first, each offering its best worker her current salary plus eps
// (zero if she is free). Terminates with exact splits, v = 0 for workers
// never hired, and u[f] + v[w] >= alpha[f][w] - eps for every pair.
Allocation ck_auction(const Market& m, double eps);

struct Dispersion {
    double du = 0.0;
    double dv = 0.0;
};

// Largest pairwise payoff difference within each side (max minus min).
Dispersion dispersion(const Allocation& a);

} // namespace agcore
