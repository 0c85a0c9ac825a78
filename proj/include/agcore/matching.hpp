#pragma once

#include <vector>

#include "agcore/market.hpp"

namespace agcore {

inline constexpr int kUnmatched = -1;

// Partial bijection between firms and workers.
struct Matching {
    std::vector<int> firm_to_worker; // size n
    std::vector<int> worker_to_firm; // size n+k

    static Matching empty(int n_firms, int n_workers) {
        Matching mu;
        mu.firm_to_worker.assign(n_firms, kUnmatched);
        mu.worker_to_firm.assign(n_workers, kUnmatched);
        return mu;
    }

    void link(int f, int w) {
        firm_to_worker[f] = w;
        worker_to_firm[w] = f;
    }

    bool consistent() const;
};

struct MatchResult {
    Matching matching;
    double surplus = 0.0;
};

// Maximum-weight assignment of firms to workers: the grand-coalition value.
// Hungarian algorithm with slack arrays, O(n^2 (n+k)). Pairs with negative
// value are never used; with non-negative entries every firm is matched.
MatchResult max_weight_matching(const Market& m);

// Exhaustive oracle over all partial injective firm->worker maps.
// Requires n <= 8 and n+k <= 8.
MatchResult brute_force_matching(const Market& m);

// v(S): the best pairing value achievable inside the coalition given by the
// two index sets. Enumeration-based; both sets limited to 8 agents.
double coalition_value(const Market& m, const std::vector<int>& firms,
                       const std::vector<int>& workers);

} // namespace agcore
