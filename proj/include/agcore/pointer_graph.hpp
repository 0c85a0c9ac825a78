#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "agcore/core_alloc.hpp"
#include "agcore/market.hpp"
#include "agcore/matching.hpp"

namespace agcore {

// ceil(32 * ((n+k)/n) * ln n), clamped to [1, n+k].
int pointer_fanout(int n, int k);

// Directed bipartite structure: every firm points to the fanout workers it
// values most, every employed worker points back to her employer.
struct PointerGraph {
    int n = 0;
    int k = 0;
    int fanout = 0;
    std::vector<std::vector<int>> firm_edges; // per firm, ascending worker indices
    std::vector<int> worker_edges;            // employer per worker, or kUnmatched

    int workers() const { return n + k; }
};

// Ties in a row are broken toward the lower worker index.
PointerGraph build_pointer_graph(const Market& m, const Matching& mu);

enum class ExpansionSide { firms, workers };

struct ExpansionSizeReport {
    ExpansionSide side = ExpansionSide::firms;
    int size = 0;
    int samples = 0;
    int failures = 0;
    long long min_neighbors = 0; // smallest neighborhood over the samples
    double required = 0.0;       // bound the samples were tested against
};

struct ExpansionReport {
    std::vector<ExpansionSizeReport> rows;

    int total_failures() const {
        int t = 0;
        for (const auto& r : rows) t += r.failures;
        return t;
    }
};

// Random-set expansion probe. Firm sets of size s below n/10 must reach
// 2*((n+k)/n)*s distinct workers; sets of size exactly floor(n/10) must reach
// 0.99*(n+k). Worker sets of size s below n/10 must be pointed to by at least
// 2*s firms. Finding no failures does not prove the property, so failures are
// counted per size rather than asserted here.
ExpansionReport check_expansion(const PointerGraph& g, const std::vector<int>& set_sizes,
                                int samples_per_size, std::uint64_t seed,
                                ExpansionSide side = ExpansionSide::firms);

// Smallest productivity over all firm->worker edges. Bounded laws only.
double min_pointed_value(const PointerGraph& g, const Market& m);

// 1 - 512*ln(n)/(g(1)*n), clamped at zero: the level every pointed edge is
// expected to clear. Bounded laws only.
double loss_claim_threshold(int n, const DistributionSpec& dist);

// Streaming twin of min_pointed_value over a freshly generated market: draws
// one row at a time, so it runs at sizes where the full matrix would not fit.
double pointed_value_floor(int n, int k, const DistributionSpec& dist, std::uint64_t seed);

struct AuditReport {
    long long unemployed_checks = 0;
    long long path_checks = 0;
    long long violations = 0;
    std::optional<double> worst_unemployed_slack; // present when any check ran
    std::optional<double> worst_path_slack;
};

// Checks the edge-local payoff inequalities that core membership forces:
// u[f] >= alpha[f][w] whenever f points to an unemployed w, and
// u[f] >= alpha[f][w] - (1 - u[f']) along every two-step path f -> w -> f'.
// The allocation must pass is_core at 1e-6 and the law must be bounded.
AuditReport audit_path_inequalities(const PointerGraph& g, const Market& m, const Allocation& a,
                                    std::optional<double> optimal_surplus = std::nullopt);

// Shortest directed path length, counted in edges, from one firm to another
// through the firm -> worker -> employer alternation; absent if unreachable.
std::optional<int> firm_path_distance(const PointerGraph& g, int from, int to);

} // namespace agcore
