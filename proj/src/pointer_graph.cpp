#include "agcore/pointer_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "agcore/errors.hpp"
#include "agcore/rng.hpp"

namespace agcore {

int pointer_fanout(int n, int k) {
    if (n < 1 || k < 0) throw DataError("fanout needs n >= 1, k >= 0");
    double raw = std::ceil(32.0 * (static_cast<double>(n + k) / n) * std::log(static_cast<double>(n)));
    int cap = n + k;
    if (!(raw >= 1.0)) return 1;
    if (raw >= static_cast<double>(cap)) return cap;
    return static_cast<int>(raw);
}

PointerGraph build_pointer_graph(const Market& m, const Matching& mu) {
    if (static_cast<int>(mu.firm_to_worker.size()) != m.n ||
        static_cast<int>(mu.worker_to_firm.size()) != m.workers()) {
        throw DataError("matching dimensions do not match the market");
    }
    if (!mu.consistent()) throw DataError("matching is inconsistent");

    PointerGraph g;
    g.n = m.n;
    g.k = m.k;
    g.fanout = pointer_fanout(m.n, m.k);
    g.worker_edges = mu.worker_to_firm;
    g.firm_edges.resize(m.n);

    const int mw = m.workers();
    std::vector<int> order(mw);
    for (int f = 0; f < m.n; ++f) {
        std::iota(order.begin(), order.end(), 0);
        auto better = [&](int a, int b) {
            double va = m.at(f, a), vb = m.at(f, b);
            if (va != vb) return va > vb;
            return a < b;
        };
        if (g.fanout < mw) {
            std::nth_element(order.begin(), order.begin() + (g.fanout - 1), order.end(), better);
        }
        std::vector<int>& edges = g.firm_edges[f];
        edges.assign(order.begin(), order.begin() + g.fanout);
        std::sort(edges.begin(), edges.end());
    }
    return g;
}

ExpansionReport check_expansion(const PointerGraph& g, const std::vector<int>& set_sizes,
                                int samples_per_size, std::uint64_t seed, ExpansionSide side) {
    if (samples_per_size < 1) throw DataError("need at least one sample per size");
    const int n = g.n;
    const int mw = g.workers();
    const int special = n / 10; // the one admissible size at the 0.99 bound
    const int pool_size = side == ExpansionSide::firms ? n : mw;
    const int target_size = side == ExpansionSide::firms ? mw : n;

    for (int s : set_sizes) {
        if (s < 1 || s > pool_size) throw DataError("set size out of range");
        bool ok = side == ExpansionSide::firms ? s <= std::max(special, 1) : s < std::max(special, 1);
        if (!ok) {
            throw DataError("set size " + std::to_string(s) + " is outside the claim's range");
        }
    }

    // reverse adjacency for worker-side probes: which firms point at w
    std::vector<std::vector<int>> into_worker;
    if (side == ExpansionSide::workers) {
        into_worker.resize(mw);
        for (int f = 0; f < n; ++f) {
            for (int w : g.firm_edges[f]) into_worker[w].push_back(f);
        }
    }

    SplitMix64 rng(seed);
    std::vector<int> pool(pool_size);
    std::iota(pool.begin(), pool.end(), 0);
    std::vector<int> stamp(target_size, -1);
    int epoch = -1;

    ExpansionReport report;
    for (int s : set_sizes) {
        ExpansionSizeReport row;
        row.side = side;
        row.size = s;
        row.samples = samples_per_size;
        row.min_neighbors = std::numeric_limits<long long>::max();
        if (side == ExpansionSide::firms) {
            row.required = s == special ? 0.99 * mw : 2.0 * mw / n * s;
        } else {
            row.required = 2.0 * s;
        }

        for (int it = 0; it < samples_per_size; ++it) {
            for (int i = 0; i < s; ++i) {
                int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(pool_size - i)));
                std::swap(pool[i], pool[j]);
            }
            ++epoch;
            long long neighbors = 0;
            for (int i = 0; i < s; ++i) {
                const std::vector<int>& adj =
                    side == ExpansionSide::firms ? g.firm_edges[pool[i]] : into_worker[pool[i]];
                for (int t : adj) {
                    if (stamp[t] != epoch) {
                        stamp[t] = epoch;
                        ++neighbors;
                    }
                }
            }
            row.min_neighbors = std::min(row.min_neighbors, neighbors);
            if (static_cast<double>(neighbors) < row.required) ++row.failures;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

namespace {

void require_bounded(const DistributionSpec& dist) {
    if (!dist.bounded()) {
        throw DataError("this check is defined only for bounded distributions");
    }
}

void check_graph_market(const PointerGraph& g, const Market& m) {
    if (g.n != m.n || g.k != m.k) throw DataError("graph dimensions do not match the market");
}

} // namespace

double min_pointed_value(const PointerGraph& g, const Market& m) {
    check_graph_market(g, m);
    require_bounded(m.dist);
    double lo = std::numeric_limits<double>::infinity();
    for (int f = 0; f < g.n; ++f) {
        for (int w : g.firm_edges[f]) lo = std::min(lo, m.at(f, w));
    }
    return lo;
}

double loss_claim_threshold(int n, const DistributionSpec& dist) {
    require_bounded(dist);
    if (n < 1) throw DataError("n must be positive");
    double g1 = *dist.density_at_sup();
    double t = 1.0 - 512.0 * std::log(static_cast<double>(n)) / (g1 * n);
    return std::max(t, 0.0);
}

double pointed_value_floor(int n, int k, const DistributionSpec& dist, std::uint64_t seed) {
    require_bounded(dist);
    if (n < 1 || k < 0) throw DataError("floor needs n >= 1, k >= 0");
    const int mw = n + k;
    const int beta = pointer_fanout(n, k);
    std::vector<double> row(mw);
    double lo = std::numeric_limits<double>::infinity();
    for (int f = 0; f < n; ++f) {
        fill_market_row(dist, seed, mw, f, row);
        std::nth_element(row.begin(), row.begin() + (beta - 1), row.end(), std::greater<double>());
        lo = std::min(lo, row[beta - 1]);
    }
    return lo;
}

AuditReport audit_path_inequalities(const PointerGraph& g, const Market& m, const Allocation& a,
                                    std::optional<double> optimal_surplus) {
    check_graph_market(g, m);
    require_bounded(m.dist);
    if (!is_core(m, a, 1e-6, optimal_surplus).empty()) {
        throw InternalError("audited allocation is not a core allocation at tolerance 1e-6");
    }
    for (int w = 0; w < m.workers(); ++w) {
        if (g.worker_edges[w] == kUnmatched && a.v[w] != 0.0) {
            throw InternalError("unemployed worker carries a non-zero salary");
        }
    }

    // an allocation admitted at core tolerance tau can miss these inequalities
    // by at most 2*tau without signalling anything real
    constexpr double kSlackFloor = -(2.0 * 1e-6 + 1e-9);

    AuditReport rep;
    auto note = [](std::optional<double>& worst, double slack) {
        if (!worst || slack < *worst) worst = slack;
    };
    for (int f = 0; f < g.n; ++f) {
        for (int w : g.firm_edges[f]) {
            int employer = g.worker_edges[w];
            if (employer == kUnmatched) {
                double slack = a.u[f] - m.at(f, w);
                ++rep.unemployed_checks;
                note(rep.worst_unemployed_slack, slack);
                if (slack < kSlackFloor) ++rep.violations;
            } else if (employer != f) {
                double slack = a.u[f] - (m.at(f, w) - (1.0 - a.u[employer]));
                ++rep.path_checks;
                note(rep.worst_path_slack, slack);
                if (slack < kSlackFloor) ++rep.violations;
            }
        }
    }
    return rep;
}

std::optional<int> firm_path_distance(const PointerGraph& g, int from, int to) {
    if (from < 0 || from >= g.n || to < 0 || to >= g.n) throw DataError("firm index out of range");
    if (from == to) return 0;
    std::vector<int> dist(g.n, -1);
    dist[from] = 0;
    std::deque<int> frontier{from};
    while (!frontier.empty()) {
        int f = frontier.front();
        frontier.pop_front();
        for (int w : g.firm_edges[f]) {
            int next = g.worker_edges[w];
            if (next == kUnmatched || dist[next] >= 0) continue;
            dist[next] = dist[f] + 2;
            if (next == to) return dist[next];
            frontier.push_back(next);
        }
    }
    return std::nullopt;
}

} // namespace agcore
