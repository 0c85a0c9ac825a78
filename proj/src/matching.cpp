#include "agcore/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agcore/errors.hpp"

namespace agcore {

bool Matching::consistent() const {
    const int n = static_cast<int>(firm_to_worker.size());
    const int m = static_cast<int>(worker_to_firm.size());
    for (int f = 0; f < n; ++f) {
        int w = firm_to_worker[f];
        if (w == kUnmatched) continue;
        if (w < 0 || w >= m || worker_to_firm[w] != f) return false;
    }
    for (int w = 0; w < m; ++w) {
        int f = worker_to_firm[w];
        if (f == kUnmatched) continue;
        if (f < 0 || f >= n || firm_to_worker[f] != w) return false;
    }
    return true;
}

namespace {

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

MatchResult max_weight_matching(const Market& mkt) {
    check_finite(mkt);
    const int n = mkt.n;
    const int m = mkt.workers();
    const double inf = std::numeric_limits<double>::infinity();

    // Negative values clamp to zero for the dual machinery; a matched pair
    // with original value < 0 is dropped afterwards, which preserves the
    // optimum (a zero-clamped edge contributes nothing).
    std::vector<double> a(mkt.alpha);
    for (double& x : a) x = std::max(x, 0.0);
    auto value = [&](int f, int w) { return a[static_cast<std::size_t>(f) * m + w]; };

    std::vector<double> u(n, 0.0), v(m, 0.0);
    for (int f = 0; f < n; ++f) {
        double best = 0.0;
        for (int w = 0; w < m; ++w) best = std::max(best, value(f, w));
        u[f] = best;
    }

    std::vector<int> match_of_worker(m, kUnmatched);
    std::vector<int> match_of_firm(n, kUnmatched);
    std::vector<double> slack(m);
    std::vector<int> slack_firm(m);
    std::vector<int> parent_firm(m);
    std::vector<char> in_tree(n), visited(m);

    for (int root = 0; root < n; ++root) {
        std::fill(in_tree.begin(), in_tree.end(), 0);
        std::fill(visited.begin(), visited.end(), 0);
        std::fill(parent_firm.begin(), parent_firm.end(), kUnmatched);
        in_tree[root] = 1;
        for (int w = 0; w < m; ++w) {
            slack[w] = u[root] + v[w] - value(root, w);
            slack_firm[w] = root;
        }

        for (;;) {
            int next_w = kUnmatched;
            double delta = inf;
            for (int w = 0; w < m; ++w) {
                if (!visited[w] && slack[w] < delta) {
                    delta = slack[w];
                    next_w = w;
                }
            }
            delta = std::max(delta, 0.0); // rounding can leave slack a hair below zero
            if (delta > 0.0) {
                for (int f = 0; f < n; ++f) {
                    if (in_tree[f]) u[f] -= delta;
                }
                for (int w = 0; w < m; ++w) {
                    if (visited[w]) {
                        v[w] += delta;
                    } else {
                        slack[w] -= delta;
                    }
                }
            }
            visited[next_w] = 1;
            parent_firm[next_w] = slack_firm[next_w];
            int occupant = match_of_worker[next_w];
            if (occupant == kUnmatched) {
                // augment along the alternating tree
                int w = next_w;
                while (w != kUnmatched) {
                    int f = parent_firm[w];
                    int prev = match_of_firm[f];
                    match_of_worker[w] = f;
                    match_of_firm[f] = w;
                    w = prev;
                }
                break;
            }
            in_tree[occupant] = 1;
            for (int w = 0; w < m; ++w) {
                if (visited[w]) continue;
                double s = u[occupant] + v[w] - value(occupant, w);
                if (s < slack[w]) {
                    slack[w] = s;
                    slack_firm[w] = occupant;
                }
            }
        }
    }

    MatchResult res;
    res.matching = Matching::empty(n, m);
    for (int f = 0; f < n; ++f) {
        int w = match_of_firm[f];
        if (w == kUnmatched) continue;
        if (mkt.at(f, w) < 0.0) continue; // clamped edge, worth nothing
        res.matching.link(f, w);
        res.surplus += mkt.at(f, w);
    }
    return res;
}

namespace {

struct BruteState {
    const Market* m;
    std::vector<int> chosen; // per firm: worker or kUnmatched
    std::vector<int> best_chosen;
    double best = -1.0;
    unsigned used = 0;
};

// Workers tried in ascending order before the skip branch, with strict
// improvement only, so the first optimum found is kept: lowest worker index,
// then lowest firm index.
void brute_rec(BruteState& st, int f, double acc) {
    const Market& m = *st.m;
    if (f == m.n) {
        if (acc > st.best) {
            st.best = acc;
            st.best_chosen = st.chosen;
        }
        return;
    }
    for (int w = 0; w < m.workers(); ++w) {
        if (st.used & (1u << w)) continue;
        st.used |= 1u << w;
        st.chosen[f] = w;
        brute_rec(st, f + 1, acc + m.at(f, w));
        st.used &= ~(1u << w);
    }
    st.chosen[f] = kUnmatched;
    brute_rec(st, f + 1, acc);
}

} // namespace

MatchResult brute_force_matching(const Market& m) {
    if (m.n > 8 || m.workers() > 8) throw DataError("brute force limited to 8 firms and 8 workers");
    check_finite(m);
    BruteState st;
    st.m = &m;
    st.chosen.assign(m.n, kUnmatched);
    st.best = -std::numeric_limits<double>::infinity();
    brute_rec(st, 0, 0.0);

    MatchResult res;
    res.matching = Matching::empty(m.n, m.workers());
    for (int f = 0; f < m.n; ++f) {
        int w = st.best_chosen[f];
        if (w == kUnmatched) continue;
        res.matching.link(f, w);
        res.surplus += m.at(f, w);
    }
    return res;
}

namespace {

double coalition_rec(const Market& m, const std::vector<int>& firms, const std::vector<int>& workers,
                     std::size_t fi, unsigned used) {
    if (fi == firms.size()) return 0.0;
    double best = coalition_rec(m, firms, workers, fi + 1, used); // firm idle
    for (std::size_t wi = 0; wi < workers.size(); ++wi) {
        if (used & (1u << wi)) continue;
        double val = m.at(firms[fi], workers[wi]) +
                     coalition_rec(m, firms, workers, fi + 1, used | (1u << wi));
        best = std::max(best, val);
    }
    return best;
}

} // namespace

double coalition_value(const Market& m, const std::vector<int>& firms,
                       const std::vector<int>& workers) {
    if (firms.size() > 8 || workers.size() > 8) {
        throw DataError("coalition_value limited to 8 firms and 8 workers");
    }
    for (int f : firms) {
        if (f < 0 || f >= m.n) throw DataError("firm index out of range");
    }
    for (int w : workers) {
        if (w < 0 || w >= m.workers()) throw DataError("worker index out of range");
    }
    check_finite(m);
    return coalition_rec(m, firms, workers, 0, 0);
}

} // namespace agcore
