// Command line front end: market generation, core solving, pointer-graph
// audits, and Monte-Carlo sweeps. Exit codes: 0 success, 1 usage error,
// 2 bad data, 3 broken internal invariant.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "agcore/core_alloc.hpp"
#include "agcore/errors.hpp"
#include "agcore/market.hpp"
#include "agcore/matching.hpp"
#include "agcore/pointer_graph.hpp"
#include "agcore/rng.hpp"
#include "agcore/simulator.hpp"
#include "agcore/svg.hpp"
#include "agcore/table.hpp"

namespace {

using namespace agcore;

// default seed for bare invocations, chosen once so reruns reproduce
constexpr std::uint64_t kDefaultSeed = 1729;

void write_output(const std::string& path, const std::string& payload) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open '" + path + "' for writing");
    os << payload;
    if (!os) throw DataError("failed writing '" + path + "'");
}

std::string render_table(const Table& t) {
    std::ostringstream os;
    emit_csv(t, os);
    return os.str();
}

std::string render_series(const Series& s) {
    std::ostringstream os;
    emit_svg(s, os);
    return os.str();
}

struct MarketSource {
    int n = 0;
    int k = 0;
    std::string dist = "uniform";
    std::uint64_t seed = kDefaultSeed;
    std::string in_path;
    bool allow_decimal = false;

    Market load() const {
        if (!in_path.empty()) {
            std::ifstream is(in_path, std::ios::binary);
            if (!is) throw DataError("cannot open '" + in_path + "'");
            return read_market(is, allow_decimal);
        }
        return generate_market(n, k, parse_dist(dist), seed);
    }
};

// adds --n/--k/--dist/--seed and, when file input makes sense, --in
void add_market_flags(CLI::App* cmd, MarketSource& src, bool with_file_input) {
    auto* n_opt = cmd->add_option("--n", src.n, "number of firms");
    cmd->add_option("--k", src.k, "worker surplus (workers = n + k)")->check(CLI::NonNegativeNumber);
    cmd->add_option("--dist", src.dist, "distribution: uniform | exp:RATE | weibull:SHAPE[:SCALE]");
    cmd->add_option("--seed", src.seed, "random stream seed");
    if (with_file_input) {
        auto* in_opt = cmd->add_option("--in", src.in_path, "read a market file instead of generating");
        cmd->add_flag("--allow-decimal", src.allow_decimal,
                      "accept lossy decimal market files (enc dec)");
        in_opt->excludes("--n")->excludes("--k")->excludes("--dist")->excludes("--seed");
        n_opt->check(CLI::PositiveNumber);
    } else {
        n_opt->required()->check(CLI::PositiveNumber);
    }
}

int run_generate(const MarketSource& src, const std::string& out) {
    Market m = src.load();
    std::ostringstream os;
    write_market(m, os);
    write_output(out, os.str());
    return 0;
}

int run_solve(const MarketSource& src, const std::string& allocation, double eps,
              const std::string& out) {
    Market m = src.load();
    MatchResult opt = max_weight_matching(m);
    Allocation a;
    if (allocation == "firm") {
        a = firm_optimal(m, opt);
    } else if (allocation == "worker") {
        a = worker_optimal(m, opt);
    } else {
        a = ck_auction(m, eps);
    }

    // the solver's own result must sit in the core (exactly for the extremes,
    // within the advertised eps slack for the auction)
    CoreTolerances tol = allocation == "auction"
                             ? CoreTolerances{0.0, eps + 1e-9, 1e-12, m.n * eps + 1e-9}
                             : CoreTolerances::uniform(1e-9);
    if (!is_core(m, a, tol, opt.surplus).empty()) {
        throw InternalError("computed allocation failed its own core check");
    }

    double total = 0.0;
    for (double x : a.u) total += x;
    for (double x : a.v) total += x;

    Table t;
    t.header = {"agent", "side", "payoff"};
    for (int f = 0; f < m.n; ++f) {
        t.rows.push_back({"f" + std::to_string(f), std::string("firm"), a.u[f]});
    }
    for (int w = 0; w < m.workers(); ++w) {
        t.rows.push_back({"w" + std::to_string(w), std::string("worker"), a.v[w]});
    }
    t.rows.push_back({std::string("total"), std::string("surplus"), total});
    write_output(out, render_table(t));
    return 0;
}

int run_graph_check(const MarketSource& src, int samples, std::string sizes_text, int pairs,
                    const std::string& out) {
    Market m = src.load();
    MatchResult opt = max_weight_matching(m);
    Allocation alloc = firm_optimal(m, opt);
    PointerGraph g = build_pointer_graph(m, opt.matching);

    std::vector<int> sizes;
    if (sizes_text.empty()) {
        for (int s : {1, 5, 25, m.n / 10}) {
            if (s >= 1 && s <= std::max(m.n / 10, 1)) sizes.push_back(s);
        }
        std::sort(sizes.begin(), sizes.end());
        sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    } else {
        std::istringstream ss(sizes_text);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                sizes.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw DataError("bad set size '" + tok + "'");
            }
        }
    }

    Table t;
    t.header = {"metric", "size", "samples", "failures", "value", "threshold"};
    auto opt_cell = [](std::optional<double> v) -> Cell {
        return v ? Cell(*v) : Cell(std::string());
    };

    ExpansionReport firm_side = check_expansion(g, sizes, samples, src.seed, ExpansionSide::firms);
    for (const ExpansionSizeReport& r : firm_side.rows) {
        const char* metric = r.size == m.n / 10 ? "firm_expansion_large" : "firm_expansion";
        t.rows.push_back({std::string(metric), static_cast<std::int64_t>(r.size),
                          static_cast<std::int64_t>(r.samples), static_cast<std::int64_t>(r.failures),
                          static_cast<double>(r.min_neighbors), r.required});
    }
    if (m.k <= m.n) {
        std::vector<int> worker_sizes;
        for (int s : sizes) {
            if (s < std::max(m.n / 10, 1)) worker_sizes.push_back(s);
        }
        if (!worker_sizes.empty()) {
            ExpansionReport worker_side =
                check_expansion(g, worker_sizes, samples, src.seed + 1, ExpansionSide::workers);
            for (const ExpansionSizeReport& r : worker_side.rows) {
                t.rows.push_back({std::string("worker_expansion"), static_cast<std::int64_t>(r.size),
                                  static_cast<std::int64_t>(r.samples),
                                  static_cast<std::int64_t>(r.failures),
                                  static_cast<double>(r.min_neighbors), r.required});
            }
        }
    }

    if (m.dist.bounded()) {
        double floor_seen = min_pointed_value(g, m);
        double threshold = loss_claim_threshold(m.n, m.dist);
        std::int64_t edges = static_cast<std::int64_t>(g.n) * g.fanout;
        t.rows.push_back({std::string("min_pointed_value"), std::string(), edges,
                          static_cast<std::int64_t>(floor_seen > threshold ? 0 : 1), floor_seen,
                          threshold});

        AuditReport audit = audit_path_inequalities(g, m, alloc, opt.surplus);
        t.rows.push_back({std::string("path_audit_unemployed"), std::string(),
                          static_cast<std::int64_t>(audit.unemployed_checks), std::int64_t{0},
                          opt_cell(audit.worst_unemployed_slack), std::string()});
        t.rows.push_back({std::string("path_audit_two_step"), std::string(),
                          static_cast<std::int64_t>(audit.path_checks),
                          static_cast<std::int64_t>(audit.violations),
                          opt_cell(audit.worst_path_slack), std::string()});
    }

    if (pairs > 0 && m.n > 1) {
        SplitMix64 rng(src.seed + 2);
        long long unreachable = 0;
        int max_seen = 0;
        for (int i = 0; i < pairs; ++i) {
            int from = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m.n)));
            int to = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m.n)));
            std::optional<int> d = firm_path_distance(g, from, to);
            if (d) {
                max_seen = std::max(max_seen, *d);
            } else {
                ++unreachable;
            }
        }
        t.rows.push_back({std::string("path_distance"), std::string(),
                          static_cast<std::int64_t>(pairs), static_cast<std::int64_t>(unreachable),
                          static_cast<double>(max_seen),
                          2.0 * std::log(static_cast<double>(m.n)) - 6.0});
    }

    write_output(out, render_table(t));
    return 0;
}

Table simulate_table(const SimResult& res, const std::vector<int>& n_values) {
    Table t;
    t.header = {"n",  "k",  "trial",         "surplus", "sum_v",   "max_v",          "min_v",
                "mean_v", "du", "dv", "workers_share", "worst_q", "second_worst_q"};
    for (const TrialStats& s : res.rows) {
        t.rows.push_back({static_cast<std::int64_t>(s.n), static_cast<std::int64_t>(s.k),
                          static_cast<std::int64_t>(s.trial), s.surplus, s.sum_v, s.max_v, s.min_v,
                          s.mean_v, s.du, s.dv, s.workers_share, s.worst_q, s.second_worst_q});
    }
    for (int n : n_values) {
        double acc[10] = {};
        std::int64_t count = 0;
        int k = 0;
        for (const TrialStats& s : res.rows) {
            if (s.n != n) continue;
            k = s.k;
            double vals[10] = {s.surplus, s.sum_v,         s.max_v,   s.min_v,          s.mean_v,
                               s.du,      s.dv, s.workers_share, s.worst_q, s.second_worst_q};
            for (int i = 0; i < 10; ++i) acc[i] += vals[i];
            ++count;
        }
        if (count == 0) continue;
        std::vector<Cell> row{static_cast<std::int64_t>(n), static_cast<std::int64_t>(k),
                              std::string("mean")};
        for (int i = 0; i < 10; ++i) row.push_back(acc[i] / count);
        t.rows.push_back(std::move(row));
    }
    return t;
}

int run_simulate(const SimConfig& cfg, const std::string& format, const std::string& out) {
    SimResult res = run_trials(cfg);
    if (!res.errors.empty()) {
        for (const TrialError& e : res.errors) {
            std::cerr << "trial " << e.trial << " at n=" << e.n << " failed: " << e.message << "\n";
        }
        throw InternalError(std::to_string(res.errors.size()) + " trial(s) failed");
    }
    if (format == "svg") {
        Series s;
        s.title = "mean salary sum, " + std::to_string(cfg.trials) + " trials per point";
        s.x_label = "n";
        s.y_label = "mean sum_v";
        for (int n : cfg.n_values) {
            double acc = 0.0;
            int count = 0;
            for (const TrialStats& r : res.rows) {
                if (r.n == n) {
                    acc += r.sum_v;
                    ++count;
                }
            }
            if (count > 0) s.points.emplace_back(n, acc / count);
        }
        write_output(out, render_series(s));
    } else {
        write_output(out, render_table(simulate_table(res, cfg.n_values)));
    }
    return 0;
}

int run_sweep(int workers, const std::vector<int>& firms, const DistributionSpec& dist,
              AllocationRule rule, int trials, std::uint64_t seed, int threads,
              const std::string& format, const std::string& out) {
    std::vector<SweepRow> rows = sweep_firms(workers, firms, dist, rule, trials, seed, threads);
    if (format == "svg") {
        Series s;
        s.title = "workers' share of surplus, " + std::to_string(workers) + " workers";
        s.x_label = "firms";
        s.y_label = "mean workers_share";
        for (const SweepRow& r : rows) s.points.emplace_back(r.firms, r.mean_share);
        write_output(out, render_series(s));
        return 0;
    }
    Table t;
    t.header = {"firms", "workers", "trials", "mean_workers_share", "stderr_workers_share"};
    for (const SweepRow& r : rows) {
        t.rows.push_back({static_cast<std::int64_t>(r.firms), static_cast<std::int64_t>(r.workers),
                          static_cast<std::int64_t>(r.trials), r.mean_share, r.stderr_share});
    }
    write_output(out, render_table(t));
    return 0;
}

int run_histogram(const MarketSource& src, const std::string& allocation, int bins,
                  const std::string& format, const std::string& out) {
    Market m = src.load();
    MatchResult opt = max_weight_matching(m);
    Allocation a = allocation == "firm" ? firm_optimal(m, opt) : worker_optimal(m, opt);
    if (!is_core(m, a, 1e-9, opt.surplus).empty()) {
        throw InternalError("computed allocation failed its own core check");
    }
    Histogram h = salary_histogram(m, a, bins);
    const double width = h.counts.size() > 1 ? (h.hi - h.lo) / static_cast<double>(h.counts.size())
                                             : h.hi - h.lo;
    if (format == "svg") {
        Series s;
        s.title = "salary histogram, n=" + std::to_string(m.n) + " k=" + std::to_string(m.k);
        s.x_label = "salary (bin center)";
        s.y_label = "workers";
        for (std::size_t b = 0; b < h.counts.size(); ++b) {
            double center = width > 0.0 ? h.lo + (b + 0.5) * width : h.lo;
            s.points.emplace_back(center, static_cast<double>(h.counts[b]));
        }
        write_output(out, render_series(s));
        return 0;
    }
    Table t;
    t.header = {"bin_lo", "bin_hi", "count"};
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
        double lo = h.lo + width * static_cast<double>(b);
        double hi = b + 1 == h.counts.size() ? h.hi : h.lo + width * static_cast<double>(b + 1);
        t.rows.push_back({lo, hi, static_cast<std::int64_t>(h.counts[b])});
    }
    write_output(out, render_table(t));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"assignment market toolkit: generation, core allocations, graph audits, sweeps"};
    app.require_subcommand(1);
    app.footer("numbers print with 12 significant digits; csv cells use shortest round-trip form");

    std::string out, format = "csv", allocation = "firm", sizes_text, kr_text;
    std::string sim_dist = "uniform", sweep_dist = "uniform";
    double eps = 1e-4;
    int trials = 400, samples = 1000, pairs = 100, bins = 30, threads = 0, workers = 0;
    int sim_k = 0;
    std::vector<int> n_list, firm_list;
    std::uint64_t sim_seed = kDefaultSeed;

    MarketSource gen_src, solve_src, graph_src, hist_src;

    CLI::App* c_gen = app.add_subcommand("generate", "generate a market and write the market file");
    add_market_flags(c_gen, gen_src, false);
    c_gen->add_option("--out", out, "output path (default stdout)");

    CLI::App* c_solve = app.add_subcommand("solve", "optimal matching plus a core allocation");
    add_market_flags(c_solve, solve_src, true);
    c_solve->add_option("--allocation", allocation, "firm | worker | auction")
        ->check(CLI::IsMember({"firm", "worker", "auction"}));
    CLI::Option* eps_opt = c_solve->add_option("--eps", eps, "auction increment (auction only)")
                               ->check(CLI::PositiveNumber);
    c_solve->add_option("--out", out, "output path (default stdout)");

    CLI::App* c_graph = app.add_subcommand("graph-check", "pointer graph expansion and payoff audits");
    add_market_flags(c_graph, graph_src, false);
    c_graph->add_option("--samples", samples, "sampled sets per size")->check(CLI::PositiveNumber);
    c_graph->add_option("--sizes", sizes_text, "comma separated firm-set sizes (default 1,5,25,n/10)");
    c_graph->add_option("--pairs", pairs, "sampled firm pairs for path distances")
        ->check(CLI::NonNegativeNumber);
    c_graph->add_option("--out", out, "output path (default stdout)");

    CLI::App* c_sim = app.add_subcommand("simulate", "Monte-Carlo trials over one or more sizes");
    c_sim->add_option("--n", n_list, "firm counts, comma separated")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    CLI::Option* k_opt = c_sim->add_option("--k", sim_k, "fixed worker surplus")
                             ->check(CLI::NonNegativeNumber);
    CLI::Option* kr_opt =
        c_sim->add_option("--k-rule", kr_text, "balanced | plus-one | fixed:K | workers:TOTAL");
    k_opt->excludes(kr_opt);
    c_sim->add_option("--dist", sim_dist, "distribution tag");
    c_sim->add_option("--seed", sim_seed, "base seed");
    c_sim->add_option("--trials", trials, "trials per data point")->check(CLI::PositiveNumber);
    c_sim->add_option("--allocation", allocation, "firm | worker")
        ->check(CLI::IsMember({"firm", "worker"}));
    c_sim->add_option("--threads", threads, "worker threads (0 = hardware)");
    c_sim->add_option("--format", format, "csv | svg")->check(CLI::IsMember({"csv", "svg"}));
    c_sim->add_option("--out", out, "output path (default stdout)");

    CLI::App* c_sweep = app.add_subcommand("sweep-firms", "workers' share as the firm count varies");
    c_sweep->add_option("--workers", workers, "fixed total worker count")
        ->required()
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--firms", firm_list, "firm counts, comma separated")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    c_sweep->add_option("--dist", sweep_dist, "distribution tag");
    c_sweep->add_option("--seed", sim_seed, "base seed");
    c_sweep->add_option("--trials", trials, "trials per firm count")->check(CLI::PositiveNumber);
    c_sweep->add_option("--allocation", allocation, "firm | worker")
        ->check(CLI::IsMember({"firm", "worker"}));
    c_sweep->add_option("--threads", threads, "worker threads (0 = hardware)");
    c_sweep->add_option("--format", format, "csv | svg")->check(CLI::IsMember({"csv", "svg"}));
    c_sweep->add_option("--out", out, "output path (default stdout)");

    CLI::App* c_hist = app.add_subcommand("histogram", "salary histogram of one instance");
    add_market_flags(c_hist, hist_src, true);
    c_hist->add_option("--allocation", allocation, "firm | worker")
        ->check(CLI::IsMember({"firm", "worker"}));
    c_hist->add_option("--bins", bins, "bin count")->check(CLI::PositiveNumber);
    c_hist->add_option("--format", format, "csv | svg")->check(CLI::IsMember({"csv", "svg"}));
    c_hist->add_option("--out", out, "output path (default stdout)");

    auto needs_n = [](const MarketSource& src) {
        if (src.in_path.empty() && src.n <= 0) {
            std::cerr << "--n is required when --in is not given\n";
            return true;
        }
        return false;
    };

    try {
        app.parse(argc, argv);

        if (c_gen->parsed()) return run_generate(gen_src, out);
        if (c_solve->parsed()) {
            if (eps_opt->count() > 0 && allocation != "auction") {
                std::cerr << "--eps only applies to --allocation auction\n";
                return 1;
            }
            if (needs_n(solve_src)) return 1;
            return run_solve(solve_src, allocation, eps, out);
        }
        if (c_graph->parsed()) return run_graph_check(graph_src, samples, sizes_text, pairs, out);
        if (c_sim->parsed()) {
            SimConfig cfg;
            cfg.n_values = n_list;
            cfg.k_rule = !kr_text.empty() ? KRuleSpec::parse(kr_text)
                         : k_opt->count() > 0 ? KRuleSpec{KRule::fixed, sim_k}
                                              : KRuleSpec{KRule::balanced, 0};
            cfg.dist = parse_dist(sim_dist);
            cfg.rule = parse_allocation_rule(allocation);
            cfg.trials = trials;
            cfg.base_seed = sim_seed;
            cfg.threads = threads;
            return run_simulate(cfg, format, out);
        }
        if (c_sweep->parsed()) {
            return run_sweep(workers, firm_list, parse_dist(sweep_dist),
                             parse_allocation_rule(allocation), trials, sim_seed, threads, format,
                             out);
        }
        if (c_hist->parsed()) {
            if (needs_n(hist_src)) return 1;
            return run_histogram(hist_src, allocation, bins, format, out);
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
