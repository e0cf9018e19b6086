// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>

#include "support/fixtures.hpp"
#include "wcs/cli.hpp"
#include "wcs/exact.hpp"
#include "wcs/generators.hpp"
#include "wcs/graph.hpp"
#include "wcs/io.hpp"
#include "wcs/metrics.hpp"
#include "wcs/propagation.hpp"
#include "wcs/sampling.hpp"

using namespace wcs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// ------------------------------------------------------------- oracles

// Underlying undirected graph of the DAG minus `removed` is a forest.
bool forest_without(const Network& net, const std::vector<int>& removed) {
    std::vector<char> gone(net.size(), 0);
    for (int v : removed) gone[static_cast<std::size_t>(v)] = 1;
    std::vector<int> root(net.size());
    std::iota(root.begin(), root.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (root[static_cast<std::size_t>(x)] != x) x = root[static_cast<std::size_t>(x)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(x)])];
        return x;
    };
    for (std::size_t x = 0; x < net.size(); ++x) {
        if (gone[x]) continue;
        for (int u : net.parents(static_cast<int>(x))) {
            if (gone[static_cast<std::size_t>(u)]) continue;
            int a = find(static_cast<int>(x)), b = find(u);
            if (a == b) return false;
            root[static_cast<std::size_t>(a)] = b;
        }
    }
    return true;
}

// Width of eliminating `order` in the moral graph restricted to the
// vertices of `order`; -1 when `order` is not exactly V minus `removed`.
int elimination_width(const Network& net, const std::vector<int>& removed, const std::vector<int>& order) {
    const std::size_t n = net.size();
    std::vector<std::set<int>> adj(n);
    auto link = [&](int a, int b) {
        if (a == b) return;
        adj[static_cast<std::size_t>(a)].insert(b);
        adj[static_cast<std::size_t>(b)].insert(a);
    };
    for (std::size_t x = 0; x < n; ++x) {
        const auto& pa = net.parents(static_cast<int>(x));
        for (std::size_t i = 0; i < pa.size(); ++i) {
            link(static_cast<int>(x), pa[i]);
            for (std::size_t j = i + 1; j < pa.size(); ++j) link(pa[i], pa[j]);
        }
    }
    std::vector<char> alive(n, 1);
    for (int v : removed) alive[static_cast<std::size_t>(v)] = 0;
    std::set<int> expect, got(order.begin(), order.end());
    for (std::size_t v = 0; v < n; ++v)
        if (alive[v]) expect.insert(static_cast<int>(v));
    if (expect != got || got.size() != order.size()) return -1;
    int width = 0;
    for (int v : order) {
        std::vector<int> nb;
        for (int u : adj[static_cast<std::size_t>(v)])
            if (alive[static_cast<std::size_t>(u)]) nb.push_back(u);
        width = std::max(width, static_cast<int>(nb.size()));
        for (std::size_t i = 0; i < nb.size(); ++i)
            for (std::size_t j = i + 1; j < nb.size(); ++j) link(nb[i], nb[j]);
        alive[static_cast<std::size_t>(v)] = 0;
    }
    return width;
}

std::vector<int> with_evidence(std::vector<int> c, const Evidence& e) {
    for (int v : e.variables()) c.push_back(v);
    return c;
}

// Mean cross-chain variance over unobserved (variable, state) pairs.
double cross_chain_variance(const std::vector<Marginals>& per_chain, const Evidence& e) {
    auto st = batch_means_ci(per_chain, 0.1, e);
    double s = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < st.variance.size(); ++i) {
        if (e.contains(static_cast<int>(i))) continue;
        for (double v : st.variance[i]) {
            s += v;
            ++n;
        }
    }
    return n ? s / n : 0.0;
}

// ------------------------------------------------------------- criteria

Outcome exactness_ladder() {
    Outcome o;
    double worst = 0.0;
    int nets = 0, runs = 0;
    for (std::uint64_t s = 1; s <= 200; ++s) {
        const int n = 8 + static_cast<int>(s % 9);
        auto net = fx::random_dag(n, 2 + static_cast<int>(s % 3), s + 7000, 2, s % 4 == 0 ? 0.15 : 0.0);
        auto e = fx::random_evidence(net, static_cast<int>(s % 5), s);
        auto bf = brute_force_posteriors(net, e);
        auto jt = jtc_posteriors(net, e);
        worst = std::max(worst, fx::max_abs_diff(bf, jt));
        std::vector<Cutset> cutsets{find_loop_cutset(net, e)};
        for (int w = 1; w <= 3; ++w) cutsets.push_back(find_w_cutset(net, e, w));
        for (auto& c : nested_w_cutsets(net, e, 1, 3)) cutsets.push_back(c);
        for (const auto& c : cutsets) {
            auto cc = cutset_conditioning(net, e, c);
            worst = std::max({worst, fx::max_abs_diff(cc, bf), fx::max_abs_diff(cc, jt)});
            ++runs;
        }
        ++nets;
    }
    o.pass = worst <= 1e-9;
    o.detail = std::to_string(nets) + " networks, " + std::to_string(runs) + " conditioning runs, max diff " +
               fmt(worst) + " (tol 1e-9)";
    return o;
}

Outcome polytree_bp() {
    Outcome o;
    double worst = 0.0;
    int late = 0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        auto net = fx::random_polytree(10 + static_cast<int>(s % 15), s + 100, 3);
        auto e = fx::random_evidence(net, static_cast<int>(s % 4), s);
        IbpOptions opts;
        opts.max_iters = 200;
        auto r = ibp_posteriors(net, e, opts);
        worst = std::max(worst, fx::max_abs_diff(r.marginals, jtc_posteriors(net, e)));
        if (!r.converged || r.iterations > fx::diameter(net) + 1) ++late;
    }
    o.pass = worst <= 1e-9 && late == 0;
    o.detail = "100 polytrees, max diff " + fmt(worst) + " (tol 1e-9), " + std::to_string(late) +
               " runs over diameter + 1 iterations";
    return o;
}

Outcome cutset_validity() {
    Outcome o;
    int loops_bad = 0, w_bad = 0, w_runs = 0, chains = 0, chain_bad = 0;
    for (std::uint64_t s = 1; s <= 100; ++s) {
        auto net = fx::random_dag(15 + static_cast<int>(s % 10), 3, s + 1000, 2 + static_cast<int>(s % 2));
        auto e = fx::random_evidence(net, static_cast<int>(s % 4), s);
        auto loop = find_loop_cutset(net, e);
        if (!forest_without(net, with_evidence(loop.members, e))) ++loops_bad;
        for (int w = 1; w <= 4; ++w) {
            auto c = find_w_cutset(net, e, w);
            int width = elimination_width(net, with_evidence(c.members, e), c.ordering.order);
            if (width < 0 || width > w) ++w_bad;
            ++w_runs;
        }
        auto chain = nested_w_cutsets(net, e, 1, 4);
        ++chains;
        bool ok = true;
        for (std::size_t k = 0; k < chain.size(); ++k) {
            const auto& c = chain[k];
            int width = elimination_width(net, with_evidence(c.members, e), c.ordering.order);
            ok = ok && width >= 0 && width <= static_cast<int>(k + 1);
            if (k == 0) continue;
            const auto& big = chain[k - 1].members;
            bool subset = std::includes(big.begin(), big.end(), c.members.begin(), c.members.end());
            bool strict = c.members.size() < big.size() || big.empty();
            ok = ok && subset && strict;
        }
        if (!ok) ++chain_bad;
    }
    o.pass = loops_bad == 0 && w_bad == 0 && chain_bad == 0;
    o.detail = "loop-cutsets invalid " + std::to_string(loops_bad) + "/100, w-cutsets over width " +
               std::to_string(w_bad) + "/" + std::to_string(w_runs) + ", nested chains not strict " +
               std::to_string(chain_bad) + "/" + std::to_string(chains);
    return o;
}

struct DeskCase {
    std::string name;
    Network net;
    Evidence e;
};

std::vector<DeskCase> desk_suite() {
    std::vector<DeskCase> out;
    for (std::uint64_t s = 1; s <= 5; ++s) {
        auto net = fx::random_dag(14, 3, s + 60, 3);
        auto e = fx::random_evidence(net, 2, s);
        out.push_back({"dag" + std::to_string(s), net, e});
    }
    for (std::uint64_t s = 1; s <= 2; ++s) {
        GenSpec g;
        g.seed = s;
        g.n_root = 8;
        g.n_total = 20;
        auto net = gen_multipartite(g);
        out.push_back({"multipartite" + std::to_string(s), net, pick_evidence(net, EvidencePolicy::leaves, 3, s)});
        g.family = Family::two_layer;
        g.roots = 8;
        g.leaves = 12;
        net = gen_two_layer(g);
        out.push_back({"two-layer" + std::to_string(s), net, pick_evidence(net, EvidencePolicy::leaves, 4, s)});
        g.family = Family::grid;
        g.rows = 4;
        g.cols = 5;
        net = gen_grid(g);
        out.push_back({"grid" + std::to_string(s), net, pick_evidence(net, EvidencePolicy::any, 3, s)});
        g.family = Family::coding;
        g.code_bits = 8;
        auto inst = gen_coding(g);
        out.push_back({"coding" + std::to_string(s), inst.net, inst.evidence});
    }
    return out;
}

Outcome incremental_equivalence() {
    Outcome o;
    double worst = 0.0;
    int diverged = 0, runs = 0;
    for (const auto& dc : desk_suite()) {
        for (int mode = 0; mode < 2; ++mode) {
            auto c = mode == 0 ? find_loop_cutset(dc.net, dc.e) : find_w_cutset(dc.net, dc.e, 2);
            if (c.members.empty()) continue;
            auto layout = fx::layout_for(dc.net, c, dc.e);
            auto order = order_cutset_members(*layout, c.members);
            Stream init(runs + 1, 0);
            Assignment x;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                x = initialize_chain(dc.net, dc.e, order, InitMode::uniform, init);
                CutsetChain probe(layout, order, x, true);
                if (std::isfinite(probe.log_weight())) break;
            }
            CutsetChain inc(layout, order, x, true), naive(layout, order, x, false);
            Stream sa(runs + 1, 1), sb(runs + 1, 1);
            bool same = true;
            for (int t = 0; t < 100; ++t) {
                auto da = inc.scan([&](int, std::span<const double> p) { return sa.discrete(p); });
                auto db = naive.scan([&](int, std::span<const double> p) { return sb.discrete(p); });
                for (std::size_t k = 0; k < da.size(); ++k) {
                    if (da[k].size() != db[k].size()) {
                        same = false;
                        continue;
                    }
                    for (std::size_t j = 0; j < da[k].size(); ++j)
                        worst = std::max(worst, std::abs(da[k][j] - db[k][j]));
                }
                for (int m : order) same = same && inc.value(m) == naive.value(m);
                if (t % 5 == 0) {
                    auto pa = inc.posteriors(), pb = naive.posteriors();
                    for (std::size_t i = 0; i < pa.size(); ++i)
                        for (std::size_t j = 0; j < pa[i].size(); ++j)
                            worst = std::max(worst, std::abs(pa[i][j] - pb[i][j]));
                }
            }
            if (!same) ++diverged;
            ++runs;
        }
    }

    // Seven-node example: B is resampled and flips, D is evaluated at its
    // other value and stays, then the final pass gives the posteriors.
    auto net = fx::seven_node();
    Evidence e;
    e.bindings[4] = 1;
    auto c = certify_cutset(net, e, {1, 3}, CutsetKind::w_bounded);
    auto layout = fx::layout_for(net, c, e);
    auto order = order_cutset_members(*layout, c.members);
    Assignment x = e.as_assignment(net.size());
    x[1] = 0;
    x[3] = 0;
    CutsetChain chain(layout, order, x, true);
    chain.engine().calibrate();
    std::set<std::uint64_t> counts;
    for (int rep = 0; rep < 6; ++rep) {
        auto before = chain.messages_computed();
        const int b = rep % 2 == 0 ? 1 : 0;
        chain.scan([&](int v, std::span<const double>) { return v == 1 ? b : 0; });
        chain.posteriors();
        counts.insert(chain.messages_computed() - before);
    }
    const bool five = counts == std::set<std::uint64_t>{5};
    o.pass = worst <= 1e-12 && diverged == 0 && runs > 0 && five;
    o.detail = std::to_string(runs) + " chains over the desk suite, max diff " + fmt(worst) +
               " (tol 1e-12), diverged trajectories " + std::to_string(diverged) + ", seven-node messages per sample " +
               (counts.size() == 1 ? std::to_string(*counts.begin()) : std::string("varies"));
    return o;
}

Outcome sampler_convergence() {
    Outcome o;
    auto net = fx::random_dag(10, 3, 5005);
    auto e = fx::random_evidence(net, 3, 5005);
    auto exact = jtc_posteriors(net, e);
    SamplingConfig cfg;
    cfg.chains = 20;
    cfg.samples = 5000;
    cfg.seed = 17;
    auto g = gibbs_run(net, e, cfg);
    double ge = avg_abs_error(exact, g.pooled, e);
    cfg.samples = 2000;
    auto cut = find_loop_cutset(net, e);
    auto c = cutset_gibbs_run(net, e, cut, cfg);
    double ce = avg_abs_error(exact, c.pooled, e);
    o.pass = ge < 0.01 && ce < 0.01;
    o.detail = "Gibbs M=20 T=5000 error " + fmt(ge) + ", loop-cutset (" + std::to_string(cut.members.size()) +
               " members) T=2000 error " + fmt(ce) + " (threshold 0.01)";
    return o;
}

struct Paired {
    Network net;
    Evidence e;
    Marginals exact;
    Cutset cutset;
};

std::vector<Paired> loopy_networks() {
    std::vector<Paired> out;
    for (std::uint64_t s = 1; out.size() < 10; ++s) {
        auto net = fx::random_dag(20, 3, s + 300);
        auto e = fx::random_evidence(net, 4, s + 300);
        auto c = find_loop_cutset(net, e);
        if (c.members.empty()) continue;
        out.push_back({net, e, jtc_posteriors(net, e), c});
    }
    return out;
}

Outcome rao_blackwell() {
    Outcome o;
    int mse_wins = 0, var_wins = 0;
    std::uint64_t seed = 0;
    for (const auto& p : loopy_networks()) {
        SamplingConfig cfg;
        cfg.chains = 10;
        cfg.samples = 300;
        cfg.seed = ++seed;
        auto g = gibbs_run(p.net, p.e, cfg);
        auto c = cutset_gibbs_run(p.net, p.e, p.cutset, cfg);
        if (mse(p.exact, c.pooled, p.e) <= mse(p.exact, g.pooled, p.e)) ++mse_wins;
        if (cross_chain_variance(c.per_chain, p.e) < cross_chain_variance(g.per_chain, p.e)) ++var_wins;
    }
    o.pass = mse_wins >= 8 && var_wins >= 8;
    o.detail = "cutset MSE <= Gibbs MSE in " + std::to_string(mse_wins) + "/10, lower cross-chain variance in " +
               std::to_string(var_wins) + "/10 (need 8)";
    return o;
}

Outcome mixture_estimator() {
    Outcome o;
    int gibbs_wins = 0, cutset_wins = 0;
    std::uint64_t seed = 100;
    for (const auto& p : loopy_networks()) {
        SamplingConfig cfg;
        cfg.chains = 10;
        cfg.samples = 300;
        cfg.seed = ++seed;
        auto g = gibbs_run(p.net, p.e, cfg);
        if (mse(p.exact, g.pooled_mixture, p.e) <= mse(p.exact, g.pooled_histogram, p.e)) ++gibbs_wins;
        // Cutset members only: the histogram of the other variables is their
        // mixture estimate.
        auto c = cutset_gibbs_run(p.net, p.e, p.cutset, cfg);
        Evidence others = p.e;
        std::set<int> members(p.cutset.members.begin(), p.cutset.members.end());
        for (std::size_t i = 0; i < p.net.size(); ++i)
            if (!members.count(static_cast<int>(i))) others.bindings[static_cast<int>(i)] = 0;
        if (mse(p.exact, c.pooled_mixture, others) <= mse(p.exact, c.pooled_histogram, others)) ++cutset_wins;
    }
    o.pass = gibbs_wins >= 8 && cutset_wins >= 8;
    o.detail = "mixture MSE <= histogram MSE in " + std::to_string(gibbs_wins) + "/10 Gibbs runs and " +
               std::to_string(cutset_wins) + "/10 cutset runs (need 8)";
    return o;
}

Outcome non_ergodicity() {
    Outcome o;
    GenSpec spec;
    spec.family = Family::coding;
    spec.code_bits = 10;
    spec.seed = 8;
    auto inst = gen_coding(spec);
    auto exact = jtc_posteriors(inst.net, inst.evidence);
    auto cut = find_loop_cutset(inst.net, inst.evidence);
    const std::vector<int> checkpoints{200, 632, 2000};
    std::vector<double> gibbs, cutset;
    bool frozen = true;
    for (int t : checkpoints) {
        SamplingConfig cfg;
        cfg.chains = 10;
        cfg.samples = t;
        cfg.seed = 23;
        auto g = gibbs_run(inst.net, inst.evidence, cfg);
        frozen = frozen && !g.frozen.empty();
        gibbs.push_back(avg_abs_error(exact, g.pooled, inst.evidence));
        auto c = cutset_gibbs_run(inst.net, inst.evidence, cut, cfg);
        cutset.push_back(avg_abs_error(exact, c.pooled, inst.evidence));
    }
    bool gibbs_stuck = std::all_of(gibbs.begin(), gibbs.end(), [](double v) { return v > 0.05; });
    bool decreasing = cutset[1] < cutset[0] && cutset[2] < cutset[1];
    o.pass = gibbs_stuck && decreasing && cutset.back() < 0.02;
    std::string g = fmt(gibbs[0]) + "/" + fmt(gibbs[1]) + "/" + fmt(gibbs[2]);
    std::string c = fmt(cutset[0]) + "/" + fmt(cutset[1]) + "/" + fmt(cutset[2]);
    o.detail = "K=10 coding, T=200/632/2000: Gibbs error " + g + (frozen ? " (frozen variables)" : "") +
               ", loop-cutset (" + std::to_string(cut.members.size()) + " members) error " + c;
    return o;
}

Outcome confidence_intervals() {
    Outcome o;
    int covered = 0;
    // Desk runs rotate over the generated benchmark families.
    for (std::uint64_t s = 1; s <= 20; ++s) {
        GenSpec g;
        g.seed = s;
        Network net;
        Evidence e;
        int w = 0;
        if (s % 3 == 0) {
            g.n_root = 12;
            g.n_total = 30;
            net = gen_multipartite(g);
            e = pick_evidence(net, EvidencePolicy::leaves, 5, s);
        } else if (s % 3 == 1) {
            g.family = Family::two_layer;
            g.roots = 12;
            g.leaves = 20;
            net = gen_two_layer(g);
            e = pick_evidence(net, EvidencePolicy::leaves, 6, s);
            w = 2;
        } else {
            g.family = Family::grid;
            g.rows = 5;
            g.cols = 6;
            net = gen_grid(g);
            e = pick_evidence(net, EvidencePolicy::any, 4, s);
        }
        auto exact = jtc_posteriors(net, e);
        SamplingConfig cfg;
        cfg.chains = 10;
        cfg.samples = 500;
        cfg.seed = s;
        auto cut = w ? find_w_cutset(net, e, w) : find_loop_cutset(net, e);
        auto r = cutset_gibbs_run(net, e, cut, cfg);
        auto st = batch_means_ci(r.per_chain, 0.1, e);
        if (avg_abs_error(exact, r.pooled, e) <= st.mean_half_width) ++covered;
    }

    std::mt19937_64 rng(2024);
    std::normal_distribution<double> noise(0.0, 0.05);
    int hits = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<Marginals> chains(10);
        for (auto& m : chains) {
            double x = 0.5 + noise(rng);
            m.probs = {{x, 1.0 - x}};
        }
        auto st = batch_means_ci(chains, 0.1);
        if (std::abs(st.mean.probs[0][0] - 0.5) <= st.half_width[0][0]) ++hits;
    }
    const double coverage = static_cast<double>(hits) / reps;
    o.pass = covered >= 17 && coverage >= 0.85 && coverage <= 0.95;
    o.detail = "delta <= delta_0.9 in " + std::to_string(covered) + "/20 runs (need 17), synthetic 90% coverage " +
               fmt(coverage) + " (need [0.85, 0.95])";
    return o;
}

Outcome determinism() {
    Outcome o;
    auto root = fs::temp_directory_path() / ("wcs_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    auto dir = [&](const std::string& n) { return (root / n).string(); };
    std::ostringstream sink;
    auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };

    std::vector<std::pair<std::string, std::vector<std::string>>> commands;
    commands.push_back({"gen_grid", {"generate", "--family", "grid", "--rows", "4", "--cols", "5", "--seed", "3"}});
    commands.push_back({"gen_mp", {"generate", "--family", "multipartite", "--n-root", "8", "--n-total", "16",
                                   "--evidence-count", "3", "--seed", "4"}});
    commands.push_back({"gen_coding", {"generate", "--family", "coding", "--code-bits", "6", "--seed", "5"}});
    commands.push_back({"gen_two", {"generate", "--family", "two-layer", "--roots", "6", "--leaves", "10",
                                    "--evidence-count", "2", "--seed", "6"}});
    int failures = 0, checked = 0;
    auto compare = [&](const std::string& a, const std::string& b) {
        std::vector<std::string> fa;
        for (auto& f : fs::recursive_directory_iterator(a)) {
            auto name = f.path().filename().string();
            if (!f.is_regular_file() || name == "manifest.json" || name == "timing.json") continue;
            fa.push_back(fs::relative(f.path(), a).string());
        }
        if (fa.empty()) ++failures;
        for (auto& f : fa) {
            ++checked;
            auto pb = fs::path(b) / f;
            if (!fs::exists(pb) || read_file((fs::path(a) / f).string()) != read_file(pb.string())) ++failures;
        }
    };
    for (auto& [name, args] : commands) {
        args.push_back("--out=" + dir(name));
        if (run(args) != 0) ++failures;
    }
    const std::string mp = dir("gen_mp") + "/network.json", mpe = dir("gen_mp") + "/evidence.json";
    const std::string cd = dir("gen_coding") + "/network.json", cde = dir("gen_coding") + "/evidence.json";
    std::vector<std::pair<std::string, std::vector<std::string>>> more;
    more.push_back({"cut_loop", {"cutset", "--net", mp, "--evidence", mpe}});
    more.push_back({"cut_nested", {"cutset", "--net", mp, "--evidence", mpe, "--mode", "w", "--w", "3", "--nested"}});
    more.push_back({"inf_exact", {"infer", "--net", mp, "--evidence", mpe}});
    more.push_back({"inf_ibp", {"infer", "--net", mp, "--evidence", mpe, "--method", "ibp"}});
    more.push_back({"inf_cc", {"infer", "--net", cd, "--evidence", cde, "--method", "cutset-cond"}});
    for (const char* m : {"gibbs", "cutset", "lw", "aisbn"})
        more.push_back({std::string("smp_") + m,
                        {"sample", "--net", mp, "--evidence", mpe, "--method", m, "--chains", "4", "--samples", "400",
                         "--seed", "9", "--threads", "2", "--update-interval", "100", "--max-updates", "2",
                         "--exact-ref", dir("inf_exact") + "/marginals.csv"}});
    for (auto& [name, args] : more) {
        args.push_back("--out=" + dir(name));
        if (run(args) != 0) ++failures;
        commands.push_back({name, args});
    }
    nlohmann::json suite = nlohmann::json::array();
    suite.push_back({{"net", mp}, {"evidence", mpe}, {"method", "gibbs"}, {"chains", 3}, {"samples", 200}});
    for (int w = 1; w <= 2; ++w)
        suite.push_back({{"net", mp}, {"evidence", mpe}, {"method", "cutset"}, {"cutset-mode", "w"}, {"w", w},
                         {"nested", true}, {"chains", 3}, {"samples", 200}});
    suite.push_back({{"net", cd}, {"evidence", cde}, {"method", "gibbs"}, {"chains", 3}, {"samples", 200}});
    write_file(dir("suite.json"), suite.dump());
    if (run({"benchmark", "--suite", dir("suite.json"), "--out=" + dir("bench")}) != 0) ++failures;
    commands.push_back({"bench", {}});

    for (const auto& [name, args] : commands) {
        if (run({"replay", "--manifest", dir(name) + "/manifest.json", "--out", dir(name + "_replay")}) != 0) {
            ++failures;
            continue;
        }
        compare(dir(name), dir(name + "_replay"));
    }
    fs::remove_all(root);
    o.pass = failures == 0;
    o.detail = std::to_string(commands.size()) + " command runs replayed from their manifests, " +
               std::to_string(checked) + " output files compared, " + std::to_string(failures) + " mismatches";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"exactness ladder", exactness_ladder},
        {"polytree BP exactness", polytree_bp},
        {"cutset validity", cutset_validity},
        {"incremental equivalence", incremental_equivalence},
        {"sampler convergence", sampler_convergence},
        {"Rao-Blackwell variance reduction", rao_blackwell},
        {"mixture estimator", mixture_estimator},
        {"Gibbs non-ergodicity on coding networks", non_ergodicity},
        {"confidence intervals", confidence_intervals},
        {"CLI determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failed;
        std::printf("criterion %zu %s %s: %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
