#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>

#include "graph_internal.hpp"
#include "wcs/graph.hpp"

namespace wcs {

namespace detail {

Decomposition decompose(const UndirectedGraph& g, std::span<const int> order) {
    Decomposition d;
    d.var_cluster.assign(g.size(), -1);
    d.order_pos.assign(g.size(), -1);
    if (order.empty()) {
        d.vars.emplace_back();
        return d;
    }
    for (std::size_t i = 0; i < order.size(); ++i) d.order_pos[static_cast<std::size_t>(order[i])] = static_cast<int>(i);

    auto elim = eliminate(g, order);
    const std::size_t m = order.size();
    std::vector<std::vector<int>> vars(m);
    std::vector<std::set<int>> nbrs(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& clique = elim.cliques[i];
        int next = -1;
        for (std::size_t k = 1; k < clique.size(); ++k) {
            int p = d.order_pos[static_cast<std::size_t>(clique[k])];
            if (next < 0 || p < next) next = p;
        }
        if (next >= 0) {
            nbrs[i].insert(next);
            nbrs[static_cast<std::size_t>(next)].insert(static_cast<int>(i));
        }
        vars[i] = clique;
        std::sort(vars[i].begin(), vars[i].end());
    }

    std::vector<int> alias(m);
    std::iota(alias.begin(), alias.end(), 0);
    std::vector<char> alive(m, 1);
    auto merge_into = [&](int from, int to) {
        for (int x : nbrs[static_cast<std::size_t>(from)]) {
            if (x == to) continue;
            nbrs[static_cast<std::size_t>(x)].erase(from);
            nbrs[static_cast<std::size_t>(x)].insert(to);
            nbrs[static_cast<std::size_t>(to)].insert(x);
        }
        nbrs[static_cast<std::size_t>(to)].erase(from);
        nbrs[static_cast<std::size_t>(from)].clear();
        alive[static_cast<std::size_t>(from)] = 0;
        alias[static_cast<std::size_t>(from)] = to;
    };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t a = 0; a < m && !changed; ++a) {
            if (!alive[a]) continue;
            for (int b : nbrs[a]) {
                const auto& va = vars[a];
                const auto& vb = vars[static_cast<std::size_t>(b)];
                if (std::includes(vb.begin(), vb.end(), va.begin(), va.end())) {
                    merge_into(static_cast<int>(a), b);
                    changed = true;
                    break;
                }
                if (std::includes(va.begin(), va.end(), vb.begin(), vb.end())) {
                    merge_into(b, static_cast<int>(a));
                    changed = true;
                    break;
                }
            }
        }
    }
    auto resolve = [&](int c) {
        while (alias[static_cast<std::size_t>(c)] != c) c = alias[static_cast<std::size_t>(c)];
        return c;
    };

    std::vector<int> renum(m, -1);
    for (std::size_t i = 0; i < m; ++i)
        if (alive[i]) {
            renum[i] = static_cast<int>(d.vars.size());
            d.vars.push_back(vars[i]);
        }
    std::vector<int> comp(d.vars.size(), -1);
    std::vector<std::vector<int>> adj(d.vars.size());
    for (std::size_t i = 0; i < m; ++i) {
        if (!alive[i]) continue;
        for (int j : nbrs[i])
            if (static_cast<int>(i) < j) {
                int a = renum[i], b = renum[static_cast<std::size_t>(j)];
                d.edges.emplace_back(a, b);
                adj[static_cast<std::size_t>(a)].push_back(b);
                adj[static_cast<std::size_t>(b)].push_back(a);
            }
    }
    // Chain disconnected components onto the component of cluster 0.
    int ncomp = 0;
    for (std::size_t s = 0; s < comp.size(); ++s) {
        if (comp[s] >= 0) continue;
        std::vector<int> stack{static_cast<int>(s)};
        comp[s] = ncomp;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y : adj[static_cast<std::size_t>(x)])
                if (comp[static_cast<std::size_t>(y)] < 0) {
                    comp[static_cast<std::size_t>(y)] = ncomp;
                    stack.push_back(y);
                }
        }
        if (ncomp > 0) d.edges.emplace_back(0, static_cast<int>(s));
        ++ncomp;
    }
    for (auto& e : d.edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(d.edges.begin(), d.edges.end());
    for (std::size_t i = 0; i < m; ++i)
        d.var_cluster[static_cast<std::size_t>(order[i])] = renum[static_cast<std::size_t>(resolve(static_cast<int>(i)))];
    return d;
}

}  // namespace detail

int JoinTree::width() const {
    int w = -1;
    for (const auto& c : clusters) w = std::max(w, static_cast<int>(c.size()) - 1);
    return w;
}

std::vector<std::vector<int>> JoinTree::adjacency() const {
    std::vector<std::vector<int>> adj(clusters.size());
    for (auto [a, b] : edges) {
        adj[static_cast<std::size_t>(a)].push_back(b);
        adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& l : adj) std::sort(l.begin(), l.end());
    return adj;
}

std::vector<int> JoinTree::subtree_of(int var) const {
    std::vector<int> out;
    for (std::size_t c = 0; c < slots.size(); ++c)
        if (std::binary_search(slots[c].begin(), slots[c].end(), var)) out.push_back(static_cast<int>(c));
    return out;
}

JoinTree build_join_tree(const Network& net, std::span<const int> conditioned) {
    const std::size_t n = net.size();
    std::vector<char> cond(n, 0);
    for (int v : conditioned) {
        if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("conditioned variable out of range");
        cond[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<int> keep;
    for (std::size_t v = 0; v < n; ++v)
        if (!cond[v]) keep.push_back(static_cast<int>(v));

    auto g = moralize(net);
    auto ord = min_fill_ordering(g, keep);
    auto dec = detail::decompose(g, ord.order);

    JoinTree t;
    t.clusters = std::move(dec.vars);
    t.edges = std::move(dec.edges);
    for (std::size_t v = 0; v < n; ++v)
        if (cond[v]) t.conditioned.push_back(static_cast<int>(v));
    const std::size_t k = t.clusters.size();
    t.attached.assign(k, {});
    t.slots.assign(k, {});
    t.cpt_cluster.assign(n, -1);

    std::vector<std::set<int>> slot_sets(k);
    std::vector<int> deferred;
    for (std::size_t f = 0; f < n; ++f) {
        int first = -1;
        for (int v : net.cpt(static_cast<int>(f)).family()) {
            if (cond[static_cast<std::size_t>(v)]) continue;
            if (first < 0 || dec.order_pos[static_cast<std::size_t>(v)] < dec.order_pos[static_cast<std::size_t>(first)]) first = v;
        }
        if (first < 0) {
            deferred.push_back(static_cast<int>(f));
            continue;
        }
        int c = dec.var_cluster[static_cast<std::size_t>(first)];
        t.cpt_cluster[f] = c;
        for (int v : net.cpt(static_cast<int>(f)).family())
            if (cond[static_cast<std::size_t>(v)]) slot_sets[static_cast<std::size_t>(c)].insert(v);
    }
    // CPTs over conditioned variables only: place them where their variables
    // already have slots.
    for (int f : deferred) {
        auto fam = net.cpt(f).family();
        int best = 0, best_hits = -1;
        for (std::size_t c = 0; c < k; ++c) {
            int hits = 0;
            for (int v : fam) hits += static_cast<int>(slot_sets[c].count(v));
            if (hits > best_hits) {
                best_hits = hits;
                best = static_cast<int>(c);
            }
        }
        t.cpt_cluster[static_cast<std::size_t>(f)] = best;
        for (int v : fam) slot_sets[static_cast<std::size_t>(best)].insert(v);
    }
    for (std::size_t f = 0; f < n; ++f) t.attached[static_cast<std::size_t>(t.cpt_cluster[f])].push_back(static_cast<int>(f));

    // Close every conditioned variable's clusters over tree paths.
    auto adj = t.adjacency();
    std::vector<int> parent(k, -1), bfs;
    {
        std::vector<char> seen(k, 0);
        bfs.push_back(0);
        seen[0] = 1;
        for (std::size_t h = 0; h < bfs.size(); ++h) {
            int x = bfs[h];
            for (int y : adj[static_cast<std::size_t>(x)])
                if (!seen[static_cast<std::size_t>(y)]) {
                    seen[static_cast<std::size_t>(y)] = 1;
                    parent[static_cast<std::size_t>(y)] = x;
                    bfs.push_back(y);
                }
        }
    }
    for (int v : t.conditioned) {
        std::vector<int> below(k, 0);
        for (std::size_t c = 0; c < k; ++c) below[c] = static_cast<int>(slot_sets[c].count(v));
        int total = std::accumulate(below.begin(), below.end(), 0);
        if (total == 0) continue;
        std::vector<int> dirs(k, 0);
        for (std::size_t h = bfs.size(); h-- > 1;) {
            int x = bfs[h];
            int p = parent[static_cast<std::size_t>(x)];
            if (below[static_cast<std::size_t>(x)] > 0) ++dirs[static_cast<std::size_t>(p)];
            below[static_cast<std::size_t>(p)] += below[static_cast<std::size_t>(x)];
        }
        for (std::size_t c = 0; c < k; ++c) {
            int d = dirs[c] + (total - below[c] > 0 ? 1 : 0);
            if (slot_sets[c].count(v) || d >= 2) slot_sets[c].insert(v);
        }
    }
    for (std::size_t c = 0; c < k; ++c) t.slots[c].assign(slot_sets[c].begin(), slot_sets[c].end());
    for (int v : t.conditioned) t.delta = std::max(t.delta, static_cast<int>(t.subtree_of(v).size()));

    for (auto [a, b] : t.edges) {
        std::vector<int> sep;
        const auto& ca = t.clusters[static_cast<std::size_t>(a)];
        const auto& cb = t.clusters[static_cast<std::size_t>(b)];
        std::set_intersection(ca.begin(), ca.end(), cb.begin(), cb.end(), std::back_inserter(sep));
        t.separators.push_back(std::move(sep));
    }
    return t;
}

}  // namespace wcs
