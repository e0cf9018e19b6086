#include "wcs/graph.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "bitset.hpp"
#include "graph_internal.hpp"

namespace wcs {

using detail::Bits;

void UndirectedGraph::add_edge(int u, int v) {
    if (u == v) return;
    auto insert = [](std::vector<int>& list, int x) {
        auto it = std::lower_bound(list.begin(), list.end(), x);
        if (it == list.end() || *it != x) list.insert(it, x);
    };
    insert(adj_[static_cast<std::size_t>(u)], v);
    insert(adj_[static_cast<std::size_t>(v)], u);
}

bool UndirectedGraph::has_edge(int u, int v) const {
    const auto& l = neighbors(u);
    return std::binary_search(l.begin(), l.end(), v);
}

std::size_t UndirectedGraph::edge_count() const {
    std::size_t s = 0;
    for (const auto& l : adj_) s += l.size();
    return s / 2;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t u = 0; u < adj_.size(); ++u)
        for (int v : adj_[u])
            if (static_cast<int>(u) < v) out.emplace_back(static_cast<int>(u), v);
    return out;
}

UndirectedGraph UndirectedGraph::without(std::span<const int> removed) const {
    std::vector<char> gone(adj_.size(), 0);
    for (int r : removed) gone[static_cast<std::size_t>(r)] = 1;
    UndirectedGraph g(adj_.size());
    for (auto [u, v] : edges())
        if (!gone[static_cast<std::size_t>(u)] && !gone[static_cast<std::size_t>(v)]) g.add_edge(u, v);
    return g;
}

UndirectedGraph moralize(const Network& net) {
    UndirectedGraph g(net.size());
    for (const auto& c : net.cpts()) {
        for (std::size_t a = 0; a < c.parents.size(); ++a) {
            g.add_edge(c.child, c.parents[a]);
            for (std::size_t b = a + 1; b < c.parents.size(); ++b) g.add_edge(c.parents[a], c.parents[b]);
        }
    }
    return g;
}

namespace detail {

std::vector<Bits> adjacency_bits(const UndirectedGraph& g) {
    std::vector<Bits> rows(g.size(), Bits(g.size()));
    for (std::size_t u = 0; u < g.size(); ++u)
        for (int v : g.neighbors(static_cast<int>(u))) rows[u].set(v);
    return rows;
}

EliminationResult eliminate(const UndirectedGraph& g, std::span<const int> order) {
    const std::size_t n = g.size();
    auto adj = adjacency_bits(g);
    Bits alive(n);
    for (int v : order) alive.set(v);
    EliminationResult res;
    res.cliques.reserve(order.size());
    for (int v : order) {
        Bits nb = adj[static_cast<std::size_t>(v)] & alive;
        nb.reset(v);
        std::vector<int> clique{v};
        nb.for_each([&](int u) { clique.push_back(u); });
        res.width = std::max(res.width, static_cast<int>(clique.size()) - 1);
        for (std::size_t a = 1; a < clique.size(); ++a) {
            auto& row = adj[static_cast<std::size_t>(clique[a])];
            row |= nb;
            row.reset(clique[a]);
        }
        alive.reset(v);
        res.cliques.push_back(std::move(clique));
    }
    return res;
}

}  // namespace detail

Ordering min_fill_ordering(const UndirectedGraph& g) {
    std::vector<int> all(g.size());
    std::iota(all.begin(), all.end(), 0);
    return min_fill_ordering(g, all);
}

Ordering min_fill_ordering(const UndirectedGraph& g, std::span<const int> nodes) {
    const std::size_t n = g.size();
    auto adj = detail::adjacency_bits(g);
    Bits alive(n);
    for (int v : nodes) alive.set(v);
    std::vector<int> live(nodes.begin(), nodes.end());
    std::sort(live.begin(), live.end());
    live.erase(std::unique(live.begin(), live.end()), live.end());

    Ordering ord;
    ord.order.reserve(live.size());
    while (!live.empty()) {
        std::size_t best_pos = 0;
        long best_fill = std::numeric_limits<long>::max();
        for (std::size_t p = 0; p < live.size(); ++p) {
            int v = live[p];
            Bits nb = adj[static_cast<std::size_t>(v)] & alive;
            long missing = 0;
            nb.for_each([&](int u) {
                const auto& ru = adj[static_cast<std::size_t>(u)];
                for (std::size_t k = 0; k < nb.words(); ++k) missing += std::popcount(nb.word(k) & ~ru.word(k));
                missing -= 1;  // u itself
            });
            long fill = missing / 2;
            if (fill < best_fill) {
                best_fill = fill;
                best_pos = p;
                if (fill == 0) break;
            }
        }
        int v = live[best_pos];
        Bits nb = adj[static_cast<std::size_t>(v)] & alive;
        ord.width = std::max(ord.width, nb.count());
        nb.for_each([&](int u) {
            auto& row = adj[static_cast<std::size_t>(u)];
            row |= nb;
            row.reset(u);
        });
        alive.reset(v);
        live.erase(live.begin() + static_cast<std::ptrdiff_t>(best_pos));
        ord.order.push_back(v);
    }
    return ord;
}

int induced_width(const UndirectedGraph& g, std::span<const int> order) {
    return detail::eliminate(g, order).width;
}

int adjusted_induced_width(const UndirectedGraph& g, std::span<const int> removed) {
    std::vector<char> gone(g.size(), 0);
    for (int r : removed) gone[static_cast<std::size_t>(r)] = 1;
    std::vector<int> keep;
    for (std::size_t v = 0; v < g.size(); ++v)
        if (!gone[v]) keep.push_back(static_cast<int>(v));
    return min_fill_ordering(g, keep).width;
}

bool Cutset::contains(int v) const { return std::binary_search(members.begin(), members.end(), v); }

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

std::vector<char> mask_of(std::size_t n, std::span<const int> vars) {
    std::vector<char> m(n, 0);
    for (int v : vars) m[static_cast<std::size_t>(v)] = 1;
    return m;
}

// Residual factor scopes: each CPT family minus the removed variables.
std::vector<std::vector<int>> residual_scopes(const Network& net, const std::vector<char>& removed) {
    std::vector<std::vector<int>> scopes(net.size());
    for (std::size_t f = 0; f < net.size(); ++f)
        for (int v : net.cpt(static_cast<int>(f)).family())
            if (!removed[static_cast<std::size_t>(v)]) scopes[f].push_back(v);
    return scopes;
}

bool factor_graph_acyclic(const Network& net, const std::vector<char>& removed) {
    const std::size_t n = net.size();
    UnionFind uf(2 * n);
    auto scopes = residual_scopes(net, removed);
    for (std::size_t f = 0; f < n; ++f)
        for (int v : scopes[f])
            if (!uf.unite(static_cast<int>(n + f), v)) return false;
    return true;
}

std::vector<int> sorted_union(std::vector<int> a, std::span<const int> b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace

bool conditioned_is_singly_connected(const Network& net, std::span<const int> removed) {
    return factor_graph_acyclic(net, mask_of(net.size(), removed));
}

bool directed_minus_is_forest(const Network& net, std::span<const int> removed) {
    auto gone = mask_of(net.size(), removed);
    UnionFind uf(net.size());
    for (std::size_t c = 0; c < net.size(); ++c) {
        if (gone[c]) continue;
        for (int p : net.parents(static_cast<int>(c))) {
            if (gone[static_cast<std::size_t>(p)]) continue;
            if (!uf.unite(static_cast<int>(c), p)) return false;
        }
    }
    return true;
}

Cutset certify_cutset(const Network& net, const Evidence& e, std::vector<int> members, CutsetKind kind) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    for (int m : members) {
        if (m < 0 || static_cast<std::size_t>(m) >= net.size()) throw std::invalid_argument("cutset member out of range");
        if (e.contains(m)) throw std::invalid_argument("cutset member '" + net.variable(m).name + "' is observed");
    }
    auto removed = sorted_union(members, e.variables());
    auto gone = mask_of(net.size(), removed);
    std::vector<int> keep;
    for (std::size_t v = 0; v < net.size(); ++v)
        if (!gone[v]) keep.push_back(static_cast<int>(v));
    Cutset c;
    c.members = std::move(members);
    c.kind = kind;
    c.ordering = min_fill_ordering(moralize(net), keep);
    c.certified_width = c.ordering.width;
    return c;
}

Cutset find_loop_cutset(const Network& net, const Evidence& e) {
    const std::size_t n = net.size();
    auto removed = mask_of(n, e.variables());
    std::vector<int> members;
    while (!factor_graph_acyclic(net, removed)) {
        // Prune leaves of the variable/factor incidence graph down to its
        // cyclic core; variable degrees in the core drive the choice.
        auto scopes = residual_scopes(net, removed);
        std::vector<std::vector<int>> var_factors(n);
        for (std::size_t f = 0; f < n; ++f)
            for (int v : scopes[f]) var_factors[static_cast<std::size_t>(v)].push_back(static_cast<int>(f));
        std::vector<int> deg(2 * n, 0);
        std::vector<char> dead(2 * n, 0);
        for (std::size_t v = 0; v < n; ++v) deg[v] = static_cast<int>(var_factors[v].size());
        for (std::size_t f = 0; f < n; ++f) deg[n + f] = static_cast<int>(scopes[f].size());
        std::vector<int> stack;
        for (std::size_t x = 0; x < 2 * n; ++x)
            if (deg[x] <= 1) stack.push_back(static_cast<int>(x));
        while (!stack.empty()) {
            auto x = static_cast<std::size_t>(stack.back());
            stack.pop_back();
            if (dead[x]) continue;
            dead[x] = 1;
            auto drop = [&](std::size_t y) {
                if (!dead[y] && --deg[y] <= 1) stack.push_back(static_cast<int>(y));
            };
            if (x < n) {
                for (int f : var_factors[x]) drop(n + static_cast<std::size_t>(f));
            } else {
                for (int v : scopes[x - n]) drop(static_cast<std::size_t>(v));
            }
        }
        int best = -1;
        for (std::size_t v = 0; v < n; ++v) {
            if (dead[v] || removed[v]) continue;
            if (best < 0 || deg[v] > deg[static_cast<std::size_t>(best)]) best = static_cast<int>(v);
        }
        if (best < 0) throw std::logic_error("cyclic factor graph without a cyclic core");
        removed[static_cast<std::size_t>(best)] = 1;
        members.push_back(best);
    }
    return certify_cutset(net, e, std::move(members), CutsetKind::loop);
}

namespace {

Cutset prune_cutset(const Network& net, const Evidence& e, int w, const Cutset& enclosing) {
    if (enclosing.certified_width > w)
        throw std::invalid_argument("enclosing cutset is not certified for the requested width");
    auto g = moralize(net);
    auto ev = e.variables();
    std::vector<int> members = enclosing.members;
    for (std::size_t k = members.size(); k-- > 0;) {
        std::vector<int> trial = members;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(k));
        if (adjusted_induced_width(g, sorted_union(trial, ev)) <= w) members = std::move(trial);
    }
    return certify_cutset(net, e, std::move(members), CutsetKind::w_bounded);
}

}  // namespace

Cutset find_w_cutset(const Network& net, const Evidence& e, int w, const Cutset* enclosing) {
    if (w < 1) throw std::invalid_argument("w must be at least 1");
    if (enclosing) return prune_cutset(net, e, w, *enclosing);
    const std::size_t n = net.size();
    auto g = moralize(net);
    auto removed = mask_of(n, e.variables());
    std::vector<int> members;
    for (;;) {
        std::vector<int> keep;
        for (std::size_t v = 0; v < n; ++v)
            if (!removed[v]) keep.push_back(static_cast<int>(v));
        auto ord = min_fill_ordering(g, keep);
        if (ord.width <= w) break;
        auto clusters = detail::decompose(g, ord.order);
        std::vector<int> hits(n, 0);
        for (const auto& c : clusters.vars)
            if (static_cast<int>(c.size()) > w + 1)
                for (int v : c) ++hits[static_cast<std::size_t>(v)];
        int best = -1;
        for (std::size_t v = 0; v < n; ++v)
            if (hits[v] > 0 && (best < 0 || hits[v] > hits[static_cast<std::size_t>(best)])) best = static_cast<int>(v);
        removed[static_cast<std::size_t>(best)] = 1;
        members.push_back(best);
    }
    return certify_cutset(net, e, std::move(members), CutsetKind::w_bounded);
}

std::vector<Cutset> nested_w_cutsets(const Network& net, const Evidence& e, int w_lo, int w_hi) {
    if (w_lo < 1 || w_hi < w_lo) throw std::invalid_argument("invalid w range");
    std::vector<Cutset> chain;
    chain.push_back(find_w_cutset(net, e, w_lo));
    for (int w = w_lo + 1; w <= w_hi; ++w) chain.push_back(find_w_cutset(net, e, w, &chain.back()));
    return chain;
}

}  // namespace wcs
