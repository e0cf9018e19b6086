#include "support/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace fx {

wcs::Network build(const std::vector<NodeSpec>& nodes) {
    std::vector<wcs::Variable> vars;
    std::vector<wcs::Cpt> cpts;
    auto index_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].name == name) return static_cast<int>(i);
        throw std::invalid_argument("unknown node " + name);
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        wcs::Variable v;
        v.index = static_cast<int>(i);
        v.name = nodes[i].name;
        for (int s = 0; s < nodes[i].domain; ++s) v.states.push_back(std::to_string(s));
        vars.push_back(v);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        wcs::Cpt c;
        c.child = static_cast<int>(i);
        c.child_domain = nodes[i].domain;
        for (const auto& p : nodes[i].parents) c.parents.push_back(index_of(p));
        for (const auto& row : nodes[i].rows) c.table.insert(c.table.end(), row.begin(), row.end());
        cpts.push_back(std::move(c));
    }
    return wcs::Network(std::move(vars), std::move(cpts));
}

namespace {

std::vector<double> random_row(std::mt19937_64& rng, int d, double lo, double zero_prob) {
    std::uniform_real_distribution<double> u(lo, 1.0 - lo);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<double> row(static_cast<std::size_t>(d));
    double sum = 0.0;
    for (auto& x : row) {
        x = u(rng);
        if (zero_prob > 0.0 && coin(rng) < zero_prob) x = 0.0;
        sum += x;
    }
    if (sum == 0.0) {
        row[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(d))] = 1.0;
        sum = 1.0;
    }
    for (auto& x : row) x /= sum;
    return row;
}

wcs::Network from_parent_lists(const std::vector<std::vector<int>>& parents, const std::vector<int>& domains,
                               std::mt19937_64& rng, double lo, double zero_prob) {
    std::vector<wcs::Variable> vars;
    std::vector<wcs::Cpt> cpts;
    const std::size_t n = parents.size();
    for (std::size_t i = 0; i < n; ++i) {
        wcs::Variable v;
        v.index = static_cast<int>(i);
        v.name = "X" + std::to_string(i);
        for (int s = 0; s < domains[i]; ++s) v.states.push_back("s" + std::to_string(s));
        vars.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) {
        wcs::Cpt c;
        c.child = static_cast<int>(i);
        c.child_domain = domains[i];
        c.parents = parents[i];
        std::size_t rows = 1;
        for (int p : c.parents) rows *= static_cast<std::size_t>(domains[static_cast<std::size_t>(p)]);
        for (std::size_t r = 0; r < rows; ++r) {
            auto row = random_row(rng, domains[i], lo, zero_prob);
            c.table.insert(c.table.end(), row.begin(), row.end());
        }
        cpts.push_back(std::move(c));
    }
    return wcs::Network(std::move(vars), std::move(cpts));
}

}  // namespace

wcs::Network random_tables(const std::vector<std::pair<std::string, std::vector<std::string>>>& structure,
                           std::uint64_t seed, double lo) {
    std::mt19937_64 rng(seed);
    std::vector<NodeSpec> nodes;
    for (const auto& [name, parents] : structure) {
        NodeSpec s;
        s.name = name;
        s.parents = parents;
        std::size_t rows = std::size_t{1} << parents.size();
        for (std::size_t r = 0; r < rows; ++r) s.rows.push_back(random_row(rng, 2, lo, 0.0));
        nodes.push_back(std::move(s));
    }
    return build(nodes);
}

wcs::Network random_dag(int n, int max_parents, std::uint64_t seed, int max_domain, double zero_prob) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    std::vector<int> domains(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        domains[static_cast<std::size_t>(i)] = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_domain - 1));
        int k = std::min(i, static_cast<int>(rng() % static_cast<std::uint64_t>(max_parents + 1)));
        std::vector<int> pool(static_cast<std::size_t>(i));
        for (int j = 0; j < i; ++j) pool[static_cast<std::size_t>(j)] = j;
        std::shuffle(pool.begin(), pool.end(), rng);
        pool.resize(static_cast<std::size_t>(k));
        std::sort(pool.begin(), pool.end());
        parents[static_cast<std::size_t>(i)] = pool;
    }
    return from_parent_lists(parents, domains, rng, 0.02, zero_prob);
}

wcs::Network random_polytree(int n, std::uint64_t seed, int max_domain) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<int>> parents(static_cast<std::size_t>(n));
    std::vector<int> domains(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        domains[static_cast<std::size_t>(i)] = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_domain - 1));
    // Node i attaches to an earlier node j; the direction is random, which
    // keeps the DAG acyclic only if we relabel, so record edges and then
    // derive a topological labeling.
    std::vector<std::pair<int, int>> edges;  // parent, child
    for (int i = 1; i < n; ++i) {
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
        if (rng() & 1u)
            edges.emplace_back(j, i);
        else
            edges.emplace_back(i, j);
    }
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (auto [p, c] : edges) {
        ++indeg[static_cast<std::size_t>(c)];
        out[static_cast<std::size_t>(p)].push_back(c);
    }
    std::vector<int> order, ready;
    for (int i = 0; i < n; ++i)
        if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    while (!ready.empty()) {
        int x = ready.back();
        ready.pop_back();
        order.push_back(x);
        for (int c : out[static_cast<std::size_t>(x)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.push_back(c);
    }
    std::vector<int> label(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) label[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])] = k;
    std::vector<std::vector<int>> pl(static_cast<std::size_t>(n));
    std::vector<int> dl(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) dl[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])] = domains[static_cast<std::size_t>(i)];
    for (auto [p, c] : edges) pl[static_cast<std::size_t>(label[static_cast<std::size_t>(c)])].push_back(label[static_cast<std::size_t>(p)]);
    for (auto& v : pl) std::sort(v.begin(), v.end());
    return from_parent_lists(pl, dl, rng, 0.02, 0.0);
}

wcs::Evidence random_evidence(const wcs::Network& net, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<int> x(net.size(), 0);
    for (int v : net.topological_order()) {
        auto row = net.cpt(v).row(net.row_index(v, x));
        std::discrete_distribution<int> d(row.begin(), row.end());
        x[static_cast<std::size_t>(v)] = d(rng);
    }
    std::vector<int> pool(net.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = static_cast<int>(i);
    std::shuffle(pool.begin(), pool.end(), rng);
    wcs::Evidence e;
    for (int k = 0; k < count && k < static_cast<int>(pool.size()); ++k)
        e.bindings[pool[static_cast<std::size_t>(k)]] = x[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])];
    return e;
}

wcs::Network chain_ab() {
    return build({{"A", {}, {{0.4, 0.6}}}, {"B", {"A"}, {{0.8, 0.2}, {0.3, 0.7}}}});
}

wcs::Network collider() {
    return build({{"A", {}, {{0.5, 0.5}}},
                  {"B", {}, {{0.5, 0.5}}},
                  {"C", {"A", "B"}, {{0.5, 0.5}, {0.8, 0.2}, {0.5, 0.5}, {0.1, 0.9}}}});
}

wcs::Network diamond(std::uint64_t seed) {
    return random_tables({{"A", {}}, {"B", {"A"}}, {"C", {"A"}}, {"D", {"B", "C"}}}, seed);
}

wcs::Network seven_node(std::uint64_t seed) {
    return random_tables({{"A", {}},
                          {"B", {"A"}},
                          {"C", {"A"}},
                          {"D", {"B", "C"}},
                          {"E", {"D", "F"}},
                          {"F", {"C", "D"}},
                          {"G", {"F"}}},
                         seed);
}

wcs::Network parity() {
    return build({{"X1", {}, {{0.5, 0.5}}},
                  {"X2", {}, {{0.5, 0.5}}},
                  {"Y", {"X1", "X2"}, {{1, 0}, {0, 1}, {0, 1}, {1, 0}}}});
}

double max_abs_diff(const wcs::Marginals& a, const wcs::Marginals& b) {
    if (a.size() != b.size()) return INFINITY;
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) return INFINITY;
        for (std::size_t s = 0; s < a[i].size(); ++s) m = std::max(m, std::abs(a[i][s] - b[i][s]));
    }
    return m;
}

int diameter(const wcs::Network& net) {
    std::vector<std::vector<int>> adj(net.size());
    for (std::size_t x = 0; x < net.size(); ++x)
        for (int u : net.parents(static_cast<int>(x))) {
            adj[x].push_back(u);
            adj[static_cast<std::size_t>(u)].push_back(static_cast<int>(x));
        }
    int best = 0;
    for (std::size_t s = 0; s < net.size(); ++s) {
        std::vector<int> dist(net.size(), -1);
        std::queue<int> q;
        q.push(static_cast<int>(s));
        dist[s] = 0;
        while (!q.empty()) {
            int x = q.front();
            q.pop();
            for (int y : adj[static_cast<std::size_t>(x)])
                if (dist[static_cast<std::size_t>(y)] < 0) {
                    dist[static_cast<std::size_t>(y)] = dist[static_cast<std::size_t>(x)] + 1;
                    best = std::max(best, dist[static_cast<std::size_t>(y)]);
                    q.push(y);
                }
        }
    }
    return best;
}

std::shared_ptr<const wcs::CompiledJoinTree> layout_for(const wcs::Network& net, const wcs::Cutset& c,
                                                        const wcs::Evidence& e) {
    auto cond = c.members;
    for (int v : e.variables()) cond.push_back(v);
    std::sort(cond.begin(), cond.end());
    cond.erase(std::unique(cond.begin(), cond.end()), cond.end());
    return std::make_shared<const wcs::CompiledJoinTree>(net, wcs::build_join_tree(net, cond));
}

}  // namespace fx
