#include "wcs/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wcs/random.hpp"

namespace wcs {

namespace {

Variable binary(int index, std::string name) {
    Variable v;
    v.index = index;
    v.name = std::move(name);
    v.states = {"0", "1"};
    return v;
}

Cpt uniform_prior(int child) {
    Cpt c;
    c.child = child;
    c.child_domain = 2;
    c.table = {0.5, 0.5};
    return c;
}

Cpt random_cpt(int child, std::vector<int> parents, Stream& rng) {
    Cpt c;
    c.child = child;
    c.child_domain = 2;
    c.parents = std::move(parents);
    const std::size_t rows = std::size_t{1} << c.parents.size();
    for (std::size_t r = 0; r < rows; ++r) {
        double u = rng.uniform();
        c.table.push_back(u);
        c.table.push_back(1.0 - u);
    }
    return c;
}

// k distinct values from [0, n), sorted.
std::vector<int> choose(int n, int k, Stream& rng) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < k; ++i) {
        auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
}

}  // namespace

void GenSpec::validate() const {
    auto fail = [](const std::string& m) { throw std::invalid_argument(m); };
    switch (family) {
        case Family::multipartite:
            if (n_root < 1 || n_total < n_root) fail("multipartite needs 1 <= n_root <= n_total");
            if (parents < 1) fail("multipartite needs at least one parent per node");
            break;
        case Family::two_layer:
            if (roots < 1 || leaves < 1) fail("two-layer needs at least one root and one leaf");
            if (min_parents < 1 || max_parents < min_parents) fail("two-layer needs 1 <= min_parents <= max_parents");
            break;
        case Family::grid:
            if (rows < 2 || cols < 2) fail("grid needs at least 2 rows and 2 columns");
            break;
        case Family::coding:
            if (code_bits < 3) fail("coding needs at least 3 code bits");
            if (flip < 0.0 && !(sigma >= 0.0)) fail("coding needs a non-negative sigma");
            if (flip > 0.5) fail("channel flip probability must not exceed 0.5");
            break;
    }
}

Family parse_family(const std::string& name) {
    if (name == "multipartite") return Family::multipartite;
    if (name == "two-layer") return Family::two_layer;
    if (name == "grid") return Family::grid;
    if (name == "coding") return Family::coding;
    throw std::invalid_argument("unknown family '" + name + "'");
}

std::string family_name(Family f) {
    switch (f) {
        case Family::multipartite: return "multipartite";
        case Family::two_layer: return "two-layer";
        case Family::grid: return "grid";
        case Family::coding: return "coding";
    }
    return "";
}

Network gen_multipartite(const GenSpec& spec) {
    spec.validate();
    Stream rng(spec.seed);
    std::vector<Variable> vars;
    std::vector<Cpt> cpts;
    for (int i = 0; i < spec.n_total; ++i) {
        vars.push_back(binary(i, "X" + std::to_string(i)));
        if (i < spec.n_root)
            cpts.push_back(uniform_prior(i));
        else
            cpts.push_back(random_cpt(i, choose(i, std::min(spec.parents, i), rng), rng));
    }
    return Network(std::move(vars), std::move(cpts));
}

Network gen_two_layer(const GenSpec& spec) {
    spec.validate();
    Stream rng(spec.seed);
    std::vector<Variable> vars;
    std::vector<Cpt> cpts;
    for (int i = 0; i < spec.roots; ++i) {
        vars.push_back(binary(i, "R" + std::to_string(i)));
        cpts.push_back(uniform_prior(i));
    }
    const int hi = std::min(spec.max_parents, spec.roots);
    const int lo = std::min(spec.min_parents, hi);
    for (int j = 0; j < spec.leaves; ++j) {
        const int idx = spec.roots + j;
        vars.push_back(binary(idx, "L" + std::to_string(j)));
        int k = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
        cpts.push_back(random_cpt(idx, choose(spec.roots, k, rng), rng));
    }
    return Network(std::move(vars), std::move(cpts));
}

Network gen_grid(const GenSpec& spec) {
    spec.validate();
    Stream rng(spec.seed);
    std::vector<Variable> vars;
    std::vector<Cpt> cpts;
    for (int r = 0; r < spec.rows; ++r)
        for (int c = 0; c < spec.cols; ++c) {
            const int idx = r * spec.cols + c;
            vars.push_back(binary(idx, "G" + std::to_string(r) + "_" + std::to_string(c)));
            std::vector<int> parents;
            if (r > 0) parents.push_back(idx - spec.cols);
            if (c > 0) parents.push_back(idx - 1);
            std::sort(parents.begin(), parents.end());
            cpts.push_back(parents.empty() ? uniform_prior(idx) : random_cpt(idx, parents, rng));
        }
    return Network(std::move(vars), std::move(cpts));
}

double channel_flip_probability(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return 0.5 * std::erfc(0.5 / (sigma * std::sqrt(2.0)));
}

CodingInstance gen_coding(const GenSpec& spec) {
    spec.validate();
    Stream rng(spec.seed);
    const int K = spec.code_bits;
    const double p = spec.flip >= 0.0 ? spec.flip : channel_flip_probability(spec.sigma);
    std::vector<Variable> vars;
    std::vector<Cpt> cpts;
    for (int i = 0; i < K; ++i) {
        vars.push_back(binary(i, "U" + std::to_string(i)));
        cpts.push_back(uniform_prior(i));
    }
    std::vector<std::vector<int>> checks;
    for (int j = 0; j < K; ++j) {
        const int idx = K + j;
        vars.push_back(binary(idx, "P" + std::to_string(j)));
        auto pa = choose(K, 3, rng);
        checks.push_back(pa);
        Cpt c;
        c.child = idx;
        c.child_domain = 2;
        c.parents = pa;
        for (int r = 0; r < 8; ++r) {
            const int parity = ((r >> 2) ^ (r >> 1) ^ r) & 1;
            c.table.push_back(parity == 0 ? 1.0 : 0.0);
            c.table.push_back(parity == 1 ? 1.0 : 0.0);
        }
        cpts.push_back(std::move(c));
    }
    for (int j = 0; j < 2 * K; ++j) {
        const int idx = 2 * K + j;
        vars.push_back(binary(idx, (j < K ? "YU" : "YP") + std::to_string(j % K)));
        Cpt c;
        c.child = idx;
        c.child_domain = 2;
        c.parents = {j};
        c.table = {1.0 - p, p, p, 1.0 - p};
        cpts.push_back(std::move(c));
    }
    CodingInstance out{Network(std::move(vars), std::move(cpts)), {}, p};

    // Random codeword through the channel.
    std::vector<int> bits(static_cast<std::size_t>(2 * K));
    for (int i = 0; i < K; ++i) bits[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(2));
    for (int j = 0; j < K; ++j) {
        int v = 0;
        for (int u : checks[static_cast<std::size_t>(j)]) v ^= bits[static_cast<std::size_t>(u)];
        bits[static_cast<std::size_t>(K + j)] = v;
    }
    for (int j = 0; j < 2 * K; ++j) {
        int y = bits[static_cast<std::size_t>(j)];
        if (rng.uniform() < p) y ^= 1;
        out.evidence.bindings[2 * K + j] = y;
    }
    return out;
}

CodingInstance generate(const GenSpec& spec) {
    switch (spec.family) {
        case Family::multipartite: return {gen_multipartite(spec), {}, 0.0};
        case Family::two_layer: return {gen_two_layer(spec), {}, 0.0};
        case Family::grid: return {gen_grid(spec), {}, 0.0};
        case Family::coding: return gen_coding(spec);
    }
    throw std::invalid_argument("unknown family");
}

Evidence pick_evidence(const Network& net, EvidencePolicy policy, int count, std::uint64_t seed) {
    std::vector<int> eligible;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (policy == EvidencePolicy::any || net.children(static_cast<int>(i)).empty())
            eligible.push_back(static_cast<int>(i));
    if (count < 0 || count > static_cast<int>(eligible.size()))
        throw std::invalid_argument("evidence count " + std::to_string(count) + " exceeds the " +
                                    std::to_string(eligible.size()) + " eligible variables");
    Stream rng(seed);
    auto picked = choose(static_cast<int>(eligible.size()), count, rng);
    Assignment x(net.size(), 0);
    for (int v : net.topological_order()) {
        auto row = net.cpt(v).row(net.row_index(v, x));
        x[static_cast<std::size_t>(v)] = rng.discrete(row);
    }
    Evidence e;
    for (int k : picked) {
        int v = eligible[static_cast<std::size_t>(k)];
        e.bindings[v] = x[static_cast<std::size_t>(v)];
    }
    return e;
}

}  // namespace wcs
