#include "wcs/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wcs {

namespace {

bool normalize(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    if (s <= 0.0) return false;
    for (double& x : v) x /= s;
    return true;
}

double max_change(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t s = 0; s < a[i].size(); ++s) m = std::max(m, std::abs(a[i][s] - b[i][s]));
    return m;
}

}  // namespace

IbpResult ibp_posteriors(const Network& net, const Evidence& e, const IbpOptions& opts) {
    if (opts.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    e.validate(net);
    const std::size_t n = net.size();

    // One edge per (parent slot, child). pi[k] and lam[k] live over the
    // parent's states.
    std::vector<std::vector<int>> parent_edge(n);  // per child, per parent slot
    std::vector<std::vector<std::pair<int, int>>> child_edges(n);  // per parent: (edge, child)
    std::vector<int> edge_parent;
    for (std::size_t x = 0; x < n; ++x)
        for (int u : net.parents(static_cast<int>(x))) {
            int k = static_cast<int>(edge_parent.size());
            edge_parent.push_back(u);
            parent_edge[x].push_back(k);
            child_edges[static_cast<std::size_t>(u)].emplace_back(k, static_cast<int>(x));
        }
    const std::size_t m = edge_parent.size();
    auto uniform = [&](int v) {
        int d = net.domain_size(v);
        return std::vector<double>(static_cast<std::size_t>(d), 1.0 / d);
    };
    std::vector<std::vector<double>> pi(m), lam(m);
    for (std::size_t k = 0; k < m; ++k) pi[k] = lam[k] = uniform(edge_parent[k]);

    std::vector<std::vector<double>> local(n);  // evidence indicator
    for (std::size_t x = 0; x < n; ++x) {
        local[x].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(x))), 1.0);
        auto it = e.bindings.find(static_cast<int>(x));
        if (it != e.bindings.end()) {
            std::fill(local[x].begin(), local[x].end(), 0.0);
            local[x][static_cast<std::size_t>(it->second)] = 1.0;
        }
    }

    IbpResult res;
    std::vector<std::vector<double>> belief(n), prev_belief(n);
    for (std::size_t x = 0; x < n; ++x) prev_belief[x] = uniform(static_cast<int>(x));
    std::vector<std::vector<double>> new_pi(m), new_lam(m);

    for (int it = 1; it <= opts.max_iters; ++it) {
        std::vector<char> zero(n, 0);
        for (std::size_t x = 0; x < n; ++x) {
            const int xi = static_cast<int>(x);
            const Cpt& cpt = net.cpt(xi);
            const std::size_t d = static_cast<std::size_t>(cpt.child_domain);
            const auto& pe = parent_edge[x];
            const std::size_t np = pe.size();

            // pi(x) and lambda(x) from the current incoming messages.
            std::vector<double> pi_x(d, 0.0);
            std::vector<int> digits(np, 0);
            const std::size_t rows = cpt.row_count();
            for (std::size_t r = 0; r < rows; ++r) {
                double w = 1.0;
                for (std::size_t k = 0; k < np; ++k) w *= pi[static_cast<std::size_t>(pe[k])][static_cast<std::size_t>(digits[k])];
                if (w != 0.0) {
                    auto row = cpt.row(r);
                    for (std::size_t s = 0; s < d; ++s) pi_x[s] += w * row[s];
                }
                for (std::size_t k = np; k-- > 0;) {
                    if (++digits[k] < net.domain_size(net.parents(xi)[k])) break;
                    digits[k] = 0;
                }
            }
            std::vector<double> lam_x = local[x];
            for (auto [k, c] : child_edges[x])
                for (std::size_t s = 0; s < d; ++s) lam_x[s] *= lam[static_cast<std::size_t>(k)][s];

            // pi messages to children: everything except that child's lambda.
            for (auto [k, c] : child_edges[x]) {
                std::vector<double> msg(d);
                for (std::size_t s = 0; s < d; ++s) msg[s] = pi_x[s] * local[x][s];
                for (auto [k2, c2] : child_edges[x])
                    if (k2 != k)
                        for (std::size_t s = 0; s < d; ++s) msg[s] *= lam[static_cast<std::size_t>(k2)][s];
                normalize(msg);
                new_pi[static_cast<std::size_t>(k)] = std::move(msg);
            }

            // lambda messages to parents.
            if (np > 0) {
                std::vector<std::vector<double>> out(np);
                for (std::size_t k = 0; k < np; ++k)
                    out[k].assign(static_cast<std::size_t>(net.domain_size(net.parents(xi)[k])), 0.0);
                std::fill(digits.begin(), digits.end(), 0);
                for (std::size_t r = 0; r < rows; ++r) {
                    auto row = cpt.row(r);
                    double l = 0.0;
                    for (std::size_t s = 0; s < d; ++s) l += row[s] * lam_x[s];
                    if (l != 0.0) {
                        for (std::size_t k = 0; k < np; ++k) {
                            double w = l;
                            for (std::size_t j = 0; j < np && w != 0.0; ++j)
                                if (j != k) w *= pi[static_cast<std::size_t>(pe[j])][static_cast<std::size_t>(digits[j])];
                            out[k][static_cast<std::size_t>(digits[k])] += w;
                        }
                    }
                    for (std::size_t k = np; k-- > 0;) {
                        if (++digits[k] < net.domain_size(net.parents(xi)[k])) break;
                        digits[k] = 0;
                    }
                }
                for (std::size_t k = 0; k < np; ++k) {
                    normalize(out[k]);
                    new_lam[static_cast<std::size_t>(pe[k])] = std::move(out[k]);
                }
            }
        }

        // Beliefs from the freshly updated messages.
        for (std::size_t x = 0; x < n; ++x) {
            const int xi = static_cast<int>(x);
            const Cpt& cpt = net.cpt(xi);
            const std::size_t d = static_cast<std::size_t>(cpt.child_domain);
            const auto& pe = parent_edge[x];
            std::vector<double> b(d, 0.0);
            std::vector<int> digits(pe.size(), 0);
            for (std::size_t r = 0; r < cpt.row_count(); ++r) {
                double w = 1.0;
                for (std::size_t k = 0; k < pe.size(); ++k)
                    w *= new_pi[static_cast<std::size_t>(pe[k])][static_cast<std::size_t>(digits[k])];
                if (w != 0.0) {
                    auto row = cpt.row(r);
                    for (std::size_t s = 0; s < d; ++s) b[s] += w * row[s];
                }
                for (std::size_t k = pe.size(); k-- > 0;) {
                    if (++digits[k] < net.domain_size(net.parents(xi)[k])) break;
                    digits[k] = 0;
                }
            }
            for (std::size_t s = 0; s < d; ++s) b[s] *= local[x][s];
            for (auto [k, c] : child_edges[x])
                for (std::size_t s = 0; s < d; ++s) b[s] *= new_lam[static_cast<std::size_t>(k)][s];
            if (!normalize(b)) {
                zero[x] = 1;
                b = uniform(xi);
            }
            belief[x] = std::move(b);
        }

        double delta = std::max({max_change(belief, prev_belief), max_change(new_pi, pi), max_change(new_lam, lam)});
        pi.swap(new_pi);
        lam.swap(new_lam);
        prev_belief = belief;
        res.iterations = it;
        res.zero_belief.clear();
        for (std::size_t x = 0; x < n; ++x)
            if (zero[x]) res.zero_belief.push_back(static_cast<int>(x));
        if (opts.observer) {
            Marginals snap;
            snap.probs = belief;
            opts.observer(it, snap);
        }
        if (delta < opts.tol) {
            res.converged = true;
            break;
        }
    }
    res.marginals.probs = std::move(belief);
    clamp_evidence(res.marginals, net, e);
    return res;
}

}  // namespace wcs
