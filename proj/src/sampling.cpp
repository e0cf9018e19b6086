#include "wcs/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "wcs/propagation.hpp"

namespace wcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class Fn>
void run_chains(int chains, int threads, Fn&& fn) {
    int workers = std::max(1, std::min(threads, chains));
    if (workers == 1) {
        for (int c = 0; c < chains; ++c) fn(c);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chains));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int c = next++; c < chains; c = next++) {
                try {
                    fn(c);
                } catch (...) {
                    errors[static_cast<std::size_t>(c)] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

Marginals mean_of(const std::vector<Marginals>& parts) {
    Marginals out;
    if (parts.empty()) return out;
    out.probs = parts[0].probs;
    for (std::size_t c = 1; c < parts.size(); ++c)
        for (std::size_t i = 0; i < out.probs.size(); ++i)
            for (std::size_t s = 0; s < out.probs[i].size(); ++s) out.probs[i][s] += parts[c].probs[i][s];
    for (auto& row : out.probs)
        for (double& v : row) v /= static_cast<double>(parts.size());
    return out;
}

struct ChainOut {
    Marginals mixture, histogram;
    std::uint64_t dead_ends = 0;
    std::set<std::vector<int>> tuples;
    std::vector<char> moved;  // Gibbs: variable saw a non-degenerate conditional
    double w_sum = 0.0, w_sq = 0.0;
    std::uint64_t w_n = 0;
    bool all_zero = false;
    std::uint64_t messages = 0;
};

void finish(SamplerResult& r, std::vector<ChainOut>& outs, const Network& net, const Evidence& e,
            const SamplingConfig& cfg, double seconds) {
    for (auto& o : outs) {
        clamp_evidence(o.mixture, net, e);
        clamp_evidence(o.histogram, net, e);
        r.per_chain_mixture.push_back(o.mixture);
        r.per_chain_histogram.push_back(o.histogram);
        r.dead_ends += o.dead_ends;
        r.messages += o.messages;
    }
    r.pooled_mixture = mean_of(r.per_chain_mixture);
    r.pooled_histogram = mean_of(r.per_chain_histogram);
    if (cfg.estimator == EstimatorKind::mixture) {
        r.per_chain = r.per_chain_mixture;
        r.pooled = r.pooled_mixture;
    } else {
        r.per_chain = r.per_chain_histogram;
        r.pooled = r.pooled_histogram;
    }
    r.total_samples = static_cast<std::uint64_t>(cfg.chains) * static_cast<std::uint64_t>(cfg.samples);
    r.seconds = seconds;
    r.samples_per_second = seconds > 0.0 ? static_cast<double>(r.total_samples) / seconds : 0.0;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Markov blanket kernel with each child's row stride for its parent i
// precomputed, so a candidate state shifts the child row by a constant.
class BlanketKernel {
public:
    explicit BlanketKernel(const Network& net) : net_(net), kids_(net.size()) {
        for (std::size_t j = 0; j < net.size(); ++j) {
            const auto& pa = net.parents(static_cast<int>(j));
            std::size_t stride = 1;
            for (std::size_t k = pa.size(); k-- > 0;) {
                kids_[static_cast<std::size_t>(pa[k])].push_back({static_cast<int>(j), stride});
                stride *= static_cast<std::size_t>(net.domain_size(pa[k]));
            }
        }
    }

    // Unnormalized conditional of i into out; returns the total.
    double operator()(int i, std::span<const int> x, std::vector<double>& out) const {
        const Cpt& own = net_.cpt(i);
        const std::size_t d = static_cast<std::size_t>(own.child_domain);
        out.assign(d, 0.0);
        const std::size_t r = net_.row_index(i, x);
        for (std::size_t s = 0; s < d; ++s) out[s] = own.table[r * d + s];
        const std::size_t xi = static_cast<std::size_t>(x[static_cast<std::size_t>(i)]);
        for (auto [j, stride] : kids_[static_cast<std::size_t>(i)]) {
            const Cpt& c = net_.cpt(j);
            const std::size_t dj = static_cast<std::size_t>(c.child_domain);
            const std::size_t base = net_.row_index(j, x) - xi * stride;
            const std::size_t xj = static_cast<std::size_t>(x[static_cast<std::size_t>(j)]);
            for (std::size_t s = 0; s < d; ++s)
                if (out[s] != 0.0) out[s] *= c.table[(base + s * stride) * dj + xj];
        }
        double t = 0.0;
        for (double v : out) t += v;
        return t;
    }

private:
    struct Kid {
        int child;
        std::size_t stride;
    };
    const Network& net_;
    std::vector<std::vector<Kid>> kids_;
};

std::vector<int> unobserved(const Network& net, const Evidence& e) {
    std::vector<int> out;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (!e.contains(static_cast<int>(i))) out.push_back(static_cast<int>(i));
    return out;
}

Marginals ibp_beliefs(const Network& net, const Evidence& e) { return ibp_posteriors(net, e).marginals; }

}  // namespace

void SamplingConfig::validate() const {
    if (chains < 1) throw std::invalid_argument("chains must be at least 1");
    if (samples < 1) throw std::invalid_argument("samples must be at least 1");
    if (burn_in < 0) throw std::invalid_argument("burn-in must be non-negative");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
    if (posterior_every < 1) throw std::invalid_argument("posterior interval must be at least 1");
    if (init_attempts < 1) throw std::invalid_argument("init attempts must be at least 1");
    if (update_interval < 1) throw std::invalid_argument("update interval must be at least 1");
    if (max_updates < 0) throw std::invalid_argument("max updates must be non-negative");
    if (!(floor >= 0.0 && floor < 0.5)) throw std::invalid_argument("floor must lie in [0, 0.5)");
}

EstimatorAccumulator::EstimatorAccumulator(const Network& net)
    : mix_(net.size()), mix_n_(net.size(), 0), hist_(net.size()) {
    for (std::size_t i = 0; i < net.size(); ++i) {
        mix_[i].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(i))), 0.0);
        hist_[i].assign(mix_[i].size(), 0);
    }
}

void EstimatorAccumulator::add_distribution(int var, std::span<const double> p) {
    auto& row = mix_[static_cast<std::size_t>(var)];
    for (std::size_t s = 0; s < row.size(); ++s) row[s] += p[s];
    ++mix_n_[static_cast<std::size_t>(var)];
}

void EstimatorAccumulator::add_value(int var, int state) {
    ++hist_[static_cast<std::size_t>(var)][static_cast<std::size_t>(state)];
}

Marginals EstimatorAccumulator::mixture() const {
    Marginals m;
    m.probs = mix_;
    for (std::size_t i = 0; i < m.probs.size(); ++i)
        if (mix_n_[i] > 0)
            for (double& v : m.probs[i]) v /= static_cast<double>(mix_n_[i]);
    return m;
}

Marginals EstimatorAccumulator::histogram() const {
    Marginals m = mixture();
    for (std::size_t i = 0; i < hist_.size(); ++i) {
        std::uint64_t total = 0;
        for (auto c : hist_[i]) total += c;
        if (total == 0) continue;
        for (std::size_t s = 0; s < hist_[i].size(); ++s)
            m.probs[i][s] = static_cast<double>(hist_[i][s]) / static_cast<double>(total);
    }
    return m;
}

std::optional<std::vector<double>> markov_blanket_distribution(const Network& net, int i, std::span<const int> x) {
    if (i < 0 || static_cast<std::size_t>(i) >= net.size()) throw std::out_of_range("variable index out of range");
    std::vector<int> y(x.begin(), x.end());
    std::vector<double> p(static_cast<std::size_t>(net.domain_size(i)));
    std::vector<int> touched{i};
    for (int c : net.children(i)) touched.push_back(c);
    double total = 0.0;
    for (int s = 0; s < net.domain_size(i); ++s) {
        y[static_cast<std::size_t>(i)] = s;
        double v = 1.0;
        for (int j : touched) v *= net.conditional(j, y);
        p[static_cast<std::size_t>(s)] = v;
        total += v;
    }
    if (!(total > 0.0)) return std::nullopt;
    for (double& v : p) v /= total;
    return p;
}

Assignment initialize_chain(const Network& net, const Evidence& e, std::span<const int> sampled, InitMode mode,
                            Stream& stream, const Marginals* beliefs) {
    Assignment x = e.as_assignment(net.size());
    Marginals local;
    if (mode == InitMode::ibp && beliefs == nullptr) {
        local = ibp_beliefs(net, e);
        beliefs = &local;
    }
    for (int v : sampled) {
        if (e.contains(v)) continue;
        int s = -1;
        if (mode == InitMode::ibp) s = stream.discrete((*beliefs)[static_cast<std::size_t>(v)]);
        if (s < 0) s = static_cast<int>(stream.below(static_cast<std::uint64_t>(net.domain_size(v))));
        x[static_cast<std::size_t>(v)] = s;
    }
    return x;
}

SamplerResult gibbs_run(const Network& net, const Evidence& e, const SamplingConfig& cfg) {
    cfg.validate();
    e.validate(net);
    SamplerResult res;
    res.sampled = unobserved(net, e);
    const auto& sampled = res.sampled;
    Marginals beliefs;
    if (cfg.init == InitMode::ibp) beliefs = ibp_beliefs(net, e);
    BlanketKernel kernel(net);

    std::vector<ChainOut> outs(static_cast<std::size_t>(cfg.chains));
    auto t0 = std::chrono::steady_clock::now();
    run_chains(cfg.chains, cfg.threads, [&](int chain) {
        ChainOut& out = outs[static_cast<std::size_t>(chain)];
        Stream stream(cfg.seed, static_cast<std::uint64_t>(chain));
        Assignment x = initialize_chain(net, e, sampled, cfg.init, stream, &beliefs);
        EstimatorAccumulator acc(net);
        out.moved.assign(net.size(), 0);
        std::vector<std::vector<double>> last(net.size());
        std::vector<double> p;

        // Samples one variable; stores its conditional in last[v].
        auto update = [&](int v) {
            double total = kernel(v, x, p);
            auto& keep = last[static_cast<std::size_t>(v)];
            if (!(total > 0.0)) {
                ++out.dead_ends;
                keep.assign(p.size(), 0.0);
                keep[static_cast<std::size_t>(x[static_cast<std::size_t>(v)])] = 1.0;
                return;
            }
            int nonzero = 0;
            for (double& q : p) {
                q /= total;
                nonzero += q > 0.0;
            }
            if (nonzero > 1) out.moved[static_cast<std::size_t>(v)] = 1;
            x[static_cast<std::size_t>(v)] = stream.discrete(p);
            keep = p;
        };

        const int total_sweeps = cfg.burn_in + cfg.samples;
        for (int t = 0; t < total_sweeps; ++t) {
            if (cfg.scan == ScanOrder::systematic) {
                for (int v : sampled) update(v);
            } else {
                for (std::size_t k = 0; k < sampled.size(); ++k) update(sampled[stream.below(sampled.size())]);
                // Mixture terms at the state the sweep ends in.
                for (int v : sampled) {
                    double total = kernel(v, x, p);
                    auto& keep = last[static_cast<std::size_t>(v)];
                    if (total > 0.0) {
                        for (double& q : p) q /= total;
                        keep = p;
                    } else {
                        keep.assign(p.size(), 0.0);
                        keep[static_cast<std::size_t>(x[static_cast<std::size_t>(v)])] = 1.0;
                    }
                }
            }
            if (t < cfg.burn_in) continue;
            for (int v : sampled) {
                acc.add_distribution(v, last[static_cast<std::size_t>(v)]);
                acc.add_value(v, x[static_cast<std::size_t>(v)]);
            }
            acc.next_sample();
        }
        out.mixture = acc.mixture();
        out.histogram = acc.histogram();
    });
    finish(res, outs, net, e, cfg, elapsed(t0));
    for (int v : sampled) {
        bool moved = false;
        for (const auto& o : outs) moved = moved || o.moved[static_cast<std::size_t>(v)];
        if (!moved) res.frozen.push_back(v);
    }
    return res;
}

std::vector<int> order_cutset_members(const CompiledJoinTree& layout, std::span<const int> members) {
    std::vector<std::pair<int, int>> keyed;  // (preorder of top cluster, var)
    for (int m : members) {
        auto sub = layout.tree().subtree_of(m);
        if (sub.empty()) throw std::invalid_argument("cutset member is not conditioned in the join tree");
        int top = sub[0];
        for (int c : sub)
            if (layout.depth(c) < layout.depth(top)) top = c;
        keyed.emplace_back(layout.preorder_index(top), m);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> out;
    for (auto [k, m] : keyed) out.push_back(m);
    return out;
}

CutsetChain::CutsetChain(std::shared_ptr<const CompiledJoinTree> layout, std::vector<int> members,
                         std::span<const int> init, bool incremental)
    : layout_(layout), members_(std::move(members)), incremental_(incremental), engine_(layout, init) {
    for (int m : members_) {
        auto sub = layout_->tree().subtree_of(m);
        if (sub.empty()) throw std::invalid_argument("cutset member is not conditioned in the join tree");
        // Deepest cluster of the member's subtree, ties to the earliest in
        // preorder.
        int best = sub[0];
        for (int c : sub) {
            int dc = layout_->depth(c), db = layout_->depth(best);
            if (dc > db || (dc == db && layout_->preorder_index(c) < layout_->preorder_index(best))) best = c;
        }
        eval_cluster_.push_back(best);
    }
}

double CutsetChain::log_weight() {
    if (!buffered_) buffered_ = engine_.log_probability();
    return *buffered_;
}

double CutsetChain::evaluate(std::size_t k) {
    if (incremental_) return engine_.log_probability_at(eval_cluster_[k]);
    engine_.invalidate_all();
    return engine_.log_probability();
}

std::vector<std::vector<double>> CutsetChain::scan(const Chooser& choose) {
    const Network& net = layout_->network();
    std::vector<std::vector<double>> dists(members_.size());
    std::vector<double> logw;
    for (std::size_t k = 0; k < members_.size(); ++k) {
        const int v = members_[k];
        const int d = net.domain_size(v);
        const int cur = engine_.value(v);
        logw.assign(static_cast<std::size_t>(d), kNegInf);
        int last = cur;
        if (incremental_) {
            logw[static_cast<std::size_t>(cur)] = buffered_ ? *buffered_ : evaluate(k);
            for (int s = 0; s < d; ++s) {
                if (s == cur) continue;
                engine_.set_value(v, s);
                logw[static_cast<std::size_t>(s)] = evaluate(k);
                last = s;
            }
        } else {
            for (int s = 0; s < d; ++s) {
                engine_.set_value(v, s);
                logw[static_cast<std::size_t>(s)] = evaluate(k);
                last = s;
            }
        }
        std::vector<double> p;
        if (!normalize_log_weights(logw, p)) {
            if (last != cur) engine_.set_value(v, cur);
            buffered_ = kNegInf;
            continue;
        }
        int next = choose(v, p);
        if (next != last) engine_.set_value(v, next);
        buffered_ = logw[static_cast<std::size_t>(next)];
        dists[k] = std::move(p);
    }
    return dists;
}

SamplerResult cutset_gibbs_run(const Network& net, const Evidence& e, const Cutset& cutset,
                               const SamplingConfig& cfg) {
    cfg.validate();
    e.validate(net);
    for (int m : cutset.members)
        if (e.contains(m)) throw std::invalid_argument("cutset member is observed");
    std::vector<int> conditioned = cutset.members;
    for (int v : e.variables()) conditioned.push_back(v);
    std::sort(conditioned.begin(), conditioned.end());
    auto layout = std::make_shared<const CompiledJoinTree>(net, build_join_tree(net, conditioned), cfg.limits);
    auto order = order_cutset_members(*layout, cutset.members);

    SamplerResult res;
    res.sampled = cutset.members;
    Marginals beliefs;
    if (cfg.init == InitMode::ibp) beliefs = ibp_beliefs(net, e);
    std::vector<char> in_cutset(net.size(), 0);
    for (int m : cutset.members) in_cutset[static_cast<std::size_t>(m)] = 1;

    std::vector<ChainOut> outs(static_cast<std::size_t>(cfg.chains));
    auto t0 = std::chrono::steady_clock::now();
    run_chains(cfg.chains, cfg.threads, [&](int chain) {
        ChainOut& out = outs[static_cast<std::size_t>(chain)];
        Stream stream(cfg.seed, static_cast<std::uint64_t>(chain));
        std::optional<CutsetChain> cc;
        for (int attempt = 0; attempt < cfg.init_attempts; ++attempt) {
            Assignment x = initialize_chain(net, e, order, cfg.init, stream, &beliefs);
            cc.emplace(layout, order, x, cfg.incremental);
            if (cc->log_weight() != kNegInf) break;
            cc.reset();
        }
        if (!cc) throw std::runtime_error("no cutset state with nonzero weight found for chain " + std::to_string(chain));

        EstimatorAccumulator acc(net);
        auto choose = [&](int, std::span<const double> p) { return stream.discrete(p); };
        const int total = cfg.burn_in + cfg.samples;
        for (int t = 0; t < total; ++t) {
            auto dists = cc->scan(choose);
            for (const auto& d : dists)
                if (d.empty()) ++out.dead_ends;
            if (t < cfg.burn_in) continue;
            std::vector<int> tuple;
            for (std::size_t k = 0; k < order.size(); ++k) {
                const int v = order[k];
                const int s = cc->value(v);
                tuple.push_back(s);
                if (dists[k].empty()) {
                    std::vector<double> delta(static_cast<std::size_t>(net.domain_size(v)), 0.0);
                    delta[static_cast<std::size_t>(s)] = 1.0;
                    acc.add_distribution(v, delta);
                } else {
                    acc.add_distribution(v, dists[k]);
                }
                acc.add_value(v, s);
            }
            out.tuples.insert(std::move(tuple));
            if ((t - cfg.burn_in) % cfg.posterior_every == 0) {
                auto post = cc->posteriors();
                for (std::size_t i = 0; i < net.size(); ++i)
                    if (!in_cutset[i] && !e.contains(static_cast<int>(i)))
                        acc.add_distribution(static_cast<int>(i), post[i]);
            }
            acc.next_sample();
        }
        out.mixture = acc.mixture();
        out.histogram = acc.histogram();
        out.messages = cc->messages_computed();
    });
    finish(res, outs, net, e, cfg, elapsed(t0));
    std::set<std::vector<int>> all;
    for (const auto& o : outs) {
        res.unique_tuples_per_chain.push_back(o.tuples.size());
        all.insert(o.tuples.begin(), o.tuples.end());
    }
    res.unique_tuples = all.size();
    return res;
}

namespace {

void weighted_stats(SamplerResult& res, const std::vector<ChainOut>& outs) {
    double sum = 0.0, sq = 0.0;
    std::uint64_t n = 0;
    bool all_zero = true;
    for (const auto& o : outs) {
        sum += o.w_sum;
        sq += o.w_sq;
        n += o.w_n;
        all_zero = all_zero && o.all_zero;
    }
    res.all_weights_zero = all_zero;
    if (n == 0) return;
    res.weight_mean = sum / static_cast<double>(n);
    double var = n > 1 ? std::max(0.0, (sq - sum * sum / static_cast<double>(n)) / static_cast<double>(n - 1)) : 0.0;
    res.weight_stderr = std::sqrt(var / static_cast<double>(n));
}

// Weighted frequencies; uniform rows when nothing carried weight.
Marginals weighted_estimate(const Network& net, const std::vector<std::vector<double>>& sums, double total) {
    Marginals m;
    m.probs = sums;
    for (std::size_t i = 0; i < net.size(); ++i)
        for (double& v : m.probs[i]) v = total > 0.0 ? v / total : 1.0 / static_cast<double>(m.probs[i].size());
    return m;
}

std::vector<std::vector<double>> zero_sums(const Network& net) {
    std::vector<std::vector<double>> s(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) s[i].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(i))), 0.0);
    return s;
}

}  // namespace

SamplerResult likelihood_weighting_run(const Network& net, const Evidence& e, const SamplingConfig& cfg) {
    cfg.validate();
    e.validate(net);
    SamplerResult res;
    res.sampled = unobserved(net, e);
    std::vector<ChainOut> outs(static_cast<std::size_t>(cfg.chains));
    auto t0 = std::chrono::steady_clock::now();
    run_chains(cfg.chains, cfg.threads, [&](int chain) {
        ChainOut& out = outs[static_cast<std::size_t>(chain)];
        Stream stream(cfg.seed, static_cast<std::uint64_t>(chain));
        auto sums = zero_sums(net);
        Assignment x = e.as_assignment(net.size());
        double total = 0.0;
        for (int t = 0; t < cfg.samples; ++t) {
            double w = 1.0;
            for (int v : net.topological_order()) {
                auto row = net.cpt(v).row(net.row_index(v, x));
                auto it = e.bindings.find(v);
                if (it != e.bindings.end()) {
                    w *= row[static_cast<std::size_t>(it->second)];
                } else {
                    x[static_cast<std::size_t>(v)] = stream.discrete(row);
                }
            }
            for (std::size_t i = 0; i < net.size(); ++i) sums[i][static_cast<std::size_t>(x[i])] += w;
            total += w;
            out.w_sum += w;
            out.w_sq += w * w;
            ++out.w_n;
        }
        out.all_zero = !(total > 0.0);
        out.mixture = weighted_estimate(net, sums, total);
        out.histogram = out.mixture;
    });
    finish(res, outs, net, e, cfg, elapsed(t0));
    weighted_stats(res, outs);
    return res;
}

AisBnState aisbn_initial_state(const Network& net) {
    AisBnState st;
    for (const auto& c : net.cpts()) st.tables.push_back(c.table);
    return st;
}

double aisbn_learning_rate(int k, int k_max, double a, double b) {
    if (k_max <= 0) return a;
    return a * std::pow(b / a, static_cast<double>(k) / static_cast<double>(k_max));
}

namespace {

void floor_rows(std::vector<double>& table, int d, double floor) {
    if (floor <= 0.0) return;
    const std::size_t dd = static_cast<std::size_t>(d);
    for (std::size_t r = 0; r * dd < table.size(); ++r) {
        double sum = 0.0;
        for (std::size_t s = 0; s < dd; ++s) {
            double& v = table[r * dd + s];
            if (v < floor) v = floor;
            sum += v;
        }
        for (std::size_t s = 0; s < dd; ++s) table[r * dd + s] /= sum;
    }
}

}  // namespace

SamplerResult aisbn_run(const Network& net, const Evidence& e, const SamplingConfig& cfg, AisBnState* state) {
    cfg.validate();
    e.validate(net);
    SamplerResult res;
    res.sampled = unobserved(net, e);

    // Only ancestors of evidence have an optimal importance table that
    // differs from the CPT.
    std::vector<char> learn(net.size(), 0);
    {
        std::vector<int> stack = e.variables();
        std::vector<char> seen(net.size(), 0);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int p : net.parents(v))
                if (!seen[static_cast<std::size_t>(p)]) {
                    seen[static_cast<std::size_t>(p)] = 1;
                    stack.push_back(p);
                }
        }
        for (std::size_t i = 0; i < net.size(); ++i) learn[i] = seen[i] && !e.contains(static_cast<int>(i));
    }
    const int l = cfg.update_interval;
    const int k_max = std::min(cfg.max_updates, cfg.samples / (2 * l));
    const AisBnState seed_state = state ? *state : aisbn_initial_state(net);
    if (seed_state.tables.size() != net.size()) throw std::invalid_argument("importance tables do not match the network");

    std::vector<ChainOut> outs(static_cast<std::size_t>(cfg.chains));
    std::vector<AisBnState> learned(static_cast<std::size_t>(cfg.chains));
    auto t0 = std::chrono::steady_clock::now();
    run_chains(cfg.chains, cfg.threads, [&](int chain) {
        ChainOut& out = outs[static_cast<std::size_t>(chain)];
        Stream stream(cfg.seed, static_cast<std::uint64_t>(chain));
        AisBnState st = seed_state;
        for (std::size_t i = 0; i < net.size(); ++i)
            if (learn[i]) floor_rows(st.tables[i], net.domain_size(static_cast<int>(i)), cfg.floor);
        std::vector<std::vector<double>> counts(net.size());
        for (std::size_t i = 0; i < net.size(); ++i)
            if (learn[i]) counts[i].assign(st.tables[i].size(), 0.0);
        auto sums = zero_sums(net);
        double total = 0.0;
        Assignment x = e.as_assignment(net.size());
        std::vector<std::size_t> rows(net.size());

        for (int t = 0; t < cfg.samples; ++t) {
            double w = 1.0;
            for (int v : net.topological_order()) {
                const std::size_t vi = static_cast<std::size_t>(v);
                const std::size_t d = static_cast<std::size_t>(net.domain_size(v));
                rows[vi] = net.row_index(v, x);
                auto p_row = net.cpt(v).row(rows[vi]);
                auto it = e.bindings.find(v);
                if (it != e.bindings.end()) {
                    w *= p_row[static_cast<std::size_t>(it->second)];
                    continue;
                }
                std::span<const double> q_row(st.tables[vi].data() + rows[vi] * d, d);
                int s = stream.discrete(q_row);
                x[vi] = s;
                w *= p_row[static_cast<std::size_t>(s)] / q_row[static_cast<std::size_t>(s)];
            }
            const bool learning = st.updates < k_max;
            if (learning) {
                for (std::size_t i = 0; i < net.size(); ++i)
                    if (learn[i])
                        counts[i][rows[i] * static_cast<std::size_t>(net.domain_size(static_cast<int>(i))) +
                                  static_cast<std::size_t>(x[i])] += w;
                if ((t + 1) % l == 0) {
                    const double eta = aisbn_learning_rate(st.updates, k_max, cfg.eta_a, cfg.eta_b);
                    for (std::size_t i = 0; i < net.size(); ++i) {
                        if (!learn[i]) continue;
                        const std::size_t d = static_cast<std::size_t>(net.domain_size(static_cast<int>(i)));
                        auto& q = st.tables[i];
                        auto& c = counts[i];
                        for (std::size_t r = 0; r * d < q.size(); ++r) {
                            double rs = 0.0;
                            for (std::size_t s = 0; s < d; ++s) rs += c[r * d + s];
                            if (!(rs > 0.0)) continue;
                            for (std::size_t s = 0; s < d; ++s) q[r * d + s] += eta * (c[r * d + s] / rs - q[r * d + s]);
                        }
                        floor_rows(q, static_cast<int>(d), cfg.floor);
                        std::fill(c.begin(), c.end(), 0.0);
                    }
                    ++st.updates;
                }
                continue;
            }
            for (std::size_t i = 0; i < net.size(); ++i) sums[i][static_cast<std::size_t>(x[i])] += w;
            total += w;
            out.w_sum += w;
            out.w_sq += w * w;
            ++out.w_n;
        }
        out.all_zero = !(total > 0.0);
        out.mixture = weighted_estimate(net, sums, total);
        out.histogram = out.mixture;
        learned[static_cast<std::size_t>(chain)] = std::move(st);
    });
    finish(res, outs, net, e, cfg, elapsed(t0));
    weighted_stats(res, outs);
    if (state) *state = learned[0];
    return res;
}

}  // namespace wcs
