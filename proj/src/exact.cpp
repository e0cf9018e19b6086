#include "wcs/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wcs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Stride of every family variable inside the flat CPT table.
std::vector<std::pair<int, std::uint32_t>> cpt_strides(const Network& net, const Cpt& cpt) {
    std::vector<std::pair<int, std::uint32_t>> s;
    s.emplace_back(cpt.child, 1u);
    std::uint64_t stride = static_cast<std::uint64_t>(cpt.child_domain);
    for (std::size_t k = cpt.parents.size(); k-- > 0;) {
        s.emplace_back(cpt.parents[k], static_cast<std::uint32_t>(stride));
        stride *= static_cast<std::uint64_t>(net.domain_size(cpt.parents[k]));
    }
    return s;
}

}  // namespace

CompiledJoinTree::CompiledJoinTree(const Network& net, JoinTree tree, const EngineLimits& limits)
    : net_(&net), tree_(std::move(tree)) {
    const std::size_t n = net.size();
    const std::size_t k = tree_.clusters.size();
    conditioned_.assign(n, 0);
    for (int v : tree_.conditioned) conditioned_[static_cast<std::size_t>(v)] = 1;
    clusters_.resize(k);

    for (std::size_t c = 0; c < k; ++c) {
        auto& cl = clusters_[c];
        cl.vars = tree_.clusters[c];
        std::uint64_t size = 1;
        for (int v : cl.vars) {
            cl.dims.push_back(net.domain_size(v));
            size *= static_cast<std::uint64_t>(net.domain_size(v));
            if (size > limits.max_cluster_entries)
                throw ResourceCapError("cluster table exceeds " + std::to_string(limits.max_cluster_entries) + " entries");
        }
        cl.size = static_cast<std::uint32_t>(size);
        total_entries_ += size;
    }
    if (total_entries_ > limits.max_total_entries)
        throw ResourceCapError("join tree tables exceed " + std::to_string(limits.max_total_entries) + " entries");

    // Digit decoding shared by factor bases and projections.
    auto for_each_entry = [](const Cluster& cl, auto&& fn) {
        std::vector<int> digits(cl.vars.size(), 0);
        for (std::uint32_t j = 0; j < cl.size; ++j) {
            fn(j, digits);
            for (std::size_t p = digits.size(); p-- > 0;) {
                if (++digits[p] < cl.dims[p]) break;
                digits[p] = 0;
            }
        }
    };
    auto position = [](const std::vector<int>& vars, int v) {
        auto it = std::lower_bound(vars.begin(), vars.end(), v);
        return (it != vars.end() && *it == v) ? static_cast<int>(it - vars.begin()) : -1;
    };

    dirty_clusters_.assign(n, {});
    for (std::size_t c = 0; c < k; ++c) {
        auto& cl = clusters_[c];
        for (int f : tree_.attached[c]) {
            Factor fac;
            fac.cpt = f;
            std::vector<std::pair<int, std::uint32_t>> resid;  // cluster position, stride
            for (auto [v, stride] : cpt_strides(net, net.cpt(f))) {
                if (conditioned_[static_cast<std::size_t>(v)]) {
                    fac.cond.emplace_back(v, stride);
                    auto& d = dirty_clusters_[static_cast<std::size_t>(v)];
                    if (d.empty() || d.back() != static_cast<int>(c)) d.push_back(static_cast<int>(c));
                } else {
                    int pos = position(cl.vars, v);
                    if (pos < 0) throw std::logic_error("cpt family not covered by its cluster");
                    resid.emplace_back(pos, stride);
                }
            }
            fac.base.resize(cl.size);
            for_each_entry(cl, [&](std::uint32_t j, const std::vector<int>& digits) {
                std::uint32_t b = 0;
                for (auto [pos, stride] : resid) b += stride * static_cast<std::uint32_t>(digits[static_cast<std::size_t>(pos)]);
                fac.base[j] = b;
            });
            cl.factors.push_back(std::move(fac));
        }
    }

    msg_size_.assign(2 * tree_.edges.size(), 1);
    for (std::size_t e = 0; e < tree_.edges.size(); ++e) {
        auto [a, b] = tree_.edges[e];
        const auto& sep = tree_.separators[e];
        std::uint32_t sep_size = 1;
        for (int v : sep) sep_size *= static_cast<std::uint32_t>(net.domain_size(v));
        msg_size_[2 * e] = msg_size_[2 * e + 1] = static_cast<int>(sep_size);
        for (int side = 0; side < 2; ++side) {
            int self = side == 0 ? a : b;
            int other = side == 0 ? b : a;
            auto& cl = clusters_[static_cast<std::size_t>(self)];
            Link link;
            link.neighbor = other;
            link.out_msg = static_cast<int>(2 * e + static_cast<std::size_t>(side));
            link.in_msg = static_cast<int>(2 * e + 1 - static_cast<std::size_t>(side));
            link.sep_size = sep_size;
            std::vector<std::pair<int, std::uint32_t>> sp;  // cluster position, separator stride
            std::uint32_t stride = 1;
            for (std::size_t q = sep.size(); q-- > 0;) {
                sp.emplace_back(position(cl.vars, sep[q]), stride);
                stride *= static_cast<std::uint32_t>(net.domain_size(sep[q]));
            }
            link.proj.resize(cl.size);
            for_each_entry(cl, [&](std::uint32_t j, const std::vector<int>& digits) {
                std::uint32_t idx = 0;
                for (auto [pos, st] : sp) idx += st * static_cast<std::uint32_t>(digits[static_cast<std::size_t>(pos)]);
                link.proj[j] = idx;
            });
            cl.links.push_back(std::move(link));
        }
    }
    for (auto& cl : clusters_)
        std::sort(cl.links.begin(), cl.links.end(), [](const Link& x, const Link& y) { return x.neighbor < y.neighbor; });

    home_cluster_.assign(n, -1);
    for (std::size_t c = 0; c < k; ++c)
        for (int v : clusters_[c].vars) {
            auto& h = home_cluster_[static_cast<std::size_t>(v)];
            if (h < 0 || clusters_[c].size < clusters_[static_cast<std::size_t>(h)].size) h = static_cast<int>(c);
        }

    depth_.assign(k, 0);
    parent_.assign(k, -1);
    preorder_pos_.assign(k, -1);
    std::vector<int> stack{0};
    int counter = 0;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        preorder_pos_[static_cast<std::size_t>(x)] = counter++;
        const auto& links = clusters_[static_cast<std::size_t>(x)].links;
        for (auto it = links.rbegin(); it != links.rend(); ++it) {
            int y = it->neighbor;
            if (y == parent_[static_cast<std::size_t>(x)]) continue;
            parent_[static_cast<std::size_t>(y)] = x;
            depth_[static_cast<std::size_t>(y)] = depth_[static_cast<std::size_t>(x)] + 1;
            stack.push_back(y);
        }
    }
}

JunctionTreeEngine::JunctionTreeEngine(std::shared_ptr<const CompiledJoinTree> layout, std::span<const int> values)
    : layout_(std::move(layout)), values_(values.begin(), values.end()) {
    const auto& net = layout_->network();
    if (values_.size() != net.size()) throw std::invalid_argument("engine assignment length mismatch");
    for (int v : layout_->tree().conditioned) {
        int s = values_[static_cast<std::size_t>(v)];
        if (s < 0 || s >= net.domain_size(v))
            throw std::invalid_argument("conditioned variable '" + net.variable(v).name + "' has no value");
    }
    const auto& cls = layout_->clusters_;
    potentials_.resize(cls.size());
    potential_valid_.assign(cls.size(), 0);
    for (std::size_t c = 0; c < cls.size(); ++c) potentials_[c].resize(cls[c].size);
    messages_.resize(layout_->msg_size_.size());
    for (std::size_t m = 0; m < messages_.size(); ++m) messages_[m].table.resize(static_cast<std::size_t>(layout_->msg_size_[m]));
}

void JunctionTreeEngine::set_value(int var, int state) {
    if (!layout_->is_conditioned(var)) throw std::invalid_argument("set_value on a variable that is not conditioned");
    if (state < 0 || state >= layout_->network().domain_size(var)) throw std::out_of_range("state out of range");
    auto& slot = values_[static_cast<std::size_t>(var)];
    if (slot == state) return;
    slot = state;
    for (int c : layout_->dirty_clusters_[static_cast<std::size_t>(var)]) {
        potential_valid_[static_cast<std::size_t>(c)] = 0;
        invalidate_from(c);
    }
}

void JunctionTreeEngine::invalidate_all() {
    std::fill(potential_valid_.begin(), potential_valid_.end(), 0);
    for (auto& m : messages_) m.valid = false;
}

void JunctionTreeEngine::invalidate_from(int c) {
    // A valid message implies every message feeding it is valid, so the
    // walk stops at the first already-stale message on each branch.
    const auto& cls = layout_->clusters_;
    std::vector<std::pair<int, int>> stack;  // (from, came_from)
    stack.emplace_back(c, -1);
    while (!stack.empty()) {
        auto [x, prev] = stack.back();
        stack.pop_back();
        for (const auto& link : cls[static_cast<std::size_t>(x)].links) {
            if (link.neighbor == prev) continue;
            auto& m = messages_[static_cast<std::size_t>(link.out_msg)];
            if (!m.valid) continue;
            m.valid = false;
            stack.emplace_back(link.neighbor, x);
        }
    }
}

void JunctionTreeEngine::ensure_potential(int c) {
    if (potential_valid_[static_cast<std::size_t>(c)]) return;
    const auto& cl = layout_->clusters_[static_cast<std::size_t>(c)];
    const auto& net = layout_->network();
    auto& pot = potentials_[static_cast<std::size_t>(c)];
    std::fill(pot.begin(), pot.end(), 1.0);
    for (const auto& f : cl.factors) {
        std::uint32_t off = 0;
        for (auto [v, stride] : f.cond) off += stride * static_cast<std::uint32_t>(values_[static_cast<std::size_t>(v)]);
        const auto& table = net.cpt(f.cpt).table;
        for (std::uint32_t j = 0; j < cl.size; ++j) pot[j] *= table[f.base[j] + off];
    }
    potential_valid_[static_cast<std::size_t>(c)] = 1;
}

const JunctionTreeEngine::Message& JunctionTreeEngine::ensure_message(int from, std::size_t link_idx) {
    const auto& cl = layout_->clusters_[static_cast<std::size_t>(from)];
    const auto& link = cl.links[link_idx];
    auto& out = messages_[static_cast<std::size_t>(link.out_msg)];
    if (out.valid) return out;

    double log_scale = 0.0;
    std::vector<const Message*> inputs;
    std::vector<const std::vector<std::uint32_t>*> projs;
    for (std::size_t l = 0; l < cl.links.size(); ++l) {
        if (l == link_idx) continue;
        const auto& other = cl.links[l];
        // Find the link index on the neighbour's side pointing back here.
        const auto& ncl = layout_->clusters_[static_cast<std::size_t>(other.neighbor)];
        std::size_t back = 0;
        while (ncl.links[back].neighbor != from) ++back;
        const auto& in = ensure_message(other.neighbor, back);
        inputs.push_back(&in);
        projs.push_back(&other.proj);
        log_scale += in.log_scale;
    }
    ensure_potential(from);
    const auto& pot = potentials_[static_cast<std::size_t>(from)];
    std::fill(out.table.begin(), out.table.end(), 0.0);
    if (log_scale != kNegInf) {
        for (std::uint32_t j = 0; j < cl.size; ++j) {
            double v = pot[j];
            for (std::size_t q = 0; q < inputs.size() && v != 0.0; ++q) v *= inputs[q]->table[(*projs[q])[j]];
            out.table[link.proj[j]] += v;
        }
    }
    double sum = 0.0;
    for (double v : out.table) sum += v;
    if (sum > 0.0) {
        for (double& v : out.table) v /= sum;
        out.log_scale = log_scale + std::log(sum);
    } else {
        out.log_scale = kNegInf;
    }
    out.valid = true;
    ++messages_computed_;
    return out;
}

std::vector<double> JunctionTreeEngine::belief(int c, double& log_scale) {
    const auto& cl = layout_->clusters_[static_cast<std::size_t>(c)];
    std::vector<const Message*> inputs;
    log_scale = 0.0;
    for (const auto& link : cl.links) {
        const auto& ncl = layout_->clusters_[static_cast<std::size_t>(link.neighbor)];
        std::size_t back = 0;
        while (ncl.links[back].neighbor != c) ++back;
        const auto& in = ensure_message(link.neighbor, back);
        inputs.push_back(&in);
        log_scale += in.log_scale;
    }
    ensure_potential(c);
    std::vector<double> b = potentials_[static_cast<std::size_t>(c)];
    for (std::size_t q = 0; q < inputs.size(); ++q) {
        const auto& proj = cl.links[q].proj;
        const auto& tab = inputs[q]->table;
        for (std::uint32_t j = 0; j < cl.size; ++j) b[j] *= tab[proj[j]];
    }
    return b;
}

double JunctionTreeEngine::log_probability_at(int cluster) {
    double log_scale = 0.0;
    auto b = belief(cluster, log_scale);
    if (log_scale == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : b) sum += v;
    return sum > 0.0 ? log_scale + std::log(sum) : kNegInf;
}

double JunctionTreeEngine::calibrate() {
    const auto& cls = layout_->clusters_;
    for (std::size_t c = 0; c < cls.size(); ++c)
        for (std::size_t l = 0; l < cls[c].links.size(); ++l) ensure_message(static_cast<int>(c), l);
    return log_probability();
}

std::vector<std::vector<double>> JunctionTreeEngine::posteriors() {
    const auto& net = layout_->network();
    const std::size_t n = net.size();
    std::vector<std::vector<double>> out(n);
    std::vector<std::vector<int>> by_cluster(layout_->clusters_.size());
    for (std::size_t v = 0; v < n; ++v) {
        out[v].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(v))), 0.0);
        if (layout_->is_conditioned(static_cast<int>(v)))
            out[v][static_cast<std::size_t>(values_[v])] = 1.0;
        else
            by_cluster[static_cast<std::size_t>(layout_->home_cluster_[v])].push_back(static_cast<int>(v));
    }
    bool checked = false;
    for (std::size_t c = 0; c < by_cluster.size(); ++c) {
        if (by_cluster[c].empty() && checked) continue;
        double log_scale = 0.0;
        auto b = belief(static_cast<int>(c), log_scale);
        double total = 0.0;
        for (double x : b) total += x;
        if (log_scale == kNegInf || total <= 0.0) throw ZeroEvidenceError();
        checked = true;
        const auto& cl = layout_->clusters_[c];
        std::vector<int> digits(cl.vars.size(), 0);
        for (std::uint32_t j = 0; j < cl.size; ++j) {
            for (int v : by_cluster[c]) {
                auto pos = static_cast<std::size_t>(std::lower_bound(cl.vars.begin(), cl.vars.end(), v) - cl.vars.begin());
                out[static_cast<std::size_t>(v)][static_cast<std::size_t>(digits[pos])] += b[j];
            }
            for (std::size_t p = digits.size(); p-- > 0;) {
                if (++digits[p] < cl.dims[p]) break;
                digits[p] = 0;
            }
        }
        for (int v : by_cluster[c])
            for (double& x : out[static_cast<std::size_t>(v)]) x /= total;
    }
    return out;
}

bool normalize_log_weights(std::span<const double> log_w, std::vector<double>& out) {
    out.assign(log_w.size(), 0.0);
    double mx = kNegInf;
    for (double l : log_w) mx = std::max(mx, l);
    if (mx == kNegInf) return false;
    double sum = 0.0;
    for (std::size_t i = 0; i < log_w.size(); ++i) {
        out[i] = log_w[i] == kNegInf ? 0.0 : std::exp(log_w[i] - mx);
        sum += out[i];
    }
    for (double& v : out) v /= sum;
    return true;
}

namespace {

std::vector<int> merged(std::vector<int> a, const std::vector<int>& b) {
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

}  // namespace

Marginals jtc_posteriors(const Network& net, const Evidence& e, const EngineLimits& limits) {
    e.validate(net);
    auto ev = e.variables();
    auto layout = std::make_shared<const CompiledJoinTree>(net, build_join_tree(net, ev), limits);
    JunctionTreeEngine engine(layout, e.as_assignment(net.size()));
    double lp = engine.calibrate();
    if (lp == kNegInf) throw ZeroEvidenceError();
    Marginals m;
    m.probs = engine.posteriors();
    m.evidence_probability = std::exp(lp);
    return m;
}

double evidence_probability(const Network& net, const Evidence& e, const EngineLimits& limits) {
    e.validate(net);
    if (e.empty()) return 1.0;
    auto layout = std::make_shared<const CompiledJoinTree>(net, build_join_tree(net, e.variables()), limits);
    JunctionTreeEngine engine(layout, e.as_assignment(net.size()));
    return std::exp(engine.log_probability());
}

Marginals cutset_conditioning(const Network& net, const Evidence& e, const Cutset& cutset,
                              const ConditioningOptions& opts) {
    e.validate(net);
    double states = 1.0;
    for (int c : cutset.members) {
        if (e.contains(c)) throw std::invalid_argument("cutset member is observed");
        states *= net.domain_size(c);
    }
    if (states > static_cast<double>(opts.max_cutset_states))
        throw ResourceCapError("cutset of " + std::to_string(cutset.members.size()) + " members has more than " +
                               std::to_string(opts.max_cutset_states) + " states");

    auto conditioned = merged(cutset.members, e.variables());
    auto layout = std::make_shared<const CompiledJoinTree>(net, build_join_tree(net, conditioned), opts.limits);
    Assignment x = e.as_assignment(net.size());
    for (int c : cutset.members) x[static_cast<std::size_t>(c)] = 0;
    JunctionTreeEngine engine(layout, x);

    // Weighted sum with a running log-domain maximum.
    std::vector<std::vector<double>> acc(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) acc[i].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(i))), 0.0);
    double ref = kNegInf, total = 0.0;
    do {
        for (int c : cutset.members) engine.set_value(c, x[static_cast<std::size_t>(c)]);
        double lp = engine.calibrate();
        if (lp == kNegInf) continue;
        if (lp > ref) {
            double scale = ref == kNegInf ? 0.0 : std::exp(ref - lp);
            for (auto& row : acc)
                for (double& v : row) v *= scale;
            total *= scale;
            ref = lp;
        }
        double w = std::exp(lp - ref);
        auto post = engine.posteriors();
        for (std::size_t i = 0; i < net.size(); ++i)
            for (std::size_t s = 0; s < acc[i].size(); ++s) acc[i][s] += w * post[i][s];
        total += w;
    } while (next_assignment(net, cutset.members, x));
    if (total <= 0.0) throw ZeroEvidenceError();
    Marginals m;
    m.probs = std::move(acc);
    for (auto& row : m.probs)
        for (double& v : row) v /= total;
    m.evidence_probability = std::exp(ref + std::log(total));
    clamp_evidence(m, net, e);
    return m;
}

std::optional<std::vector<double>> conditioned_cutset_distribution(const Network& net, const Cutset& cutset,
                                                                   std::size_t member, std::span<const int> partial,
                                                                   const Evidence& e, const EngineLimits& limits) {
    if (member >= cutset.members.size()) throw std::out_of_range("cutset member index out of range");
    const int target = cutset.members[member];
    auto conditioned = merged(cutset.members, e.variables());
    auto layout = std::make_shared<const CompiledJoinTree>(net, build_join_tree(net, conditioned), limits);
    Assignment x = e.as_assignment(net.size());
    for (int c : cutset.members) {
        if (c == target) continue;
        int s = partial[static_cast<std::size_t>(c)];
        if (s < 0 || s >= net.domain_size(c)) throw std::invalid_argument("partial assignment misses a cutset member");
        x[static_cast<std::size_t>(c)] = s;
    }
    x[static_cast<std::size_t>(target)] = 0;
    JunctionTreeEngine engine(layout, x);
    std::vector<double> log_w(static_cast<std::size_t>(net.domain_size(target)));
    for (int s = 0; s < net.domain_size(target); ++s) {
        engine.set_value(target, s);
        engine.invalidate_all();
        log_w[static_cast<std::size_t>(s)] = engine.log_probability();
    }
    std::vector<double> dist;
    if (!normalize_log_weights(log_w, dist)) return std::nullopt;
    return dist;
}

}  // namespace wcs
