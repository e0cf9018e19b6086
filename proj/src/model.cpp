#include "wcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace wcs {

std::vector<int> Cpt::family() const {
    std::vector<int> f;
    f.reserve(parents.size() + 1);
    f.push_back(child);
    f.insert(f.end(), parents.begin(), parents.end());
    return f;
}

Assignment Evidence::as_assignment(std::size_t n) const {
    Assignment x(n, kUnassigned);
    for (auto [var, state] : bindings) x[static_cast<std::size_t>(var)] = state;
    return x;
}

std::vector<int> Evidence::variables() const {
    std::vector<int> v;
    v.reserve(bindings.size());
    for (const auto& kv : bindings) v.push_back(kv.first);
    return v;
}

void Evidence::validate(const Network& net) const {
    for (auto [var, state] : bindings) {
        if (var < 0 || static_cast<std::size_t>(var) >= net.size())
            throw ValidationError("evidence references unknown variable index " + std::to_string(var));
        if (state < 0 || state >= net.domain_size(var))
            throw ValidationError("evidence state " + std::to_string(state) + " out of range for variable '" +
                                  net.variable(var).name + "'");
    }
}

namespace {

std::string row_label(const Network& net, const Cpt& cpt, std::size_t r) {
    std::ostringstream os;
    os << "cpt of '" << net.variables()[static_cast<std::size_t>(cpt.child)].name << "' row " << r;
    return os.str();
}

}  // namespace

Network::Network(std::vector<Variable> variables, std::vector<Cpt> cpts)
    : variables_(std::move(variables)), cpts_(std::move(cpts)) {
    const std::size_t n = variables_.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto& v = variables_[i];
        if (v.index != static_cast<int>(i))
            throw ValidationError("variable indices must be contiguous from 0");
        if (v.states.empty()) throw ValidationError("variable '" + v.name + "' has an empty domain");
        std::set<std::string> uniq(v.states.begin(), v.states.end());
        if (uniq.size() != v.states.size())
            throw ValidationError("variable '" + v.name + "' has duplicate state labels");
    }
    {
        std::set<std::string> names;
        for (const auto& v : variables_)
            if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
    }
    if (cpts_.size() != n) throw ValidationError("expected exactly one cpt per variable");
    std::sort(cpts_.begin(), cpts_.end(), [](const Cpt& a, const Cpt& b) { return a.child < b.child; });
    for (std::size_t i = 0; i < n; ++i) {
        auto& c = cpts_[i];
        if (c.child != static_cast<int>(i)) throw ValidationError("variable '" + variables_[i].name + "' has no cpt");
        c.child_domain = variables_[i].domain_size();
        std::size_t rows = 1;
        std::set<int> seen;
        for (int p : c.parents) {
            if (p < 0 || static_cast<std::size_t>(p) >= n)
                throw ValidationError("cpt of '" + variables_[i].name + "' references unknown parent");
            if (p == c.child) throw ValidationError("variable '" + variables_[i].name + "' is its own parent");
            if (!seen.insert(p).second)
                throw ValidationError("cpt of '" + variables_[i].name + "' lists a parent twice");
            rows *= static_cast<std::size_t>(variables_[static_cast<std::size_t>(p)].domain_size());
        }
        if (c.table.size() != rows * static_cast<std::size_t>(c.child_domain)) {
            std::ostringstream os;
            os << "cpt of '" << variables_[i].name << "' has shape mismatch: expected " << rows << " rows of "
               << c.child_domain << " entries";
            throw ValidationError(os.str());
        }
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (double p : c.row(r)) {
                if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(row_label(*this, c, r) + " has an entry outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                std::ostringstream os;
                os << row_label(*this, c, r) << " sums to " << sum << ", not 1";
                throw ValidationError(os.str());
            }
        }
    }
    children_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i)
        for (int p : cpts_[i].parents) children_[static_cast<std::size_t>(p)].push_back(static_cast<int>(i));

    // Kahn's algorithm, smallest index first.
    std::vector<int> indeg(n);
    for (std::size_t i = 0; i < n; ++i) indeg[i] = static_cast<int>(cpts_[i].parents.size());
    std::set<int> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert(static_cast<int>(i));
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(v);
        for (int c : children_[static_cast<std::size_t>(v)])
            if (--indeg[static_cast<std::size_t>(c)] == 0) ready.insert(c);
    }
    if (topo_.size() != n) {
        std::string where;
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] > 0) {
                where = variables_[i].name;
                break;
            }
        throw ValidationError("cycle detected in parent relation (involving '" + where + "')");
    }
}

int Network::max_domain_size() const {
    int d = 0;
    for (const auto& v : variables_) d = std::max(d, v.domain_size());
    return d;
}

int Network::find(const std::string& name) const {
    for (const auto& v : variables_)
        if (v.name == name) return v.index;
    return -1;
}

int Network::find_state(int var, const std::string& label) const {
    const auto& st = variable(var).states;
    auto it = std::find(st.begin(), st.end(), label);
    return it == st.end() ? -1 : static_cast<int>(it - st.begin());
}

std::size_t Network::row_index(int i, std::span<const int> x) const {
    std::size_t r = 0;
    for (int p : cpt(i).parents)
        r = r * static_cast<std::size_t>(domain_size(p)) + static_cast<std::size_t>(x[static_cast<std::size_t>(p)]);
    return r;
}

double Network::conditional(int i, std::span<const int> x) const {
    const auto& c = cpt(i);
    return c.table[row_index(i, x) * static_cast<std::size_t>(c.child_domain) +
                   static_cast<std::size_t>(x[static_cast<std::size_t>(i)])];
}

namespace {

void require_total(const Network& net, std::span<const int> x) {
    if (x.size() != net.size()) throw std::invalid_argument("assignment length does not match network size");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < 0 || x[i] >= net.domain_size(static_cast<int>(i)))
            throw std::invalid_argument("partial assignment: variable '" + net.variable(static_cast<int>(i)).name +
                                        "' has no valid value");
}

}  // namespace

double joint_probability(const Network& net, std::span<const int> x) {
    require_total(net, x);
    double p = 1.0;
    bool tiny = false;
    for (std::size_t i = 0; i < net.size(); ++i) {
        double f = net.conditional(static_cast<int>(i), x);
        if (f < 1e-300) tiny = true;
        p *= f;
    }
    if (!tiny) return p;
    return std::exp(log_joint_probability(net, x));
}

double log_joint_probability(const Network& net, std::span<const int> x) {
    require_total(net, x);
    double lp = 0.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        double f = net.conditional(static_cast<int>(i), x);
        if (f == 0.0) return -std::numeric_limits<double>::infinity();
        lp += std::log(f);
    }
    return lp;
}

std::vector<int> markov_blanket(const Network& net, int i) {
    if (i < 0 || static_cast<std::size_t>(i) >= net.size()) throw std::out_of_range("variable index out of range");
    std::set<int> mb(net.parents(i).begin(), net.parents(i).end());
    for (int c : net.children(i)) {
        mb.insert(c);
        for (int p : net.parents(c)) mb.insert(p);
    }
    mb.erase(i);
    return {mb.begin(), mb.end()};
}

bool next_assignment(const Network& net, std::span<const int> free_vars, Assignment& x) {
    for (std::size_t k = free_vars.size(); k-- > 0;) {
        auto v = static_cast<std::size_t>(free_vars[k]);
        if (++x[v] < net.domain_size(free_vars[k])) return true;
        x[v] = 0;
    }
    return false;
}

Marginals brute_force_posteriors(const Network& net, const Evidence& e, const BruteForceOptions& opts) {
    e.validate(net);
    std::vector<int> free_vars;
    double space = 1.0;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (!e.contains(static_cast<int>(i))) {
            free_vars.push_back(static_cast<int>(i));
            space *= net.domain_size(static_cast<int>(i));
        }
    if (space > static_cast<double>(opts.max_joint_entries))
        throw ResourceCapError("enumeration of " + std::to_string(space) + " joint entries exceeds the cap");

    Assignment x = e.as_assignment(net.size());
    for (int v : free_vars) x[static_cast<std::size_t>(v)] = 0;

    // Pass 1: log-domain maximum so pass 2 can accumulate scaled weights.
    double max_lp = -std::numeric_limits<double>::infinity();
    Assignment y = x;
    do {
        max_lp = std::max(max_lp, log_joint_probability(net, y));
    } while (next_assignment(net, free_vars, y));
    if (max_lp == -std::numeric_limits<double>::infinity()) throw ZeroEvidenceError();

    Marginals m;
    m.probs.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) m.probs[i].assign(static_cast<std::size_t>(net.domain_size(static_cast<int>(i))), 0.0);
    double total = 0.0;
    do {
        double w = std::exp(log_joint_probability(net, x) - max_lp);
        if (w == 0.0) continue;
        total += w;
        for (std::size_t i = 0; i < net.size(); ++i) m.probs[i][static_cast<std::size_t>(x[i])] += w;
    } while (next_assignment(net, free_vars, x));
    for (auto& row : m.probs)
        for (double& p : row) p /= total;
    m.evidence_probability = std::exp(std::log(total) + max_lp);
    clamp_evidence(m, net, e);
    return m;
}

void clamp_evidence(Marginals& m, const Network& net, const Evidence& e) {
    for (auto [var, state] : e.bindings) {
        auto& row = m.probs[static_cast<std::size_t>(var)];
        row.assign(static_cast<std::size_t>(net.domain_size(var)), 0.0);
        row[static_cast<std::size_t>(state)] = 1.0;
    }
}

}  // namespace wcs
