#ifndef WCS_MODEL_HPP
#define WCS_MODEL_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wcs {

/// Sentinel for an unassigned slot in an Assignment.
inline constexpr int kUnassigned = -1;

// Error taxonomy. The CLI maps each class to a distinct exit code.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroEvidenceError : public std::runtime_error {
public:
    ZeroEvidenceError() : std::runtime_error("zero-probability evidence") {}
    using std::runtime_error::runtime_error;
};

class ResourceCapError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Variable {
    int index = 0;
    std::string name;
    std::vector<std::string> states;

    int domain_size() const { return static_cast<int>(states.size()); }
};

/// Conditional probability table P(child | parents).
///
/// Rows enumerate parent assignments with the first listed parent most
/// significant; inside a row the child state varies fastest. The table is
/// stored flat: entry (row r, child state s) lives at r * child_domain + s.
struct Cpt {
    int child = 0;
    std::vector<int> parents;
    int child_domain = 0;
    std::vector<double> table;

    std::size_t row_count() const {
        return child_domain == 0 ? 0 : table.size() / static_cast<std::size_t>(child_domain);
    }
    std::span<const double> row(std::size_t r) const {
        return {table.data() + r * static_cast<std::size_t>(child_domain),
                static_cast<std::size_t>(child_domain)};
    }
    /// Child followed by parents.
    std::vector<int> family() const;
};

/// Total or partial assignment: one state index per variable, kUnassigned
/// where the variable carries no value.
using Assignment = std::vector<int>;

class Network;

/// Observed variables. Ordered by variable index.
struct Evidence {
    std::map<int, int> bindings;

    bool contains(int var) const { return bindings.count(var) != 0; }
    std::size_t size() const { return bindings.size(); }
    bool empty() const { return bindings.empty(); }
    /// Length-n assignment with evidence values set and kUnassigned elsewhere.
    Assignment as_assignment(std::size_t n) const;
    std::vector<int> variables() const;
    void validate(const Network& net) const;
};

/// Discrete Bayesian network: variables plus one CPT per variable, where
/// cpts[i].child == i.
class Network {
public:
    Network() = default;
    /// Validates and takes ownership. Throws ValidationError on any
    /// structural or numeric defect.
    Network(std::vector<Variable> variables, std::vector<Cpt> cpts);

    std::size_t size() const { return variables_.size(); }
    const std::vector<Variable>& variables() const { return variables_; }
    const Variable& variable(int i) const { return variables_[static_cast<std::size_t>(i)]; }
    const std::vector<Cpt>& cpts() const { return cpts_; }
    const Cpt& cpt(int i) const { return cpts_[static_cast<std::size_t>(i)]; }
    int domain_size(int i) const { return variable(i).domain_size(); }
    const std::vector<int>& parents(int i) const { return cpt(i).parents; }
    const std::vector<int>& children(int i) const { return children_[static_cast<std::size_t>(i)]; }
    /// Parents before children.
    const std::vector<int>& topological_order() const { return topo_; }
    int max_domain_size() const;

    /// Index of a variable by name, or -1.
    int find(const std::string& name) const;
    /// Index of a state label within a variable, or -1.
    int find_state(int var, const std::string& label) const;

    /// Row index of cpt(i) selected by the parent values in x.
    std::size_t row_index(int i, std::span<const int> x) const;
    /// P(x_i | x_pa(i)).
    double conditional(int i, std::span<const int> x) const;

private:
    std::vector<Variable> variables_;
    std::vector<Cpt> cpts_;
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_;
};

/// Per-variable posterior vectors, optionally with P(e).
struct Marginals {
    std::vector<std::vector<double>> probs;
    std::optional<double> evidence_probability;

    std::size_t size() const { return probs.size(); }
    const std::vector<double>& operator[](std::size_t i) const { return probs[i]; }
    std::vector<double>& operator[](std::size_t i) { return probs[i]; }
};

/// Product form of the joint: prod_i P(x_i | x_pa(i)). Throws
/// std::invalid_argument on a partial assignment.
double joint_probability(const Network& net, std::span<const int> x);

/// Natural log of joint_probability; -infinity for impossible assignments.
double log_joint_probability(const Network& net, std::span<const int> x);

/// Parents, children, and the children's other parents of i (sorted).
std::vector<int> markov_blanket(const Network& net, int i);

struct BruteForceOptions {
    std::uint64_t max_joint_entries = std::uint64_t{1} << 24;
};

/// Exact posteriors and P(e) by enumerating every completion of e.
/// Throws ResourceCapError above the cap, ZeroEvidenceError when P(e) = 0.
Marginals brute_force_posteriors(const Network& net, const Evidence& e,
                                 const BruteForceOptions& opts = {});

/// Writes the degenerate vector (1 on the observed state) for every bound
/// variable.
void clamp_evidence(Marginals& m, const Network& net, const Evidence& e);

/// Odometer over the listed variables of x (last listed fastest). Returns
/// false after wrapping around to all zeros.
bool next_assignment(const Network& net, std::span<const int> free_vars, Assignment& x);

}  // namespace wcs

#endif
