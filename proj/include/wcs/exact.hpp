#ifndef WCS_EXACT_HPP
#define WCS_EXACT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wcs/graph.hpp"
#include "wcs/model.hpp"

namespace wcs {

struct EngineLimits {
    std::uint64_t max_cluster_entries = std::uint64_t{1} << 22;
    std::uint64_t max_total_entries = std::uint64_t{1} << 26;
};

/// Immutable, shareable layout of a join tree over a network: per-cluster
/// table shapes, CPT index maps, and separator projections. The network must
/// outlive it.
class CompiledJoinTree {
public:
    CompiledJoinTree(const Network& net, JoinTree tree, const EngineLimits& limits = {});

    const Network& network() const { return *net_; }
    const JoinTree& tree() const { return tree_; }
    std::size_t cluster_count() const { return clusters_.size(); }
    int root() const { return 0; }
    int depth(int c) const { return depth_[static_cast<std::size_t>(c)]; }
    int parent(int c) const { return parent_[static_cast<std::size_t>(c)]; }
    /// Position of a cluster in a depth-first preorder from the root.
    int preorder_index(int c) const { return preorder_pos_[static_cast<std::size_t>(c)]; }
    std::uint64_t table_entries() const { return total_entries_; }
    bool is_conditioned(int var) const { return conditioned_[static_cast<std::size_t>(var)] != 0; }

private:
    friend class JunctionTreeEngine;

    struct Factor {
        int cpt = 0;
        std::vector<std::uint32_t> base;                      // CPT offset from residual vars, per entry
        std::vector<std::pair<int, std::uint32_t>> cond;      // conditioned var, CPT stride
    };
    struct Link {
        int neighbor = 0;
        int out_msg = 0;  // this -> neighbor
        int in_msg = 0;   // neighbor -> this
        std::uint32_t sep_size = 1;
        std::vector<std::uint32_t> proj;  // cluster entry -> separator entry
    };
    struct Cluster {
        std::vector<int> vars;
        std::vector<int> dims;
        std::uint32_t size = 1;
        std::vector<Factor> factors;
        std::vector<Link> links;
    };

    const Network* net_;
    JoinTree tree_;
    std::vector<Cluster> clusters_;
    std::vector<int> msg_size_;
    std::vector<std::vector<int>> dirty_clusters_;  // per conditioned var
    std::vector<int> home_cluster_;                 // per residual var, -1 otherwise
    std::vector<char> conditioned_;
    std::vector<int> depth_, parent_, preorder_pos_;
    std::uint64_t total_entries_ = 0;
};

/// Join-tree propagation over a network whose conditioned variables carry
/// fixed values. Messages are cached; changing a conditioned value
/// invalidates exactly the messages flowing away from the clusters whose
/// functions mention it, so repeated queries only recompute what changed.
class JunctionTreeEngine {
public:
    /// `values` is a full-length assignment; every conditioned variable of
    /// the tree must carry a valid state.
    JunctionTreeEngine(std::shared_ptr<const CompiledJoinTree> layout, std::span<const int> values);

    const CompiledJoinTree& layout() const { return *layout_; }
    void set_value(int var, int state);
    int value(int var) const { return values_[static_cast<std::size_t>(var)]; }
    const Assignment& values() const { return values_; }

    /// log P(conditioned assignment), evaluated at the root.
    double log_probability() { return log_probability_at(layout_->root()); }
    /// Same quantity evaluated at a chosen cluster.
    double log_probability_at(int cluster);
    /// Brings every message up to date and returns log P(conditioned).
    double calibrate();
    /// Posterior of every variable given the conditioned values (degenerate
    /// for conditioned ones). Throws ZeroEvidenceError if P = 0.
    std::vector<std::vector<double>> posteriors();

    void invalidate_all();
    std::uint64_t messages_computed() const { return messages_computed_; }

private:
    struct Message {
        std::vector<double> table;
        double log_scale = 0.0;
        bool valid = false;
    };

    void ensure_potential(int c);
    const Message& ensure_message(int from, std::size_t link);
    void invalidate_from(int c);
    std::vector<double> belief(int c, double& log_scale);

    std::shared_ptr<const CompiledJoinTree> layout_;
    Assignment values_;
    std::vector<std::vector<double>> potentials_;
    std::vector<char> potential_valid_;
    std::vector<Message> messages_;
    std::uint64_t messages_computed_ = 0;
};

/// Exact posteriors and P(e) by join-tree propagation with the evidence
/// instantiated. Throws ZeroEvidenceError or ResourceCapError.
Marginals jtc_posteriors(const Network& net, const Evidence& e, const EngineLimits& limits = {});

/// P(e); 1 for empty evidence.
double evidence_probability(const Network& net, const Evidence& e, const EngineLimits& limits = {});

struct ConditioningOptions {
    std::uint64_t max_cutset_states = std::uint64_t{1} << 20;
    EngineLimits limits;
};

/// Exact posteriors by enumerating every instantiation of the cutset and
/// mixing the conditioned posteriors with weights P(c, e).
Marginals cutset_conditioning(const Network& net, const Evidence& e, const Cutset& cutset,
                              const ConditioningOptions& opts = {});

/// P(C_i | c_{-i}, e) for member `member` of the cutset, one full
/// propagation per candidate value. `partial` must assign every other
/// member. Empty when every candidate has zero weight.
std::optional<std::vector<double>> conditioned_cutset_distribution(const Network& net, const Cutset& cutset,
                                                                   std::size_t member, std::span<const int> partial,
                                                                   const Evidence& e,
                                                                   const EngineLimits& limits = {});

/// Normalizes log-weights in place into probabilities. Returns false when
/// every weight is zero.
bool normalize_log_weights(std::span<const double> log_w, std::vector<double>& out);

}  // namespace wcs

#endif
