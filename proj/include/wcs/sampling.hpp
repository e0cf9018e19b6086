#ifndef WCS_SAMPLING_HPP
#define WCS_SAMPLING_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wcs/exact.hpp"
#include "wcs/graph.hpp"
#include "wcs/model.hpp"
#include "wcs/random.hpp"

namespace wcs {

enum class ScanOrder { systematic, random };
enum class InitMode { ibp, uniform };
enum class EstimatorKind { mixture, histogram };

struct SamplingConfig {
    int chains = 1;           // M
    int samples = 1000;       // T, per chain, after burn-in
    int burn_in = 0;          // K
    ScanOrder scan = ScanOrder::systematic;
    std::uint64_t seed = 0;
    InitMode init = InitMode::ibp;
    EstimatorKind estimator = EstimatorKind::mixture;
    int threads = 1;

    // Cutset sampling.
    bool incremental = true;
    int posterior_every = 1;  // evaluate the non-cutset mixture every k-th sample
    int init_attempts = 1000;
    EngineLimits limits;

    // AIS-BN.
    int update_interval = 2500;  // l
    int max_updates = 10;        // k_max, capped by T / (2 l)
    double eta_a = 0.4;
    double eta_b = 0.14;
    double floor = 0.0005;

    /// Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

/// Running sums for the mixture estimator and counts for the histogram
/// estimator.
class EstimatorAccumulator {
public:
    EstimatorAccumulator() = default;
    explicit EstimatorAccumulator(const Network& net);

    void add_distribution(int var, std::span<const double> p);
    void add_value(int var, int state);
    /// Closes one sample.
    void next_sample() { ++count_; }

    std::uint64_t count() const { return count_; }
    std::uint64_t distribution_count(int var) const { return mix_n_[static_cast<std::size_t>(var)]; }
    const std::vector<double>& mixture_sum(int var) const { return mix_[static_cast<std::size_t>(var)]; }
    const std::vector<std::uint64_t>& histogram_counts(int var) const { return hist_[static_cast<std::size_t>(var)]; }

    /// Normalized mixture estimate (zeros for variables never fed).
    Marginals mixture() const;
    /// Normalized histogram estimate; variables without counts fall back to
    /// their mixture estimate.
    Marginals histogram() const;

private:
    std::vector<std::vector<double>> mix_;
    std::vector<std::uint64_t> mix_n_;
    std::vector<std::vector<std::uint64_t>> hist_;
    std::uint64_t count_ = 0;
};

struct SamplerResult {
    /// Estimates of the configured estimator.
    std::vector<Marginals> per_chain;
    Marginals pooled;  // mean of per_chain
    std::vector<Marginals> per_chain_mixture, per_chain_histogram;
    Marginals pooled_mixture, pooled_histogram;

    std::vector<int> sampled;          // sampling set
    std::uint64_t total_samples = 0;   // across chains, excluding burn-in
    double seconds = 0.0;              // wall clock, informational only
    double samples_per_second = 0.0;
    std::uint64_t dead_ends = 0;       // updates whose conditional was all zero
    std::uint64_t unique_tuples = 0;   // distinct cutset states visited (union over chains)
    std::vector<std::uint64_t> unique_tuples_per_chain;
    /// Gibbs: sampled variables whose conditional was degenerate at every
    /// update, a symptom of a non-ergodic chain.
    std::vector<int> frozen;
    // Weighted samplers.
    double weight_mean = 0.0;
    double weight_stderr = 0.0;
    bool all_weights_zero = false;
    std::uint64_t messages = 0;  // cutset sampling: cluster messages computed
};

/// P(X_i | x_{-i}) from the Markov blanket; empty when every state has zero
/// probability.
std::optional<std::vector<double>> markov_blanket_distribution(const Network& net, int i, std::span<const int> x);

/// Initial assignment: evidence clamped, sampled variables drawn from IBP
/// beliefs (or uniformly), everything else unassigned. `beliefs` is used
/// for ibp mode when given, otherwise IBP runs here.
Assignment initialize_chain(const Network& net, const Evidence& e, std::span<const int> sampled, InitMode mode,
                            Stream& stream, const Marginals* beliefs = nullptr);

SamplerResult gibbs_run(const Network& net, const Evidence& e, const SamplingConfig& cfg);

/// Orders cutset members by a depth-first traversal of the cluster tree:
/// by the preorder position of the top cluster of each member's subtree.
std::vector<int> order_cutset_members(const CompiledJoinTree& layout, std::span<const int> members);

/// One chain of cutset sampling over a compiled join tree of C plus E.
/// Each scan resamples every member from P(C_i | c_{-i}, e). The
/// incremental form evaluates member i only at one cluster of its subtree,
/// reuses the buffered joint of the current value, and lets the engine's
/// message cache recompute only what changed; the naive form repropagates
/// the whole tree for every candidate value.
class CutsetChain {
public:
    /// Draws a state index from a distribution over member `var`.
    using Chooser = std::function<int(int var, std::span<const double> dist)>;

    CutsetChain(std::shared_ptr<const CompiledJoinTree> layout, std::vector<int> members, std::span<const int> init,
                bool incremental);

    const std::vector<int>& members() const { return members_; }
    int value(int var) const { return engine_.value(var); }
    /// log P(c, e) of the current state.
    double log_weight();
    /// One full scan. Returns the distribution used for each member (in
    /// member order); an empty vector marks a dead end, where the member
    /// keeps its value.
    std::vector<std::vector<double>> scan(const Chooser& choose);
    /// P(X | c, e) for every variable at the current state.
    std::vector<std::vector<double>> posteriors() { return engine_.posteriors(); }
    std::uint64_t messages_computed() const { return engine_.messages_computed(); }
    JunctionTreeEngine& engine() { return engine_; }

private:
    double evaluate(std::size_t k);

    std::shared_ptr<const CompiledJoinTree> layout_;
    std::vector<int> members_;
    std::vector<int> eval_cluster_;
    bool incremental_;
    JunctionTreeEngine engine_;
    std::optional<double> buffered_;  // log P of the current state
};

/// Cutset sampling. Throws std::runtime_error when no initial cutset state
/// with nonzero weight is found within cfg.init_attempts draws.
SamplerResult cutset_gibbs_run(const Network& net, const Evidence& e, const Cutset& cutset,
                               const SamplingConfig& cfg);

SamplerResult likelihood_weighting_run(const Network& net, const Evidence& e, const SamplingConfig& cfg);

/// Importance tables for AIS-BN: one CPT-shaped table per variable.
struct AisBnState {
    std::vector<std::vector<double>> tables;
    int updates = 0;
};

AisBnState aisbn_initial_state(const Network& net);

/// AIS-BN learning rate a * (b/a)^(k/k_max).
double aisbn_learning_rate(int k, int k_max, double a, double b);

/// Adaptive importance sampling. Each chain learns its own tables for
/// k_max * l samples and then estimates from the remaining ones. When
/// `state` is given it seeds every chain and receives chain 0's tables.
SamplerResult aisbn_run(const Network& net, const Evidence& e, const SamplingConfig& cfg,
                        AisBnState* state = nullptr);

}  // namespace wcs

#endif
