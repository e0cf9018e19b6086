#ifndef WCS_METRICS_HPP
#define WCS_METRICS_HPP

#include <string>
#include <vector>

#include "wcs/model.hpp"

namespace wcs {

/// Error of an estimate against exact posteriors over the unobserved
/// variables. Per-variable rows are indexed by variable; observed ones are 0.
struct MetricsReport {
    double mse = 0.0;
    double avg_abs = 0.0;
    double kl = 0.0;         // bits, averaged over variables with a finite term
    double hellinger = 0.0;  // squared Hellinger distance
    std::vector<double> var_mse, var_abs, var_kl, var_hellinger;
    /// Variables whose KL term is infinite (exact > 0 where estimate = 0).
    std::vector<int> kl_infinite;
};

/// All four measures at once. Throws std::invalid_argument on shape
/// mismatch.
MetricsReport compare_marginals(const Marginals& exact, const Marginals& est, const Evidence& skip = {});

/// Mean over unobserved variable-value pairs of the squared difference.
double mse(const Marginals& exact, const Marginals& est, const Evidence& skip = {});
/// Mean over unobserved variable-value pairs of the absolute difference.
double avg_abs_error(const Marginals& exact, const Marginals& est, const Evidence& skip = {});
/// Base-2 KL divergence averaged over unobserved variables, excluding
/// infinite terms.
double kl_avg(const Marginals& exact, const Marginals& est, const Evidence& skip = {});
double hellinger_avg(const Marginals& exact, const Marginals& est, const Evidence& skip = {});

/// Upper alpha/2 quantile of Student's t with df degrees of freedom.
/// Tabulated for alpha in {0.2, 0.1, 0.05, 0.01} and df <= 30; otherwise a
/// Cornish-Fisher expansion around the normal quantile.
double t_critical(double alpha, int df);

/// Inverse of the standard normal CDF.
double normal_quantile(double p);

struct ChainStatistics {
    int chains = 0;
    double alpha = 0.1;
    double t = 0.0;
    Marginals mean;                                // pooled estimate
    std::vector<std::vector<double>> variance;     // across chains
    std::vector<std::vector<double>> half_width;   // t * sqrt(variance / M)
    /// Half-width averaged over unobserved variable-value pairs.
    double mean_half_width = 0.0;
};

/// Batch-means statistics from independently restarted chains. Variance
/// comes from running sums of the estimates and their squares. Throws
/// std::invalid_argument for fewer than two chains.
ChainStatistics batch_means_ci(const std::vector<Marginals>& per_chain, double alpha, const Evidence& skip = {});

/// CSV with header metric,variable,value; aggregate rows use variable "*".
std::string metrics_csv(const MetricsReport& r, const Network& net, const Evidence& skip);
/// CSV with header variable,state,estimate,variance,half_width.
std::string chain_statistics_csv(const ChainStatistics& s, const Network& net);

}  // namespace wcs

#endif
