#ifndef WCS_PROPAGATION_HPP
#define WCS_PROPAGATION_HPP

#include <functional>
#include <vector>

#include "wcs/model.hpp"

namespace wcs {

struct IbpOptions {
    int max_iters = 25;
    double tol = 1e-8;
    /// Called after every iteration with the current beliefs.
    std::function<void(int, const Marginals&)> observer;
};

struct IbpResult {
    Marginals marginals;
    bool converged = false;
    int iterations = 0;
    /// Variables whose unnormalized belief vanished; their row is reported
    /// as uniform.
    std::vector<int> zero_belief;
};

/// Pearl's pi/lambda propagation on a synchronous (flooding) schedule,
/// messages initialized uniform. Exact on poly-trees; iterative elsewhere.
/// Stops once the largest change in any message or belief drops below tol.
IbpResult ibp_posteriors(const Network& net, const Evidence& e, const IbpOptions& opts = {});

}  // namespace wcs

#endif
