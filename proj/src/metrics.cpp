#include "wcs/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wcs/io.hpp"

namespace wcs {

namespace {

void check_shapes(const Marginals& a, const Marginals& b) {
    if (a.size() != b.size()) throw std::invalid_argument("marginals cover different variable counts");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].size() != b[i].size())
            throw std::invalid_argument("marginals disagree on the domain of variable " + std::to_string(i));
}

constexpr std::array<double, 4> kAlphas{0.2, 0.1, 0.05, 0.01};
constexpr double kTable[4][30] = {
    {3.077684, 1.885618, 1.637744, 1.533206, 1.475884, 1.439756, 1.414924, 1.396815, 1.383029, 1.372184,
     1.363430, 1.356217, 1.350171, 1.345030, 1.340606, 1.336757, 1.333379, 1.330391, 1.327728, 1.325341,
     1.323188, 1.321237, 1.319460, 1.317836, 1.316345, 1.314972, 1.313703, 1.312527, 1.311434, 1.310415},
    {6.313752, 2.919986, 2.353363, 2.131847, 2.015048, 1.943180, 1.894579, 1.859548, 1.833113, 1.812461,
     1.795885, 1.782288, 1.770933, 1.761310, 1.753050, 1.745884, 1.739607, 1.734064, 1.729133, 1.724718,
     1.720743, 1.717144, 1.713872, 1.710882, 1.708141, 1.705618, 1.703288, 1.701131, 1.699127, 1.697261},
    {12.706205, 4.302653, 3.182446, 2.776445, 2.570582, 2.446912, 2.364624, 2.306004, 2.262157, 2.228139,
     2.200985, 2.178813, 2.160369, 2.144787, 2.131450, 2.119905, 2.109816, 2.100922, 2.093024, 2.085963,
     2.079614, 2.073873, 2.068658, 2.063899, 2.059539, 2.055529, 2.051831, 2.048407, 2.045230, 2.042272},
    {63.656741, 9.924843, 5.840909, 4.604095, 4.032143, 3.707428, 3.499483, 3.355387, 3.249836, 3.169273,
     3.105807, 3.054540, 3.012276, 2.976843, 2.946713, 2.920782, 2.898231, 2.878440, 2.860935, 2.845340,
     2.831360, 2.818756, 2.807336, 2.796940, 2.787436, 2.778715, 2.770683, 2.763262, 2.756386, 2.749996},
};

}  // namespace

MetricsReport compare_marginals(const Marginals& exact, const Marginals& est, const Evidence& skip) {
    check_shapes(exact, est);
    MetricsReport r;
    const std::size_t n = exact.size();
    r.var_mse.assign(n, 0.0);
    r.var_abs.assign(n, 0.0);
    r.var_kl.assign(n, 0.0);
    r.var_hellinger.assign(n, 0.0);
    double sq = 0.0, ab = 0.0, kl = 0.0, hd = 0.0;
    std::size_t pairs = 0, vars = 0, kl_vars = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip.contains(static_cast<int>(i))) continue;
        double vsq = 0.0, vab = 0.0, vkl = 0.0, vhd = 0.0;
        bool infinite = false;
        for (std::size_t s = 0; s < exact[i].size(); ++s) {
            const double p = exact[i][s], q = est[i][s];
            vsq += (p - q) * (p - q);
            vab += std::abs(p - q);
            if (p > 0.0) {
                if (q > 0.0)
                    vkl += p * std::log2(p / q);
                else
                    infinite = true;
            }
            const double h = std::sqrt(p) - std::sqrt(std::max(0.0, q));
            vhd += h * h;
        }
        const double d = static_cast<double>(exact[i].size());
        r.var_mse[i] = vsq / d;
        r.var_abs[i] = vab / d;
        r.var_hellinger[i] = vhd;
        sq += vsq;
        ab += vab;
        hd += vhd;
        pairs += exact[i].size();
        ++vars;
        if (infinite) {
            r.var_kl[i] = std::numeric_limits<double>::infinity();
            r.kl_infinite.push_back(static_cast<int>(i));
        } else {
            r.var_kl[i] = vkl;
            kl += vkl;
            ++kl_vars;
        }
    }
    if (pairs > 0) {
        r.mse = sq / static_cast<double>(pairs);
        r.avg_abs = ab / static_cast<double>(pairs);
    }
    if (vars > 0) r.hellinger = hd / static_cast<double>(vars);
    if (kl_vars > 0) r.kl = kl / static_cast<double>(kl_vars);
    return r;
}

double mse(const Marginals& exact, const Marginals& est, const Evidence& skip) {
    return compare_marginals(exact, est, skip).mse;
}
double avg_abs_error(const Marginals& exact, const Marginals& est, const Evidence& skip) {
    return compare_marginals(exact, est, skip).avg_abs;
}
double kl_avg(const Marginals& exact, const Marginals& est, const Evidence& skip) {
    return compare_marginals(exact, est, skip).kl;
}
double hellinger_avg(const Marginals& exact, const Marginals& est, const Evidence& skip) {
    return compare_marginals(exact, est, skip).hellinger;
}

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile needs p in (0, 1)");
    // Newton iterations on Phi(z) = 0.5 erfc(-z / sqrt 2).
    double z = 0.0;
    for (int it = 0; it < 100; ++it) {
        double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
        double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
        double step = (cdf - p) / pdf;
        z -= step;
        if (std::abs(step) < 1e-14 * (1.0 + std::abs(z))) break;
    }
    return z;
}

double t_critical(double alpha, int df) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (df < 1) throw std::invalid_argument("degrees of freedom must be at least 1");
    if (df <= 30)
        for (std::size_t k = 0; k < kAlphas.size(); ++k)
            if (std::abs(alpha - kAlphas[k]) < 1e-12) return kTable[k][df - 1];
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double v = df;
    const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z, z9 = z7 * z * z;
    return z + (z3 + z) / (4 * v) + (5 * z5 + 16 * z3 + 3 * z) / (96 * v * v) +
           (3 * z7 + 19 * z5 + 17 * z3 - 15 * z) / (384 * v * v * v) +
           (79 * z9 + 776 * z7 + 1482 * z5 - 1920 * z3 - 945 * z) / (92160 * v * v * v * v);
}

ChainStatistics batch_means_ci(const std::vector<Marginals>& per_chain, double alpha, const Evidence& skip) {
    if (per_chain.size() < 2) throw std::invalid_argument("batch means need at least two chains");
    for (const auto& m : per_chain) check_shapes(per_chain[0], m);
    ChainStatistics st;
    const double M = static_cast<double>(per_chain.size());
    st.chains = static_cast<int>(per_chain.size());
    st.alpha = alpha;
    st.t = t_critical(alpha, st.chains - 1);
    const auto& shape = per_chain[0].probs;
    std::vector<std::vector<double>> sum(shape.size()), sum_sq(shape.size());
    for (std::size_t i = 0; i < shape.size(); ++i) {
        sum[i].assign(shape[i].size(), 0.0);
        sum_sq[i].assign(shape[i].size(), 0.0);
    }
    for (const auto& m : per_chain)
        for (std::size_t i = 0; i < shape.size(); ++i)
            for (std::size_t s = 0; s < shape[i].size(); ++s) {
                sum[i][s] += m[i][s];
                sum_sq[i][s] += m[i][s] * m[i][s];
            }
    st.mean.probs = sum;
    st.variance = sum;
    st.half_width = sum;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < shape.size(); ++i)
        for (std::size_t s = 0; s < shape[i].size(); ++s) {
            const double mean = sum[i][s] / M;
            const double var = std::max(0.0, (sum_sq[i][s] - M * mean * mean) / (M - 1.0));
            st.mean.probs[i][s] = mean;
            st.variance[i][s] = var;
            st.half_width[i][s] = st.t * std::sqrt(var / M);
            if (!skip.contains(static_cast<int>(i))) {
                total += st.half_width[i][s];
                ++pairs;
            }
        }
    st.mean_half_width = pairs ? total / static_cast<double>(pairs) : 0.0;
    return st;
}

std::string metrics_csv(const MetricsReport& r, const Network& net, const Evidence& skip) {
    std::ostringstream os;
    os << "metric,variable,value\n";
    auto rows = [&](const char* name, const std::vector<double>& per, double agg) {
        for (std::size_t i = 0; i < per.size(); ++i) {
            if (skip.contains(static_cast<int>(i))) continue;
            os << name << ',' << net.variable(static_cast<int>(i)).name << ',' << format_double(per[i]) << '\n';
        }
        os << name << ",*," << format_double(agg) << '\n';
    };
    rows("mse", r.var_mse, r.mse);
    rows("abs", r.var_abs, r.avg_abs);
    rows("kl", r.var_kl, r.kl);
    rows("hellinger", r.var_hellinger, r.hellinger);
    os << "kl_infinite,*," << r.kl_infinite.size() << '\n';
    return os.str();
}

std::string chain_statistics_csv(const ChainStatistics& s, const Network& net) {
    std::ostringstream os;
    os << "variable,state,estimate,variance,half_width\n";
    for (std::size_t i = 0; i < s.mean.size(); ++i) {
        const auto& v = net.variable(static_cast<int>(i));
        for (std::size_t k = 0; k < s.mean[i].size(); ++k)
            os << v.name << ',' << v.states[k] << ',' << format_double(s.mean[i][k]) << ','
               << format_double(s.variance[i][k]) << ',' << format_double(s.half_width[i][k]) << '\n';
    }
    return os.str();
}

}  // namespace wcs
