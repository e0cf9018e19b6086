#include <doctest.h>

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "wcs/metrics.hpp"

using namespace wcs;

namespace {

Marginals mk(std::vector<std::vector<double>> p) {
    Marginals m;
    m.probs = std::move(p);
    return m;
}

}  // namespace

TEST_CASE("mse and absolute error") {
    auto ex = mk({{0.5, 0.5}});
    CHECK(mse(ex, ex) == 0.0);
    CHECK(mse(ex, mk({{0.6, 0.4}})) == doctest::Approx(0.01).epsilon(1e-12));
    auto two = mk({{0.5, 0.5}, {0.2, 0.8}});
    auto off = mk({{0.6, 0.4}, {0.2, 0.8}});
    CHECK(mse(two, off) == doctest::Approx(0.005).epsilon(1e-12));
    CHECK(avg_abs_error(ex, mk({{0.6, 0.4}})) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(avg_abs_error(two, off) == doctest::Approx(0.05).epsilon(1e-12));
    Evidence skip;
    skip.bindings[0] = 0;
    CHECK(mse(two, off, skip) == 0.0);
    CHECK_THROWS_AS(mse(ex, two), std::invalid_argument);
    CHECK_THROWS_AS(mse(ex, mk({{0.2, 0.3, 0.5}})), std::invalid_argument);
}

TEST_CASE("kl divergence in bits") {
    auto ex = mk({{0.5, 0.5}});
    CHECK(kl_avg(ex, ex) == 0.0);
    CHECK(kl_avg(ex, mk({{0.25, 0.75}})) == doctest::Approx(0.5 * std::log2(2.0) + 0.5 * std::log2(2.0 / 3.0)).epsilon(1e-12));
    CHECK(kl_avg(ex, mk({{0.25, 0.75}})) == doctest::Approx(0.20752).epsilon(1e-4));
    CHECK(kl_avg(mk({{1.0, 0.0}}), mk({{0.5, 0.5}})) == doctest::Approx(1.0).epsilon(1e-15));
    auto r = compare_marginals(mk({{0.5, 0.5}, {0.5, 0.5}}), mk({{1.0, 0.0}, {0.25, 0.75}}));
    CHECK(r.kl_infinite == std::vector<int>{0});
    CHECK(std::isinf(r.var_kl[0]));
    CHECK(r.kl == doctest::Approx(0.20752).epsilon(1e-4));
}

TEST_CASE("hellinger") {
    auto ex = mk({{0.5, 0.5}});
    CHECK(hellinger_avg(ex, ex) == 0.0);
    CHECK(hellinger_avg(mk({{1.0, 0.0}}), mk({{0.0, 1.0}})) == 2.0);
    const double h = std::pow(std::sqrt(0.5) - std::sqrt(0.25), 2) + std::pow(std::sqrt(0.5) - std::sqrt(0.75), 2);
    CHECK(hellinger_avg(ex, mk({{0.25, 0.75}})) == doctest::Approx(h).epsilon(1e-14));
    CHECK(h == doctest::Approx(0.068148).epsilon(1e-5));
}

TEST_CASE("metrics are reorder invariant and positive on mismatch") {
    auto a = mk({{0.1, 0.9}, {0.3, 0.3, 0.4}});
    auto b = mk({{0.2, 0.8}, {0.3, 0.4, 0.3}});
    auto ra = mk({{0.3, 0.3, 0.4}, {0.1, 0.9}});
    auto rb = mk({{0.3, 0.4, 0.3}, {0.2, 0.8}});
    auto x = compare_marginals(a, b), y = compare_marginals(ra, rb);
    CHECK(x.mse == doctest::Approx(y.mse));
    CHECK(x.avg_abs == doctest::Approx(y.avg_abs));
    CHECK(x.kl == doctest::Approx(y.kl));
    CHECK(x.hellinger == doctest::Approx(y.hellinger));
    CHECK(x.mse > 0);
    CHECK(x.kl > 0);
    CHECK(x.hellinger > 0);
}

TEST_CASE("t quantiles against an independent reference") {
    CHECK(t_critical(0.1, 19) == doctest::Approx(1.729).epsilon(1e-3));
    for (double a : {0.2, 0.1, 0.05, 0.01})
        for (int df = 1; df <= 60; ++df) {
            boost::math::students_t dist(df);
            double ref = boost::math::quantile(boost::math::complement(dist, a / 2));
            double tol = df <= 30 ? 1e-5 : 1e-3;
            CHECK(std::abs(t_critical(a, df) - ref) <= tol * ref);
        }
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-9));
}

TEST_CASE("batch means") {
    std::vector<Marginals> same(5, mk({{0.3, 0.7}}));
    auto s = batch_means_ci(same, 0.1);
    CHECK(s.variance[0][0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.half_width[0][1] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK_THROWS_AS(batch_means_ci({mk({{1.0}})}, 0.1), std::invalid_argument);

    // Running-sum variance equals the two-pass definition.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Marginals> chains;
    for (int m = 0; m < 20; ++m) {
        double p = u(rng);
        chains.push_back(mk({{p, 1 - p}}));
    }
    auto st = batch_means_ci(chains, 0.1);
    double mean = 0.0;
    for (const auto& c : chains) mean += c[0][0];
    mean /= 20;
    double var = 0.0;
    for (const auto& c : chains) var += (c[0][0] - mean) * (c[0][0] - mean);
    var /= 19;
    CHECK(std::abs(st.variance[0][0] - var) <= 1e-12);
    CHECK(std::abs(st.mean[0][0] - mean) <= 1e-15);
    CHECK(st.t == doctest::Approx(1.729).epsilon(1e-3));
}

TEST_CASE("confidence interval coverage on synthetic normals") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> nd(0.4, 0.05);
    int covered = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<Marginals> chains;
        for (int m = 0; m < 20; ++m) {
            double p = nd(rng);
            chains.push_back(mk({{p, 1 - p}}));
        }
        auto st = batch_means_ci(chains, 0.1);
        covered += std::abs(st.mean[0][0] - 0.4) <= st.half_width[0][0];
    }
    double rate = covered / double(reps);
    CHECK(rate >= 0.85);
    CHECK(rate <= 0.95);
}
