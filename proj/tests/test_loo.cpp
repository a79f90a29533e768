#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <numeric>
#include <random>

#include "homeadv/loo.h"

using namespace homeadv;

namespace {

double log_sum_exp(const std::vector<double>& x) {
    double m = *std::max_element(x.begin(), x.end());
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

// Inverse-CDF draws from GPD(k, sigma), sorted ascending.
std::vector<double> gpd_sample(double k, double sigma, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = sigma * (std::pow(1.0 - u(rng), -k) - 1.0) / k;
    std::sort(x.begin(), x.end());
    return x;
}

LooResult from_pointwise(std::vector<double> pointwise) {
    LooResult r;
    r.elpd_loo = std::accumulate(pointwise.begin(), pointwise.end(), 0.0);
    r.pointwise = std::move(pointwise);
    r.pareto_k.assign(r.pointwise.size(), 0.1);
    return r;
}

} // namespace

TEST_CASE("GPD fit recovers the shape of simulated tails") {
    for (double k : {0.1, 0.5, 0.9}) {
        double mean_k = 0.0;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) mean_k += fit_gpd_tail(gpd_sample(k, 2.0, 2000, seed)).k;
        mean_k /= 10.0;
        CAPTURE(k);
        CHECK(std::abs(mean_k - k) < 0.05);
    }
    auto fit = fit_gpd_tail(gpd_sample(0.3, 2.0, 5000, 77));
    CHECK(fit.sigma == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("GPD fit rejects unusable input") {
    CHECK_THROWS_AS(fit_gpd_tail(std::vector<double>{1, 2, 3, 4}), std::invalid_argument);
    CHECK_THROWS_AS(fit_gpd_tail(std::vector<double>{5, 4, 3, 2, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_gpd_tail(std::vector<double>{1, 1, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(fit_gpd_tail(std::vector<double>{-1, 1, 2, 3, 4}), std::invalid_argument);
}

TEST_CASE("smoothed weights are normalized and shift invariant") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    std::vector<double> ratios(4000);
    for (auto& v : ratios) v = 1.5 * z(rng);
    auto w = psis_smooth(ratios);
    CHECK(w.smoothed);
    CHECK(std::isfinite(w.pareto_k));
    CHECK(log_sum_exp(w.log_weights) == doctest::Approx(0.0).epsilon(1e-12));

    auto shifted = ratios;
    for (auto& v : shifted) v += 123.0;
    auto ws = psis_smooth(shifted);
    CHECK(ws.pareto_k == doctest::Approx(w.pareto_k).epsilon(1e-9));
    for (std::size_t i = 0; i < ratios.size(); ++i)
        CHECK(ws.log_weights[i] == doctest::Approx(w.log_weights[i]).epsilon(1e-9));
}

TEST_CASE("heavier raw tails give larger k") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    std::vector<double> light(4000);
    std::vector<double> heavy(4000);
    for (std::size_t i = 0; i < light.size(); ++i) {
        double e = z(rng);
        light[i] = 0.3 * e;
        heavy[i] = 3.0 * e;
    }
    CHECK(psis_smooth(heavy).pareto_k > psis_smooth(light).pareto_k);
    CHECK(psis_smooth(light).pareto_k < 0.5);
}

TEST_CASE("constant tails and tiny samples") {
    std::vector<double> flat(1000, -2.0);
    auto w = psis_smooth(flat);
    CHECK(std::isnan(w.pareto_k));
    for (double v : w.log_weights) CHECK(v == doctest::Approx(-std::log(1000.0)));

    Matrix ll(2, 10, -1.0);
    ll(1, 3) = -4.0;
    auto loo = psis_loo(ll);
    CHECK(loo.unsmoothed);
    CHECK(std::isnan(loo.pareto_k[0]));
    // Plain importance sampling: elpd_i = -log mean exp(-ll).
    CHECK(loo.pointwise[0] == doctest::Approx(-1.0));
    double harmonic = -std::log((9.0 * std::exp(1.0) + std::exp(4.0)) / 10.0);
    CHECK(loo.pointwise[1] == doctest::Approx(harmonic));
}

TEST_CASE("elpd of a constant log-likelihood matrix is its row sum") {
    Matrix ll(3, 400);
    for (std::size_t s = 0; s < 400; ++s) {
        ll(0, s) = -1.0;
        ll(1, s) = -2.5;
        ll(2, s) = -0.5;
    }
    auto loo = psis_loo(ll);
    CHECK(loo.elpd_loo == doctest::Approx(-4.0));
    CHECK_FALSE(loo.unsmoothed);
    CHECK(loo.se == doctest::Approx(std::sqrt(3.25)));
    CHECK(loo.num_high_k() == 0);
}

TEST_CASE("loo input validation") {
    CHECK_THROWS_AS(psis_loo(Matrix()), std::invalid_argument);
    Matrix bad(1, 100, -1.0);
    bad(0, 7) = -std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(psis_loo(bad), std::invalid_argument);
}

TEST_CASE("model comparison arithmetic") {
    auto a = from_pointwise({-1, -1, -1, -1});
    auto b = from_pointwise({-2, -1, -1, -1});
    auto cmp = compare({{"constant", b}, {"linear", a}});
    CHECK(cmp.best == 1);
    CHECK(cmp.best_row().tag == "linear");
    CHECK(cmp.rows[0].delta == doctest::Approx(-1.0));
    CHECK(cmp.rows[0].se == doctest::Approx(1.0));
    CHECK(cmp.rows[0].num_se == doctest::Approx(1.0));
    CHECK(cmp.rows[1].delta == 0.0);
    CHECK(cmp.rows[1].num_se == 0.0);
    CHECK(comparison_table(cmp) ==
          "model,delta_elpd,se,num_se,best,beyond_4se\n"
          "constant,-1.00,1.00,1.00,false,false\n"
          "linear,0.00,0.00,0.00,true,false\n");

    auto ties = compare({{"x", a}, {"y", a}, {"z", a}});
    CHECK(ties.best == 0);
    for (const auto& r : ties.rows) {
        CHECK(r.delta == 0.0);
        CHECK(r.num_se == 0.0);
    }
    CHECK_THROWS_AS(compare({{"x", a}, {"y", from_pointwise({-1, -1})}}), std::invalid_argument);
    CHECK_THROWS_AS(compare({}), std::invalid_argument);
}

TEST_CASE("table flags differences beyond four standard errors") {
    auto best = from_pointwise({0, 0, 0, 0, 0, 0});
    auto worse = from_pointwise({-10, -11, -9, -10, -11, -9});
    auto table = comparison_table(compare({{"linear", best}, {"constant", worse}}));
    CHECK(table.find("constant,-60.00,") != std::string::npos);
    CHECK(table.find(",false,true\n") != std::string::npos);
}
