#include <doctest.h>

#include <cmath>
#include <mutex>
#include <numeric>

#include "homeadv/diagnostics.h"
#include "homeadv/sampler.h"
#include "support.h"

using namespace homeadv;

namespace {

// Independent Normal(mean_i, sd_i^2) coordinates.
class DiagonalGaussian final : public LogDensity {
public:
    DiagonalGaussian(std::vector<double> mean, std::vector<double> sd) : mean_(std::move(mean)), sd_(std::move(sd)) {}
    std::size_t dimension() const override { return mean_.size(); }
    double log_density(std::span<const double> x) const override {
        double lp = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) lp -= 0.5 * std::pow((x[i] - mean_[i]) / sd_[i], 2);
        return lp;
    }
    double log_density_gradient(std::span<const double> x, std::span<double> grad) const override {
        for (std::size_t i = 0; i < x.size(); ++i) grad[i] = -(x[i] - mean_[i]) / (sd_[i] * sd_[i]);
        return log_density(x);
    }

private:
    std::vector<double> mean_;
    std::vector<double> sd_;
};

class Nowhere final : public LogDensity {
public:
    std::size_t dimension() const override { return 2; }
    double log_density(std::span<const double>) const override { return -std::numeric_limits<double>::infinity(); }
    double log_density_gradient(std::span<const double>, std::span<double> g) const override {
        std::fill(g.begin(), g.end(), 0.0);
        return -std::numeric_limits<double>::infinity();
    }
};

std::vector<double> pooled(const std::vector<std::vector<double>>& chains) {
    std::vector<double> out;
    for (const auto& c : chains) out.insert(out.end(), c.begin(), c.end());
    return out;
}

} // namespace

TEST_CASE("default protocol is four chains of 2000 iterations with 500 warmup") {
    SamplerConfig c;
    CHECK(c.chains == 4);
    CHECK(c.iterations == 2000);
    CHECK(c.warmup == 500);
    CHECK(c.retained() == 1500);
    CHECK(c.target_accept == 0.8);
    CHECK(c.max_tree_depth == 10);
    CHECK_THROWS_AS((SamplerConfig{4, 100, 100}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((SamplerConfig{0, 100, 10}.validate()), std::invalid_argument);
}

TEST_CASE("recovers moments of a scaled Gaussian") {
    DiagonalGaussian target({1.0, -3.0, 0.0, 10.0}, {1.0, 0.1, 5.0, 20.0});
    SamplerConfig config;
    config.seed = 42;
    auto draws = sample_draws(target, config);
    REQUIRE(draws.num_chains() == 4);
    REQUIRE(draws.draws_per_chain() == 1500);
    CHECK(draws.divergences() == 0);
    const double mean[] = {1.0, -3.0, 0.0, 10.0};
    const double sd[] = {1.0, 0.1, 5.0, 20.0};
    for (std::size_t i = 0; i < 4; ++i) {
        auto chains = draws.coordinate(i);
        auto x = pooled(chains);
        double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
        double v = 0.0;
        for (double d : x) v += (d - m) * (d - m);
        v /= static_cast<double>(x.size() - 1);
        double n_eff = ess(chains);
        CAPTURE(i);
        CHECK(std::abs(m - mean[i]) < 4.0 * sd[i] / std::sqrt(n_eff));
        CHECK(std::abs(v / (sd[i] * sd[i]) - 1.0) < 0.15);
        CHECK(split_rhat(chains) < 1.01);
    }
    // Adapted metric approaches the target variances.
    for (const auto& m : draws.inv_metric) CHECK(m[3] / 400.0 == doctest::Approx(1.0).epsilon(0.5));
    for (const auto& chain : draws.stats)
        for (const auto& s : chain) {
            CHECK(s.tree_depth <= config.max_tree_depth);
            CHECK(s.accept_stat >= 0.0);
            CHECK(s.accept_stat <= 1.0);
        }
}

TEST_CASE("draws depend on the seed but not on the worker count") {
    DiagonalGaussian target({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0});
    SamplerConfig config;
    config.iterations = 300;
    config.warmup = 150;
    config.seed = 7;
    config.threads = 1;
    auto a = sample_draws(target, config);
    config.threads = 4;
    auto b = sample_draws(target, config);
    config.threads = 0;
    auto c = sample_draws(target, config);
    for (std::size_t k = 0; k < a.num_chains(); ++k) {
        CHECK(a.chains[k] == b.chains[k]);
        CHECK(a.chains[k] == c.chains[k]);
    }
    CHECK(a.step_sizes == b.step_sizes);
    CHECK_FALSE(a.chains[0] == a.chains[1]);
    config.seed = 8;
    auto d = sample_draws(target, config);
    CHECK_FALSE(a.chains[0] == d.chains[0]);
}

TEST_CASE("chain callback fires once per chain") {
    DiagonalGaussian target({0.0}, {1.0});
    SamplerConfig config{3, 60, 30, 1};
    std::vector<int> seen(3, 0);
    std::mutex m;
    sample_draws(target, config, [&](std::size_t chain, double seconds) {
        std::lock_guard lock(m);
        ++seen.at(chain);
        CHECK(seconds >= 0.0);
    });
    CHECK(seen == std::vector<int>{1, 1, 1});
}

TEST_CASE("unusable targets raise sampler errors") {
    Nowhere target;
    auto rng = chain_stream(1, 0);
    CHECK_THROWS_AS(initialize_chain(target, rng), SamplerError);
    CHECK_THROWS_AS(sample_draws(target, SamplerConfig{1, 20, 10, 1}), SamplerError);
}

TEST_CASE("fit result exposes constrained draws, diagnostics and log-likelihood") {
    auto records = homeadv::testing::three_league_fixture();
    auto ctx = homeadv::testing::context_for(ModelFamily::Constant, records);
    SamplerConfig config{2, 200, 100, 3};
    auto fit = sample(ctx, config);
    CHECK(fit.loglik.rows() == ctx.num_games());
    CHECK(fit.loglik.cols() == 200);
    CHECK(fit.diagnostics.parameters.size() == ctx.dimension());
    auto sigma = fit.constrained_draws(BlockKind::Sigma, 0);
    CHECK(sigma.size() == 200);
    for (double s : sigma) CHECK(s > 0.0);
    CHECK(fit.leagues.size() == 3);
    CHECK(fit.leagues[2].seasons == std::vector<int>{2001, 2003, 2004});
    CHECK_THROWS_AS(fit.constrained_draws(BlockKind::Sigma, 0, 1), std::out_of_range);
}

TEST_CASE("constrained draws of non-centered slopes are on the natural scale") {
    auto records = homeadv::testing::three_league_fixture();
    auto ctx = homeadv::testing::context_for(ModelFamily::HierarchicalLinear, records);
    SamplerConfig config{2, 100, 50, 4};
    auto fit = sample(ctx, config);
    const std::size_t beta1 = ctx.layout().at(BlockKind::Beta1, 1).offset;
    auto draws = fit.constrained_draws(BlockKind::Beta1, 1);
    std::size_t s = 0;
    for (const auto& chain : fit.draws.chains)
        for (std::size_t r = 0; r < chain.rows(); ++r, ++s)
            CHECK(draws[s] == constrain(chain.row(r), ctx.layout())[beta1]);
    CHECK(s == draws.size());
}
