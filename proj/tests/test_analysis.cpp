#include <doctest.h>

#include <numeric>
#include <random>

#include "homeadv/analysis.h"
#include "support.h"

using namespace homeadv;
using homeadv::testing::context_for;
using homeadv::testing::game;

namespace {

std::vector<double> one_to(int n) {
    std::vector<double> x(static_cast<std::size_t>(n));
    std::iota(x.begin(), x.end(), 1.0);
    return x;
}

// Fit whose draws are generated by `fill(draw, coordinate)` in unconstrained space.
template <class Fill>
FitResult synthetic_fit(const ModelContext& ctx, std::size_t chains, std::size_t draws, Fill fill) {
    FitResult fit;
    fit.spec = ctx.spec();
    fit.layout = ctx.layout();
    fit.leagues = league_info(ctx.datasets());
    fit.config = SamplerConfig{chains, draws + 1, 1, 1};
    for (std::size_t c = 0; c < chains; ++c) {
        Matrix m(draws, ctx.dimension());
        for (std::size_t s = 0; s < draws; ++s)
            for (std::size_t j = 0; j < ctx.dimension(); ++j) m(s, j) = fill(c * draws + s, j);
        fit.draws.chains.push_back(std::move(m));
    }
    return fit;
}

std::vector<GameRecord> two_leagues() {
    return {game("A", 2000, "x", "y", 3, 0), game("A", 2004, "x", "y", 3, 0), game("B", 2010, "u", "v", 1, 0),
            game("B", 2012, "u", "v", 1, 0)};
}

} // namespace

TEST_CASE("type-7 quantiles and central intervals") {
    auto x = one_to(100);
    CHECK(quantile(x, 0.0) == 1.0);
    CHECK(quantile(x, 1.0) == 100.0);
    CHECK(quantile(x, 0.5) == doctest::Approx(50.5));
    auto [lo, hi] = credible_interval(x, 0.9);
    CHECK(lo == doctest::Approx(5.95));
    CHECK(hi == doctest::Approx(95.05));
    CHECK_THROWS_AS(credible_interval(x, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(credible_interval(std::vector<double>{1.0}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), std::invalid_argument);
}

TEST_CASE("interval string format") {
    CHECK(format_interval({1.73, 1.07, 2.39}) == "1.73 (1.07, 2.39)");
    CHECK(format_interval({-0.001, -0.8, 0.004}) == "0.00 (-0.80, 0.00)");
    CHECK(format_fixed(std::nan(""), 2) == "NA");
    CHECK(format_fixed(-1.005, 1) == "-1.0");
    auto s = summarize(one_to(100), 0.9);
    CHECK(s.mean == doctest::Approx(50.5));
}

TEST_CASE("trend summary counts tails and zeros") {
    std::vector<double> beta1 = {-0.3, -0.2, -0.1, 0.0, 0.1, -0.05, -0.02, 0.2};
    auto t = trend_summary(beta1);
    CHECK(t.draws == 8);
    CHECK(t.zero_draws == 1);
    CHECK(t.p_negative == doctest::Approx(5.0 / 8.0));
    CHECK(t.p_positive == doctest::Approx(2.0 / 8.0));
    // Order of draws does not matter.
    std::reverse(beta1.begin(), beta1.end());
    CHECK(trend_summary(beta1).p_negative == t.p_negative);

    TrendSummary shown;
    shown.beta1.mean = -0.0321;
    shown.p_negative = 0.8567;
    CHECK(format_trend(shown) == "β̂₁ = -0.032, P(β₁<0) = 0.857");
}

TEST_CASE("standardized gamma has zero mean and unit sd") {
    std::map<LeagueSeason, double> g = {{{"A", 2000}, 1.0}, {{"A", 2001}, 2.0}, {{"B", 2000}, 3.0}, {{"B", 2001}, 6.0}};
    auto z = standardize_gamma(g);
    double sum = 0.0;
    double ss = 0.0;
    for (const auto& [k, v] : z) {
        sum += v;
        ss += v * v;
    }
    CHECK(sum == doctest::Approx(0.0));
    CHECK(ss / 3.0 == doctest::Approx(1.0));
    CHECK(z[{"A", 2000}] == doctest::Approx((1.0 - 3.0) / std::sqrt(14.0 / 3.0)));
    CHECK_THROWS_AS(standardize_gamma({{{"A", 1}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(standardize_gamma({{{"A", 1}, 1.0}, {{"A", 2}, 1.0}}), std::invalid_argument);
}

TEST_CASE("trajectories evaluate each family's home advantage") {
    auto records = two_leagues();
    auto linear = context_for(ModelFamily::Linear, records);
    const auto b0 = linear.layout().at(BlockKind::Beta0, 1).offset;
    const auto b1 = linear.layout().at(BlockKind::Beta1, 1).offset;
    auto fit = synthetic_fit(linear, 2, 50, [&](std::size_t s, std::size_t j) {
        if (j == b0) return 2.0;
        if (j == b1) return -0.1 + 0.001 * static_cast<double>(s % 10);
        return 0.0;
    });
    auto traj = ha_trajectory(fit, 1);
    CHECK(traj.league_id == "B");
    REQUIRE(traj.points.size() == 2);
    CHECK(traj.points[0].season == 2010);
    CHECK(traj.points[0].summary.mean == doctest::Approx(2.0));
    CHECK(traj.points[1].summary.mean == doctest::Approx(2.0 + 2.0 * (-0.1 + 0.0045)));
    auto trend = prob_decline(fit, 1);
    CHECK(trend.p_negative == 1.0);

    auto tv = context_for(ModelFamily::TimeVarying, records);
    const auto gamma = tv.layout().at(BlockKind::Gamma, 0).offset;
    auto tv_fit = synthetic_fit(tv, 2, 20, [&](std::size_t, std::size_t j) {
        return j == gamma ? 1.5 : (j == gamma + 1 ? 2.5 : 0.0);
    });
    auto tv_traj = ha_trajectory(tv_fit, 0);
    CHECK(tv_traj.estimator == "gamma");
    CHECK(tv_traj.points[1].summary.mean == doctest::Approx(2.5));
    CHECK_THROWS_AS(prob_decline(tv_fit, 0), std::invalid_argument);
    CHECK(league_position(tv_fit, "B") == 1);
    CHECK_THROWS_AS(league_position(tv_fit, "C"), std::invalid_argument);
}

TEST_CASE("shrinkage report pairs separate and joint fits by league") {
    auto records = two_leagues();
    std::vector<GameRecord> a_only;
    std::vector<GameRecord> b_only;
    for (const auto& g : records) (g.league_id == "A" ? a_only : b_only).push_back(g);
    auto sep_a = context_for(ModelFamily::Linear, a_only);
    auto sep_b = context_for(ModelFamily::Linear, b_only);
    auto joint = context_for(ModelFamily::HierarchicalLinear, records);

    auto constant_beta1 = [](const ModelContext& ctx, int league, double value) {
        const auto idx = ctx.layout().at(BlockKind::Beta1, league).offset;
        return [idx, value](std::size_t, std::size_t j) { return j == idx ? value : 0.0; };
    };
    auto fa = synthetic_fit(sep_a, 1, 10, constant_beta1(sep_a, 0, 0.3));
    auto fb = synthetic_fit(sep_b, 1, 10, constant_beta1(sep_b, 0, -0.3));
    const auto ja = joint.layout().at(BlockKind::Beta1, 0).offset;
    const auto jb = joint.layout().at(BlockKind::Beta1, 1).offset;
    const auto star = joint.layout().at(BlockKind::Beta1Star, -1).offset;
    // Slopes are stored as offsets from beta1_star in units of lambda1 = exp(0).
    auto fj = synthetic_fit(joint, 1, 10, [&](std::size_t, std::size_t j) {
        if (j == ja) return 0.09;
        if (j == jb) return -0.11;
        if (j == star) return 0.01;
        return 0.0;
    });
    auto rows = shrinkage_report({&fb, &fa}, fj);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].league_id == "A");
    CHECK(rows[0].separate_beta1 == doctest::Approx(0.3));
    CHECK(rows[0].joint_beta1 == doctest::Approx(0.1));
    CHECK(rows[0].shift == doctest::Approx(-0.2));
    CHECK(rows[0].beta1_star == doctest::Approx(0.01));
    CHECK(rows[0].lambda1 == doctest::Approx(1.0));
    CHECK(rows[1].p_positive_separate == 0.0);
    auto table = shrinkage_table(rows);
    CHECK(table.rfind("league,separate_beta1,joint_beta1,beta1_star,lambda1,shift,", 0) == 0);

    CHECK_THROWS_AS(shrinkage_report({&fa}, fj), std::invalid_argument);
    CHECK_THROWS_AS(shrinkage_report({&fa, &fa, &fb}, fj), std::invalid_argument);
    CHECK_THROWS_AS(shrinkage_report({&fa, &fb}, fa), std::invalid_argument);
}
