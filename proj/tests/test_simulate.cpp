#include <doctest.h>

#include <map>

#include "homeadv/simulate.h"

using namespace homeadv;

namespace {

// 100 teams x 20 games x 10 seasons = 10^4 games.
TruthConfig big_league() {
    TruthConfig t;
    t.n_teams = 100;
    t.games_per_team = 20;
    t.seasons = {2001, 2002, 2003, 2004, 2005, 2006, 2007, 2008, 2009, 2010};
    return t;
}

double pooled_empirical(const std::vector<GameRecord>& records) {
    return empirical_ha_pooled(build_dataset(records, records.front().league_id));
}

} // namespace

TEST_CASE("null configuration gives centred differentials") {
    auto t = big_league();
    t.alpha = 0.0;
    t.zeta = 0.0;
    auto sim = generate_league(t);
    REQUIRE(sim.records.size() == 10000);
    CHECK(std::abs(pooled_empirical(sim.records)) < 3.0 * 13.0 / 100.0);
}

TEST_CASE("empirical HA converges to alpha without host bias") {
    auto t = big_league();
    t.alpha = 2.5;
    t.seed = 4;
    auto sim = generate_league(t);
    CHECK(std::abs(pooled_empirical(sim.records) - 2.5) < 3.0 * 13.0 / 100.0);
    CHECK(sim.truth["alpha"] == 2.5);
    CHECK(sim.truth["family"] == "constant");
}

TEST_CASE("host bias inflates empirical HA") {
    auto t = big_league();
    t.alpha = 2.5;
    t.host_bias = 0.02;
    t.seed = 5;
    auto sim = generate_league(t);
    CHECK(pooled_empirical(sim.records) > 2.5 + 3.0 * 13.0 / 100.0);
}

TEST_CASE("schedule gives every team the requested number of games") {
    TruthConfig t;
    t.n_teams = 7;
    t.games_per_team = 4;
    t.seasons = {2000, 2001};
    t.neutral_fraction = 0.5;
    auto sim = generate_league(t);
    CHECK(sim.records.size() == 28);
    std::map<std::pair<std::string, int>, int> games;
    std::size_t neutral = 0;
    for (const auto& g : sim.records) {
        CHECK(g.home_team != g.away_team);
        CHECK(g.home_score >= 0);
        CHECK(g.away_score >= 0);
        CHECK((g.home_score == 0 || g.away_score == 0));
        ++games[{g.home_team, g.season}];
        ++games[{g.away_team, g.season}];
        neutral += g.neutral;
    }
    CHECK(games.size() == 14);
    for (const auto& [k, n] : games) CHECK(n == 4);
    CHECK(neutral > 0);
    CHECK(neutral < 28);
}

TEST_CASE("generation is deterministic under the seed") {
    TruthConfig t;
    t.seed = 17;
    auto a = generate_league(t);
    auto b = generate_league(t);
    CHECK(a.records == b.records);
    t.seed = 18;
    CHECK_FALSE(generate_league(t).records == a.records);
}

TEST_CASE("family-specific home advantage") {
    TruthConfig t;
    t.family = ModelFamily::Linear;
    t.beta0 = 3.0;
    t.beta1 = -0.15;
    t.seasons = {2000, 2010};
    CHECK(t.home_advantage(2010) == doctest::Approx(1.5));
    t.family = ModelFamily::TimeVarying;
    t.gamma = {1.0, 4.0};
    CHECK(t.home_advantage(2010) == 4.0);
    CHECK_NOTHROW(generate_league(t));
    t.gamma = {1.0};
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
}

TEST_CASE("invalid truth is rejected") {
    TruthConfig t;
    t.n_teams = 5;
    t.games_per_team = 3;
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
    t = TruthConfig{};
    t.sigma = 0.0;
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
    t = TruthConfig{};
    t.neutral_fraction = 1.5;
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
    t = TruthConfig{};
    t.seasons = {2002, 2001};
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
    t = TruthConfig{};
    t.n_teams = 1;
    CHECK_THROWS_AS(generate_league(t), std::invalid_argument);
}

TEST_CASE("hierarchical generator draws league trends around the population mean") {
    HierarchyTruth h;
    h.base.league_id = "L";
    h.n_leagues = 200;
    h.base.n_teams = 4;
    h.base.games_per_team = 2;
    h.base.seasons = {2000};
    h.beta1_star = 0.01;
    h.lambda1 = 0.02;
    auto sim = generate_leagues(h);
    REQUIRE(sim.league_ids.size() == 200);
    CHECK(sim.league_ids[0] == "L1");
    double mean = 0.0;
    for (double b : sim.beta1) mean += b;
    mean /= 200.0;
    CHECK(std::abs(mean - 0.01) < 3.0 * 0.02 / std::sqrt(200.0));
    CHECK(sim.records.size() == 200 * 4);
    CHECK(sim.truth["leagues"].size() == 200);
    h.n_leagues = 1;
    CHECK_THROWS_AS(generate_leagues(h), std::invalid_argument);
}
