#include "homeadv/simulate.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace homeadv {

namespace {

std::mt19937_64 seeded(std::uint64_t seed, std::uint32_t salt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), salt};
    return std::mt19937_64(seq);
}

std::string team_name(std::size_t i, std::size_t n) {
    std::string digits = std::to_string(i + 1);
    std::string width = std::to_string(n);
    return "T" + std::string(width.size() - digits.size(), '0') + digits;
}

// Pairs up `games_per_team` stubs per team with no team facing itself.
std::vector<std::pair<std::size_t, std::size_t>> draw_schedule(std::size_t n_teams, int games_per_team,
                                                               std::mt19937_64& rng) {
    std::vector<std::size_t> stubs;
    for (std::size_t t = 0; t < n_teams; ++t)
        for (int g = 0; g < games_per_team; ++g) stubs.push_back(t);

    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        const std::size_t pairs = stubs.size() / 2;
        std::uniform_int_distribution<std::size_t> pick(0, pairs - 1);
        bool ok = true;
        for (std::size_t i = 0; i < pairs && ok; ++i) {
            int tries = 0;
            while (stubs[2 * i] == stubs[2 * i + 1]) {
                std::size_t j = pick(rng);
                if (stubs[2 * j] != stubs[2 * i + 1] && stubs[2 * j + 1] != stubs[2 * i])
                    std::swap(stubs[2 * i + 1], stubs[2 * j + 1]);
                if (++tries > 1000) {
                    ok = false;
                    break;
                }
            }
        }
        if (!ok) continue;
        std::vector<std::pair<std::size_t, std::size_t>> games;
        for (std::size_t i = 0; i < pairs; ++i) games.emplace_back(stubs[2 * i], stubs[2 * i + 1]);
        return games;
    }
    throw std::invalid_argument("impossible schedule: could not pair teams without self-matches");
}

nlohmann::json truth_json(const TruthConfig& t) {
    nlohmann::json j = {{"family", family_name(t.family)},
                        {"league_id", t.league_id},
                        {"sigma", t.sigma},
                        {"zeta", t.zeta},
                        {"n_teams", t.n_teams},
                        {"seasons", t.seasons},
                        {"games_per_team", t.games_per_team},
                        {"neutral_fraction", t.neutral_fraction},
                        {"host_bias", t.host_bias},
                        {"seed", t.seed}};
    switch (t.family) {
    case ModelFamily::Constant: j["alpha"] = t.alpha; break;
    case ModelFamily::Linear:
    case ModelFamily::HierarchicalLinear:
        j["beta0"] = t.beta0;
        j["beta1"] = t.beta1;
        break;
    case ModelFamily::TimeVarying: j["gamma"] = t.gamma; break;
    }
    return j;
}

} // namespace

void TruthConfig::validate() const {
    if (family == ModelFamily::HierarchicalLinear)
        throw std::invalid_argument("use generate_leagues for hierarchical truth");
    if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
    if (!(zeta >= 0.0)) throw std::invalid_argument("zeta must be non-negative");
    if (!(neutral_fraction >= 0.0 && neutral_fraction <= 1.0))
        throw std::invalid_argument("neutral_fraction must be in [0, 1]");
    if (!(host_bias >= 0.0)) throw std::invalid_argument("host_bias must be non-negative");
    if (seasons.empty()) throw std::invalid_argument("need at least one season");
    if (!std::is_sorted(seasons.begin(), seasons.end()) ||
        std::adjacent_find(seasons.begin(), seasons.end()) != seasons.end())
        throw std::invalid_argument("seasons must be strictly increasing");
    if (n_teams < 2) throw std::invalid_argument("need at least two teams");
    if (games_per_team < 1) throw std::invalid_argument("games_per_team must be >= 1");
    if ((n_teams * static_cast<std::size_t>(games_per_team)) % 2 != 0)
        throw std::invalid_argument("impossible schedule: n_teams * games_per_team must be even");
    if (family == ModelFamily::TimeVarying && gamma.size() != seasons.size())
        throw std::invalid_argument("time-varying truth needs one gamma per season");
}

double TruthConfig::home_advantage(int season) const {
    switch (family) {
    case ModelFamily::Constant: return alpha;
    case ModelFamily::Linear:
    case ModelFamily::HierarchicalLinear: return beta0 + beta1 * static_cast<double>(season - seasons.front());
    case ModelFamily::TimeVarying: {
        auto it = std::find(seasons.begin(), seasons.end(), season);
        if (it == seasons.end()) throw std::out_of_range("season not simulated");
        return gamma[static_cast<std::size_t>(it - seasons.begin())];
    }
    }
    return 0.0;
}

SimulatedLeague generate_league(const TruthConfig& truth) {
    truth.validate();
    auto rng = seeded(truth.seed, 0x51u);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    SimulatedLeague out;
    for (int season : truth.seasons) {
        std::vector<double> theta(truth.n_teams);
        for (auto& v : theta) v = truth.zeta * normal(rng);
        const double ha = truth.home_advantage(season);

        for (auto [i, j] : draw_schedule(truth.n_teams, truth.games_per_team, rng)) {
            bool neutral = uniform(rng) < truth.neutral_fraction;
            double p_i_hosts = 0.5;
            if (!neutral && truth.host_bias > 0.0)
                p_i_hosts = std::clamp(0.5 + truth.host_bias * (theta[i] - theta[j]), 0.05, 0.95);
            std::size_t home = i;
            std::size_t away = j;
            if (uniform(rng) >= p_i_hosts) std::swap(home, away);

            double mu = theta[home] - theta[away] + (neutral ? 0.0 : ha);
            auto diff = static_cast<int>(std::lround(mu + truth.sigma * normal(rng)));
            GameRecord g;
            g.league_id = truth.league_id;
            g.season = season;
            g.home_team = team_name(home, truth.n_teams);
            g.away_team = team_name(away, truth.n_teams);
            g.home_score = std::max(diff, 0);
            g.away_score = std::max(-diff, 0);
            g.neutral = neutral;
            out.records.push_back(std::move(g));
        }
    }
    out.truth = truth_json(truth);
    return out;
}

SimulatedLeagues generate_leagues(const HierarchyTruth& truth) {
    if (truth.n_leagues < 2) throw std::invalid_argument("need at least two leagues");
    if (!(truth.lambda1 >= 0.0) || !(truth.lambda0 >= 0.0)) throw std::invalid_argument("scales must be non-negative");
    auto rng = seeded(truth.base.seed, 0x4Bu);
    std::normal_distribution<double> normal(0.0, 1.0);

    SimulatedLeagues out;
    nlohmann::json leagues = nlohmann::json::array();
    for (std::size_t k = 0; k < truth.n_leagues; ++k) {
        TruthConfig league = truth.base;
        league.family = ModelFamily::Linear;
        league.league_id = truth.base.league_id + std::to_string(k + 1);
        league.beta0 = truth.base.beta0 + truth.lambda0 * normal(rng);
        league.beta1 = truth.beta1_star + truth.lambda1 * normal(rng);
        league.seed = truth.base.seed * 1000003u + k + 1;
        auto sim = generate_league(league);
        out.records.insert(out.records.end(), sim.records.begin(), sim.records.end());
        out.league_ids.push_back(league.league_id);
        out.beta0.push_back(league.beta0);
        out.beta1.push_back(league.beta1);
        leagues.push_back(sim.truth);
    }
    out.truth = {{"family", "hier"},
                 {"beta1_star", truth.beta1_star},
                 {"lambda1", truth.lambda1},
                 {"lambda0", truth.lambda0},
                 {"seed", truth.base.seed},
                 {"leagues", leagues}};
    return out;
}

} // namespace homeadv
