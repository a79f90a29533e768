#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeadv/ingest.h"
#include "homeadv/model.h"

namespace homeadv {

struct TruthConfig {
    ModelFamily family = ModelFamily::Constant;   // Constant, Linear or TimeVarying
    std::string league_id = "SIM";
    double sigma = 13.0;
    double zeta = 6.0;
    double alpha = 2.5;
    double beta0 = 3.0;
    double beta1 = 0.0;
    std::vector<double> gamma;                    // one per season (TimeVarying)
    std::size_t n_teams = 30;
    std::vector<int> seasons{2019, 2020, 2021, 2022, 2023};
    int games_per_team = 8;                       // per team-season
    double neutral_fraction = 0.0;
    // Tilt of the hosting probability toward the stronger side:
    // P(i hosts j) = clamp(0.5 + host_bias * (theta_i - theta_j), 0.05, 0.95).
    double host_bias = 0.0;
    std::uint64_t seed = 1;

    void validate() const;
    // True home advantage in `season` (not applied to neutral games).
    double home_advantage(int season) const;
};

struct SimulatedLeague {
    std::vector<GameRecord> records;
    nlohmann::json truth;
};

// Fresh team strengths per season, a randomly paired schedule in which every
// team plays `games_per_team` games, and Normal score differentials stored
// as (differential, 0) or (0, -differential).
SimulatedLeague generate_league(const TruthConfig& truth);

// Several Linear leagues whose trends share a population distribution:
// beta1_k ~ N(beta1_star, lambda1^2) and beta0_k ~ N(base.beta0, lambda0^2).
struct HierarchyTruth {
    TruthConfig base;
    std::size_t n_leagues = 8;
    double beta1_star = 0.01;
    double lambda1 = 0.02;
    double lambda0 = 0.5;
};

struct SimulatedLeagues {
    std::vector<GameRecord> records;
    std::vector<std::string> league_ids;
    std::vector<double> beta0;
    std::vector<double> beta1;
    nlohmann::json truth;
};

SimulatedLeagues generate_leagues(const HierarchyTruth& truth);

} // namespace homeadv
