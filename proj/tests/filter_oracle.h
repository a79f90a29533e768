#pragma once

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "homeadv/filtering.h"
#include "support.h"

namespace homeadv::testing {

struct Instance {
    std::vector<GameRecord> records;
    FilterConfig config;
};

inline Instance random_instance(std::mt19937_64& rng) {
    auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Instance inst;
    const int leagues = uniform(1, 2);
    for (int l = 0; l < leagues; ++l) {
        const int teams = uniform(2, 30);
        const int seasons = uniform(1, 6);
        const int games = uniform(0, teams * seasons * 3);
        for (int g = 0; g < games; ++g) {
            int a = uniform(0, teams - 1);
            int b = uniform(0, teams - 2);
            if (b >= a) ++b;
            inst.records.push_back(game("L" + std::to_string(l), 2000 + uniform(0, seasons - 1),
                                        "T" + std::to_string(a), "T" + std::to_string(b), uniform(0, 40),
                                        uniform(0, 40), uniform(0, 9) == 0));
        }
    }
    inst.config = FilterConfig{uniform(1, 6), uniform(1, 4), 1};
    return inst;
}

// Removes one violating team-season at a time, rescanning from scratch after each removal.
inline std::vector<GameRecord> naive_filter(const std::vector<GameRecord>& records, const FilterConfig& config) {
    std::vector<GameRecord> alive = records;
    while (true) {
        std::map<LeagueTeamSeason, int> games;
        for (const auto& g : alive) {
            ++games[{g.league_id, g.home_team, g.season}];
            ++games[{g.league_id, g.away_team, g.season}];
        }
        std::map<std::pair<std::string, std::string>, std::set<int>> seasons;
        for (const auto& [key, n] : games) seasons[{key.league_id, key.team}].insert(key.season);

        const LeagueTeamSeason* victim = nullptr;
        for (const auto& [key, n] : games) {
            if (n < config.min_games_per_season ||
                static_cast<int>(seasons[{key.league_id, key.team}].size()) < config.min_seasons) {
                victim = &key;
                break;
            }
        }
        if (victim == nullptr) return alive;
        const LeagueTeamSeason v = *victim;
        std::erase_if(alive, [&](const GameRecord& g) {
            return g.league_id == v.league_id && g.season == v.season && (g.home_team == v.team || g.away_team == v.team);
        });
    }
}

inline bool satisfies(const std::vector<GameRecord>& games, const FilterConfig& config) {
    std::map<LeagueTeamSeason, int> count;
    for (const auto& g : games) {
        ++count[{g.league_id, g.home_team, g.season}];
        ++count[{g.league_id, g.away_team, g.season}];
    }
    std::map<std::pair<std::string, std::string>, int> seasons;
    for (const auto& [key, n] : count) {
        if (n < config.min_games_per_season) return false;
        ++seasons[{key.league_id, key.team}];
    }
    for (const auto& [key, n] : seasons)
        if (n < config.min_seasons) return false;
    return true;
}

} // namespace homeadv::testing
