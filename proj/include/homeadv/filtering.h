#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "homeadv/ingest.h"

namespace homeadv {

struct FilterConfig {
    int min_games_per_season = 1;
    int min_seasons = 1;
    int final_min_games = 7;

    void validate() const;
};

struct LeagueTeamSeason {
    std::string league_id;
    std::string team;
    int season = 0;

    auto operator<=>(const LeagueTeamSeason&) const = default;
};

struct FilterReport {
    int rounds = 1;
    std::vector<LeagueTeamSeason> removed_team_seasons;   // sorted
    double retained_fraction_teams = 1.0;
    double retained_fraction_games = 1.0;
};

// Repeatedly drops every team-season with fewer than `min_games_per_season`
// surviving games, or whose team survives in fewer than `min_seasons`
// seasons, until a pass removes nothing. A team is keyed by (league, token).
std::pair<std::vector<GameRecord>, FilterReport> iterative_filter(const std::vector<GameRecord>& records,
                                                                  const FilterConfig& config);

// Cell (i, j) is the retained team fraction at thresholds
// (games_thresholds[i], seasons_thresholds[j]).
std::vector<std::vector<double>> retention_grid(const std::vector<GameRecord>& records,
                                                const std::vector<int>& games_thresholds,
                                                const std::vector<int>& seasons_thresholds);

std::vector<GameRecord> apply_final_threshold(const std::vector<GameRecord>& records,
                                              int final_min_games = 7);

nlohmann::json filter_report_json(const FilterReport& report);

} // namespace homeadv
