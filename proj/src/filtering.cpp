#include "homeadv/filtering.h"

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <stdexcept>

namespace homeadv {

namespace {

using TeamKey = std::pair<std::string, std::string>;   // (league, team)

LeagueTeamSeason home_key(const GameRecord& g) { return {g.league_id, g.home_team, g.season}; }
LeagueTeamSeason away_key(const GameRecord& g) { return {g.league_id, g.away_team, g.season}; }

std::set<TeamKey> distinct_teams(const std::vector<GameRecord>& games) {
    std::set<TeamKey> teams;
    for (const auto& g : games) {
        teams.emplace(g.league_id, g.home_team);
        teams.emplace(g.league_id, g.away_team);
    }
    return teams;
}

std::set<LeagueTeamSeason> distinct_team_seasons(const std::vector<GameRecord>& games) {
    std::set<LeagueTeamSeason> out;
    for (const auto& g : games) {
        out.insert(home_key(g));
        out.insert(away_key(g));
    }
    return out;
}

} // namespace

void FilterConfig::validate() const {
    if (min_games_per_season < 1 || min_seasons < 1 || final_min_games < 1)
        throw std::invalid_argument("filter thresholds must all be >= 1");
}

std::pair<std::vector<GameRecord>, FilterReport> iterative_filter(const std::vector<GameRecord>& records,
                                                                  const FilterConfig& config) {
    config.validate();
    std::vector<char> alive(records.size(), 1);
    FilterReport report;
    report.rounds = 0;

    while (true) {
        ++report.rounds;
        std::map<LeagueTeamSeason, int> games;
        for (std::size_t i = 0; i < records.size(); ++i) {
            if (!alive[i]) continue;
            ++games[home_key(records[i])];
            ++games[away_key(records[i])];
        }
        std::map<TeamKey, int> seasons;
        for (const auto& [key, count] : games) ++seasons[{key.league_id, key.team}];

        std::set<LeagueTeamSeason> doomed;
        for (const auto& [key, count] : games) {
            if (count < config.min_games_per_season ||
                seasons[{key.league_id, key.team}] < config.min_seasons)
                doomed.insert(key);
        }
        if (doomed.empty()) break;

        for (std::size_t i = 0; i < records.size(); ++i) {
            if (alive[i] && (doomed.count(home_key(records[i])) || doomed.count(away_key(records[i]))))
                alive[i] = 0;
        }
    }

    std::vector<GameRecord> kept;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (alive[i]) kept.push_back(records[i]);

    auto before = distinct_team_seasons(records);
    auto after = distinct_team_seasons(kept);
    std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                        std::back_inserter(report.removed_team_seasons));

    auto teams_before = distinct_teams(records).size();
    if (teams_before > 0)
        report.retained_fraction_teams =
            static_cast<double>(distinct_teams(kept).size()) / static_cast<double>(teams_before);
    if (!records.empty())
        report.retained_fraction_games =
            static_cast<double>(kept.size()) / static_cast<double>(records.size());
    return {std::move(kept), std::move(report)};
}

std::vector<std::vector<double>> retention_grid(const std::vector<GameRecord>& records,
                                                const std::vector<int>& games_thresholds,
                                                const std::vector<int>& seasons_thresholds) {
    if (games_thresholds.empty() || seasons_thresholds.empty())
        throw std::invalid_argument("threshold lists must be non-empty");
    if (!std::is_sorted(games_thresholds.begin(), games_thresholds.end()) ||
        !std::is_sorted(seasons_thresholds.begin(), seasons_thresholds.end()))
        throw std::invalid_argument("threshold lists must be ascending");

    std::vector<std::vector<std::future<double>>> cells(games_thresholds.size());
    for (std::size_t i = 0; i < games_thresholds.size(); ++i) {
        for (int s : seasons_thresholds) {
            FilterConfig cfg{games_thresholds[i], s, 1};
            cells[i].push_back(std::async(std::launch::async, [&records, cfg] {
                return iterative_filter(records, cfg).second.retained_fraction_teams;
            }));
        }
    }
    std::vector<std::vector<double>> grid(games_thresholds.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (auto& f : cells[i]) grid[i].push_back(f.get());
    return grid;
}

std::vector<GameRecord> apply_final_threshold(const std::vector<GameRecord>& records, int final_min_games) {
    return iterative_filter(records, FilterConfig{final_min_games, 1, final_min_games}).first;
}

nlohmann::json filter_report_json(const FilterReport& report) {
    nlohmann::json removed = nlohmann::json::array();
    for (const auto& r : report.removed_team_seasons)
        removed.push_back({{"league_id", r.league_id}, {"team", r.team}, {"season", r.season}});
    return {{"rounds", report.rounds},
            {"retained_fraction_teams", report.retained_fraction_teams},
            {"retained_fraction_games", report.retained_fraction_games},
            {"removed_team_seasons", removed}};
}

} // namespace homeadv
