#pragma once

#include <climits>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace homeadv {

struct GameRecord {
    std::string league_id;
    int season = 0;
    std::string home_team;   // designated home side; arbitrary but fixed for neutral games
    std::string away_team;
    int home_score = 0;
    int away_score = 0;
    bool neutral = false;

    int differential() const { return home_score - away_score; }
    bool operator==(const GameRecord&) const = default;
};

struct SeasonWindow {
    int first = INT_MIN;
    int last = INT_MAX;

    bool contains(int season) const { return season >= first && season <= last; }
};

struct ParseOptions {
    SeasonWindow window;
    std::size_t max_errors = 100;
};

struct RowError {
    std::size_t row;   // 1-based data row, header excluded
    std::string message;
};

struct ParseResult {
    std::vector<GameRecord> records;
    std::vector<RowError> errors;
};

// Structural problem with the table (bad header, bad integer, wrong field
// count) or too many semantic errors. Parsing stops when thrown.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& message);
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

// Reads the comma-delimited game table. Columns are matched by header name
// (league_id, season, home_team, away_team, home_score, away_score, neutral)
// in any order. Lines starting with '#' and blank lines are skipped.
ParseResult parse_games(std::istream& source, const ParseOptions& options = {});

void write_games(std::ostream& out, const std::vector<GameRecord>& records);

struct TeamSeason {
    std::string team;
    int season = 0;

    auto operator<=>(const TeamSeason&) const = default;
};

struct LeagueDataset {
    std::string league_id;
    std::vector<GameRecord> games;
    int t0 = 0;
    std::vector<int> seasons;                      // sorted, gaps allowed
    std::vector<TeamSeason> team_seasons;          // id -> (team, season), sorted
    std::map<TeamSeason, std::size_t> team_season_index;
    std::map<int, std::size_t> games_per_season;

    // Per-game caches aligned with `games`.
    std::vector<std::size_t> home_index;
    std::vector<std::size_t> away_index;
    std::vector<double> differentials;

    std::size_t num_team_seasons() const { return team_seasons.size(); }
    std::size_t num_games() const { return games.size(); }
    // Position of `season` within `seasons`.
    std::size_t season_slot(int season) const;
};

LeagueDataset build_dataset(const std::vector<GameRecord>& records, const std::string& league_id,
                            const SeasonWindow& window = {});

// Distinct league ids in first-appearance order.
std::vector<std::string> league_ids(const std::vector<GameRecord>& records);

// Mean home-minus-away differential over the non-neutral games of `season`.
double empirical_ha(const LeagueDataset& dataset, int season);

// Same estimator pooled over every season of the dataset.
double empirical_ha_pooled(const LeagueDataset& dataset);

nlohmann::json dataset_summary(const LeagueDataset& dataset);

} // namespace homeadv
