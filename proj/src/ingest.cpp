#include "homeadv/ingest.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <set>
#include <sstream>

namespace homeadv {

namespace {

constexpr std::array<const char*, 7> kColumns = {
    "league_id", "season", "home_team", "away_team", "home_score", "away_score", "neutral"};

enum Column { League, Season, Home, Away, HomeScore, AwayScore, Neutral };

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Splits one line on commas; double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_fields(const std::string& line, std::size_t row) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (quoted) throw ParseError(row, "unterminated quoted field");
    fields.push_back(trim(current));
    return fields;
}

int parse_int(const std::string& text, const char* column, std::size_t row) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError(row, std::string("bad integer in column ") + column + ": '" + text + "'");
    return value;
}

bool parse_bool(const std::string& text, std::size_t row) {
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "true" || lower == "1" || lower == "t" || lower == "yes") return true;
    if (lower == "false" || lower == "0" || lower == "f" || lower == "no") return false;
    throw ParseError(row, "bad boolean in column neutral: '" + text + "'");
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

} // namespace

ParseError::ParseError(std::size_t row, const std::string& message)
    : std::runtime_error("row " + std::to_string(row) + ": " + message), row_(row) {}

ParseResult parse_games(std::istream& source, const ParseOptions& options) {
    ParseResult result;
    std::string line;
    std::array<std::size_t, kColumns.size()> position{};
    bool have_header = false;
    std::size_t width = 0;
    std::size_t row = 0;

    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;

        if (!have_header) {
            // BOM
            if (stripped.rfind("\xEF\xBB\xBF", 0) == 0) stripped.erase(0, 3);
            auto names = split_fields(stripped, 0);
            position.fill(names.size());
            for (std::size_t i = 0; i < names.size(); ++i) {
                auto it = std::find_if(kColumns.begin(), kColumns.end(),
                                       [&](const char* c) { return names[i] == c; });
                if (it == kColumns.end()) throw ParseError(0, "unknown column '" + names[i] + "'");
                auto col = static_cast<std::size_t>(it - kColumns.begin());
                if (position[col] != names.size())
                    throw ParseError(0, "duplicate column '" + names[i] + "'");
                position[col] = i;
            }
            for (std::size_t c = 0; c < kColumns.size(); ++c)
                if (position[c] == names.size())
                    throw ParseError(0, std::string("missing column '") + kColumns[c] + "'");
            width = names.size();
            have_header = true;
            continue;
        }

        ++row;
        auto fields = split_fields(stripped, row);
        if (fields.size() != width)
            throw ParseError(row, "expected " + std::to_string(width) + " fields, found " +
                                      std::to_string(fields.size()));

        GameRecord g;
        g.league_id = fields[position[League]];
        g.season = parse_int(fields[position[Season]], "season", row);
        g.home_team = fields[position[Home]];
        g.away_team = fields[position[Away]];
        g.home_score = parse_int(fields[position[HomeScore]], "home_score", row);
        g.away_score = parse_int(fields[position[AwayScore]], "away_score", row);
        g.neutral = parse_bool(fields[position[Neutral]], row);

        std::string problem;
        if (g.league_id.empty() || g.home_team.empty() || g.away_team.empty())
            problem = "empty league or team token";
        else if (g.home_team == g.away_team)
            problem = "home_team equals away_team ('" + g.home_team + "')";
        else if (g.home_score < 0 || g.away_score < 0)
            problem = "negative score";
        else if (!options.window.contains(g.season))
            problem = "season " + std::to_string(g.season) + " outside study window";

        if (problem.empty()) {
            result.records.push_back(std::move(g));
        } else {
            result.errors.push_back({row, problem});
            if (result.errors.size() > options.max_errors)
                throw ParseError(row, "too many invalid rows (cap " +
                                          std::to_string(options.max_errors) + ")");
        }
    }
    if (!have_header) throw ParseError(0, "missing header");
    return result;
}

void write_games(std::ostream& out, const std::vector<GameRecord>& records) {
    out << "league_id,season,home_team,away_team,home_score,away_score,neutral\n";
    for (const auto& g : records) {
        out << quote_if_needed(g.league_id) << ',' << g.season << ',' << quote_if_needed(g.home_team)
            << ',' << quote_if_needed(g.away_team) << ',' << g.home_score << ',' << g.away_score
            << ',' << (g.neutral ? "true" : "false") << '\n';
    }
}

std::size_t LeagueDataset::season_slot(int season) const {
    auto it = std::lower_bound(seasons.begin(), seasons.end(), season);
    if (it == seasons.end() || *it != season)
        throw std::out_of_range("season " + std::to_string(season) + " not in dataset");
    return static_cast<std::size_t>(it - seasons.begin());
}

LeagueDataset build_dataset(const std::vector<GameRecord>& records, const std::string& league_id,
                            const SeasonWindow& window) {
    LeagueDataset ds;
    ds.league_id = league_id;
    for (const auto& g : records)
        if (g.league_id == league_id && window.contains(g.season)) ds.games.push_back(g);
    if (ds.games.empty()) throw std::invalid_argument("no games for league '" + league_id + "'");

    std::set<TeamSeason> keys;
    std::set<int> seasons;
    for (const auto& g : ds.games) {
        keys.insert({g.home_team, g.season});
        keys.insert({g.away_team, g.season});
        seasons.insert(g.season);
        ++ds.games_per_season[g.season];
    }
    ds.team_seasons.assign(keys.begin(), keys.end());
    for (std::size_t i = 0; i < ds.team_seasons.size(); ++i)
        ds.team_season_index.emplace(ds.team_seasons[i], i);
    ds.seasons.assign(seasons.begin(), seasons.end());
    ds.t0 = ds.seasons.front();

    ds.home_index.reserve(ds.games.size());
    ds.away_index.reserve(ds.games.size());
    ds.differentials.reserve(ds.games.size());
    for (const auto& g : ds.games) {
        ds.home_index.push_back(ds.team_season_index.at({g.home_team, g.season}));
        ds.away_index.push_back(ds.team_season_index.at({g.away_team, g.season}));
        ds.differentials.push_back(static_cast<double>(g.differential()));
    }
    return ds;
}

std::vector<std::string> league_ids(const std::vector<GameRecord>& records) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& g : records)
        if (seen.insert(g.league_id).second) out.push_back(g.league_id);
    return out;
}

double empirical_ha(const LeagueDataset& dataset, int season) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& g : dataset.games) {
        if (g.season != season || g.neutral) continue;
        sum += g.differential();
        ++n;
    }
    if (n == 0)
        throw std::domain_error("empirical HA undefined: no non-neutral games in season " +
                                std::to_string(season));
    return sum / static_cast<double>(n);
}

double empirical_ha_pooled(const LeagueDataset& dataset) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& g : dataset.games) {
        if (g.neutral) continue;
        sum += g.differential();
        ++n;
    }
    if (n == 0) throw std::domain_error("empirical HA undefined: no non-neutral games");
    return sum / static_cast<double>(n);
}

nlohmann::json dataset_summary(const LeagueDataset& dataset) {
    nlohmann::json per_season = nlohmann::json::array();
    std::map<int, std::size_t> teams_per_season;
    for (const auto& ts : dataset.team_seasons) ++teams_per_season[ts.season];
    for (int season : dataset.seasons) {
        std::size_t neutral = 0;
        for (const auto& g : dataset.games)
            if (g.season == season && g.neutral) ++neutral;
        per_season.push_back({{"season", season},
                              {"games", dataset.games_per_season.at(season)},
                              {"neutral_games", neutral},
                              {"team_seasons", teams_per_season[season]}});
    }
    std::set<std::string> teams;
    for (const auto& ts : dataset.team_seasons) teams.insert(ts.team);
    return {{"league_id", dataset.league_id},
            {"t0", dataset.t0},
            {"games", dataset.num_games()},
            {"teams", teams.size()},
            {"team_seasons", dataset.num_team_seasons()},
            {"seasons", per_season}};
}

} // namespace homeadv
