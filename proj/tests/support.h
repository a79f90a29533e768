#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "homeadv/ingest.h"
#include "homeadv/model.h"
#include "homeadv/simulate.h"

namespace homeadv::testing {

inline GameRecord game(std::string league, int season, std::string home, std::string away, int home_score,
                       int away_score, bool neutral = false) {
    return {std::move(league), season, std::move(home), std::move(away), home_score, away_score, neutral};
}

// Small multi-league fixture with neutral games, gapped seasons and every family's blocks populated.
inline std::vector<GameRecord> three_league_fixture(std::uint64_t seed = 7) {
    std::vector<GameRecord> records;
    const char* ids[] = {"NFL", "FBS", "HS"};
    for (std::size_t k = 0; k < 3; ++k) {
        TruthConfig t;
        t.league_id = ids[k];
        t.family = ModelFamily::Linear;
        t.n_teams = 6;
        t.seasons = k == 2 ? std::vector<int>{2001, 2003, 2004} : std::vector<int>{2001, 2002, 2003};
        t.games_per_team = 4;
        t.beta0 = 2.0 + static_cast<double>(k);
        t.beta1 = -0.2;
        t.neutral_fraction = 0.15;
        t.seed = seed + k;
        auto sim = generate_league(t);
        records.insert(records.end(), sim.records.begin(), sim.records.end());
    }
    return records;
}

inline std::vector<LeagueDataset> datasets_for(const std::vector<GameRecord>& records,
                                               const std::vector<std::string>& leagues) {
    std::vector<LeagueDataset> out;
    for (const auto& id : leagues) out.push_back(build_dataset(records, id));
    return out;
}

inline ModelContext context_for(ModelFamily family, const std::vector<GameRecord>& records) {
    ModelSpec spec;
    spec.family = family;
    spec.leagues = league_ids(records);
    return ModelContext(spec, datasets_for(records, spec.leagues));
}

// Temporary directory removed on destruction.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("homeadv_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

} // namespace homeadv::testing
