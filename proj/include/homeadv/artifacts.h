#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homeadv/ingest.h"
#include "homeadv/model.h"
#include "homeadv/sampler.h"

namespace homeadv {

// Missing, malformed or mutually inconsistent artifact files.
class ArtifactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kFitFormat = "homeadv-fit/1";

// FNV-1a 64 over the serialized game table, as 16 hex digits.
std::string data_hash(const std::vector<GameRecord>& records);

// One-line summary of the producing configuration, written as a '#' comment
// at the top of every table in a fit directory.
std::string provenance_line(const FitResult& fit, const std::string& hash);

nlohmann::json fit_manifest(const FitResult& fit, const ModelContext& ctx);

struct WriteOptions {
    bool loglik = true;   // loglik.csv can be large; readers recompute it when absent
};

// Fit directory: manifest.json, games.csv, draws_chain_<c>.csv (constrained,
// one column per layout coordinate), sampler_stats.csv, loglik.csv and
// timing.json. Everything except timing.json is deterministic under the seed.
void write_fit(const std::filesystem::path& dir, const FitResult& fit, const ModelContext& ctx,
               const WriteOptions& options = {});

struct LoadedFit {
    FitResult fit;
    std::vector<LeagueDataset> datasets;
    nlohmann::json manifest;
    std::string data_hash;
    std::vector<std::string> league_hashes;   // aligned with fit.leagues

    ModelContext context() const { return ModelContext(fit.spec, datasets); }
};

LoadedFit read_fit(const std::filesystem::path& dir);

} // namespace homeadv
