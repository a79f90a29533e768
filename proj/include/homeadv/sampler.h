#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "homeadv/diagnostics.h"
#include "homeadv/log_density.h"
#include "homeadv/matrix.h"
#include "homeadv/model.h"

namespace homeadv {

struct SamplerConfig {
    std::size_t chains = 4;
    std::size_t iterations = 2000;   // per chain, warmup included
    std::size_t warmup = 500;
    std::uint64_t seed = 1;
    double target_accept = 0.8;
    int max_tree_depth = 10;
    std::size_t threads = 0;         // 0: one worker per chain, capped by hardware

    std::size_t retained() const { return iterations - warmup; }
    void validate() const;
};

class SamplerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DrawStats {
    double accept_stat = 0.0;
    bool divergent = false;
    int tree_depth = 0;
    int n_leapfrog = 0;
    double energy = 0.0;
    double energy_error = 0.0;   // mean |H - H0| over the trajectory's leapfrog states
    double step_size = 0.0;
};

struct PosteriorDraws {
    std::vector<Matrix> chains;                   // retained draws x dimension, unconstrained
    std::vector<std::vector<DrawStats>> stats;    // aligned with chains
    std::vector<double> step_sizes;               // adapted step size per chain
    std::vector<std::vector<double>> inv_metric;  // adapted diagonal per chain

    std::size_t num_chains() const { return chains.size(); }
    std::size_t draws_per_chain() const { return chains.empty() ? 0 : chains.front().rows(); }
    std::size_t dimension() const { return chains.empty() ? 0 : chains.front().cols(); }
    std::size_t divergences() const;

    // Draws of one coordinate for every chain.
    std::vector<std::vector<double>> coordinate(std::size_t index) const;
};

using ChainCallback = std::function<void(std::size_t chain, double seconds)>;

// Uniform(-2, 2) per coordinate until the log density and gradient are finite.
std::vector<double> initialize_chain(const LogDensity& target, std::mt19937_64& rng, int max_attempts = 100);

// Independent stream for chain `chain` under `seed`.
std::mt19937_64 chain_stream(std::uint64_t seed, std::size_t chain);

// Runs config.chains independent chains in parallel. Results depend only on
// (target, config), never on the worker count.
PosteriorDraws sample_draws(const LogDensity& target, const SamplerConfig& config,
                            const ChainCallback& on_chain_done = {});

struct LeagueInfo {
    std::string league_id;
    int t0 = 0;
    std::vector<int> seasons;
    std::size_t num_games = 0;
};

struct FitResult {
    ModelSpec spec;
    SamplerConfig config;
    ParameterLayout layout;
    std::vector<LeagueInfo> leagues;
    PosteriorDraws draws;
    DiagnosticsSummary diagnostics;
    Matrix loglik;                    // games x draws
    double wall_seconds = 0.0;

    // Constrained draws of one coordinate, chains concatenated.
    std::vector<double> constrained_draws(std::size_t index) const;
    std::vector<double> constrained_draws(BlockKind kind, int league, std::size_t component = 0) const;
};

std::vector<LeagueInfo> league_info(const std::vector<LeagueDataset>& datasets);

FitResult sample(const ModelContext& ctx, const SamplerConfig& config, const ChainCallback& on_chain_done = {});

} // namespace homeadv
