#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "homeadv/ingest.h"
#include "homeadv/log_density.h"
#include "homeadv/matrix.h"

namespace homeadv {

enum class ModelFamily { Constant, Linear, TimeVarying, HierarchicalLinear };

std::string_view family_name(ModelFamily family);
// Accepts "constant", "linear", "timevarying", "hier".
ModelFamily parse_family(std::string_view name);

// Pins every scale parameter to a known value; the scale blocks then drop out
// of the layout. `ha_scale` stands for eta, lambda0/lambda1 or tau depending on
// the family.
struct FixedScales {
    double sigma = 1.0;
    double zeta = 1.0;
    double ha_scale = 1.0;
};

struct ModelSpec {
    ModelFamily family = ModelFamily::Constant;
    double hyper_scale = 5.0;            // half-normal prior scale
    std::vector<std::string> leagues;
    std::optional<FixedScales> fixed_scales;
    // Sample the hierarchical trend slopes as standardized offsets z with
    // beta1 = beta1_star + lambda1 * z. Applies only when lambda1 is sampled.
    bool noncentered_trend = true;

    void validate() const;
};

enum class BlockKind {
    Theta, Alpha, Eta, Beta0, Beta1, Lambda0, Lambda1, Gamma, Tau, Zeta, Sigma, Beta1Star
};

std::string_view block_name(BlockKind kind);
BlockKind parse_block_name(std::string_view name);

struct ParameterBlock {
    BlockKind kind = BlockKind::Theta;
    int league = -1;                   // index into the layout's leagues; -1 when shared
    std::size_t offset = 0;
    std::size_t size = 1;
    bool log_scale = false;            // stored as log of a positive value
    bool noncentered = false;          // stored as a standardized offset from its prior
    std::vector<std::string> labels;   // component labels for vector blocks

    bool operator==(const ParameterBlock&) const = default;
};

class ParameterLayout {
public:
    ParameterLayout() = default;
    // Blocks must tile [0, dimension) without gaps or overlap.
    ParameterLayout(std::vector<std::string> leagues, std::vector<ParameterBlock> blocks);

    std::size_t dimension() const { return dimension_; }
    const std::vector<ParameterBlock>& blocks() const { return blocks_; }
    const std::vector<std::string>& leagues() const { return leagues_; }

    const ParameterBlock* find(BlockKind kind, int league = -1) const;
    const ParameterBlock& at(BlockKind kind, int league = -1) const;

    // One name per coordinate, e.g. "theta[NFL:DET:2023]", "alpha[NFL]", "beta1_star".
    std::vector<std::string> column_names() const;

    nlohmann::json manifest() const;
    static ParameterLayout from_manifest(const nlohmann::json& manifest);

    bool operator==(const ParameterLayout&) const = default;

private:
    std::vector<std::string> leagues_;
    std::vector<ParameterBlock> blocks_;
    std::size_t dimension_ = 0;
};

// `datasets` must be in the order of `spec.leagues`.
ParameterLayout build_layout(const ModelSpec& spec, const std::vector<LeagueDataset>& datasets);

// exp on log-scale blocks, location + scale * z on non-centered blocks,
// identity elsewhere.
std::vector<double> constrain(std::span<const double> unconstrained, const ParameterLayout& layout);
// Inverse of constrain; throws std::domain_error on a non-positive scale.
std::vector<double> unconstrain(std::span<const double> constrained, const ParameterLayout& layout);

class ModelContext final : public LogDensity {
public:
    ModelContext(ModelSpec spec, std::vector<LeagueDataset> datasets);

    const ModelSpec& spec() const { return spec_; }
    const std::vector<LeagueDataset>& datasets() const { return datasets_; }
    const ParameterLayout& layout() const { return layout_; }
    std::size_t num_games() const { return num_games_; }

    std::size_t dimension() const override { return layout_.dimension(); }
    double log_density(std::span<const double> x) const override;
    double log_density_gradient(std::span<const double> x, std::span<double> grad) const override;

    // Expected differential of game `game` in league `league` under constrained values.
    double mu(std::span<const double> constrained, std::size_t league, std::size_t game) const;
    // Per-game Normal log density for one constrained draw, games in league order.
    void pointwise_loglik(std::span<const double> constrained, std::span<double> out) const;

private:
    struct CachedGame {
        std::size_t home;          // absolute coordinate of the home team-season
        std::size_t away;
        double y;
        double dt;                 // t - t0 in raw years
        std::size_t season_slot;
        double h;                  // 0 for neutral sites
    };
    // Coordinates of each league's parameters; -1 when fixed or absent.
    struct Slots {
        std::size_t theta = 0;
        std::size_t n_theta = 0;
        long alpha = -1, eta = -1, beta0 = -1, beta1 = -1, lambda0 = -1, lambda1 = -1;
        long gamma = -1, tau = -1, zeta = -1, sigma = -1;
        long beta1_location = -1, beta1_scale = -1;   // set when beta1 is non-centered
        std::size_t n_gamma = 0;
        std::vector<CachedGame> games;
    };

    double evaluate(std::span<const double> x, double* grad) const;
    void check_input(std::span<const double> x) const;
    double home_advantage(std::span<const double> values, const Slots& s, const CachedGame& g) const;

    ModelSpec spec_;
    std::vector<LeagueDataset> datasets_;
    ParameterLayout layout_;
    std::vector<Slots> slots_;
    long beta1_star_ = -1;
    long lambda1_shared_ = -1;
    std::size_t num_games_ = 0;
};

double log_posterior(const ModelContext& ctx, std::span<const double> x);
std::vector<double> grad_log_posterior(const ModelContext& ctx, std::span<const double> x);

double mu_for_game(const ModelContext& ctx, std::span<const double> constrained, std::size_t league,
                   std::size_t game);

// Entry (g, s): log density of game g under draw s. Draws are unconstrained
// rows, chains concatenated in order.
Matrix pointwise_loglik(const ModelContext& ctx, const std::vector<Matrix>& chains);

} // namespace homeadv
