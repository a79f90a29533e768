#include "homeadv/model.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace homeadv {

namespace {

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

struct BlockInfo {
    BlockKind kind;
    const char* name;
    bool log_scale;
};

constexpr BlockInfo kBlockInfo[] = {
    {BlockKind::Theta, "theta", false},     {BlockKind::Alpha, "alpha", false},
    {BlockKind::Eta, "eta", true},          {BlockKind::Beta0, "beta0", false},
    {BlockKind::Beta1, "beta1", false},     {BlockKind::Lambda0, "lambda0", true},
    {BlockKind::Lambda1, "lambda1", true},  {BlockKind::Gamma, "gamma", false},
    {BlockKind::Tau, "tau", true},          {BlockKind::Zeta, "zeta", true},
    {BlockKind::Sigma, "sigma", true},      {BlockKind::Beta1Star, "beta1_star", false},
};

// Offsets of the location (-1 when zero) and log-scale coordinates that a
// non-centered block is standardized against.
std::pair<long, long> noncentered_prior(const ParameterLayout& layout, const ParameterBlock& block) {
    const auto* location = layout.find(BlockKind::Beta1Star, -1);
    const auto* scale = layout.find(BlockKind::Lambda1, block.league);
    if (scale == nullptr) scale = layout.find(BlockKind::Lambda1, -1);
    if (block.kind != BlockKind::Beta1 || scale == nullptr)
        throw std::invalid_argument("block " + std::string(block_name(block.kind)) + " cannot be non-centered");
    return {location ? static_cast<long>(location->offset) : -1, static_cast<long>(scale->offset)};
}

bool is_log_scale(BlockKind kind) {
    for (const auto& info : kBlockInfo)
        if (info.kind == kind) return info.log_scale;
    return false;
}

// Accumulates log N(value | mean, scale) and its gradient. Negative indices
// mark quantities that are not sampled.
struct Accumulator {
    double lp = 0.0;
    double* grad = nullptr;

    void add(long idx, double g) {
        if (grad != nullptr && idx >= 0) grad[idx] += g;
    }

    void normal(double value, long value_idx, double mean, long mean_idx, double scale, long log_scale_idx) {
        double d = value - mean;
        double z = d / scale;
        lp += -kLogSqrt2Pi - std::log(scale) - 0.5 * z * z;
        if (grad == nullptr) return;
        double w = d / (scale * scale);
        add(value_idx, -w);
        add(mean_idx, w);
        add(log_scale_idx, -1.0 + z * z);
    }

    // HalfNormal(0, hyper^2) on exp(u) plus the log-Jacobian u.
    void half_normal_log(double u, long idx, double hyper) {
        double s = std::exp(u);
        double z = s / hyper;
        lp += std::numbers::ln2 - std::log(hyper) - kLogSqrt2Pi - 0.5 * z * z + u;
        add(idx, 1.0 - z * z);
    }
};

double value_or(std::span<const double> x, long idx, double fallback) {
    return idx >= 0 ? x[static_cast<std::size_t>(idx)] : fallback;
}

double scale_or(std::span<const double> x, long idx, double fallback) {
    return idx >= 0 ? std::exp(x[static_cast<std::size_t>(idx)]) : fallback;
}

} // namespace

std::string_view family_name(ModelFamily family) {
    switch (family) {
    case ModelFamily::Constant: return "constant";
    case ModelFamily::Linear: return "linear";
    case ModelFamily::TimeVarying: return "timevarying";
    case ModelFamily::HierarchicalLinear: return "hier";
    }
    return "unknown";
}

ModelFamily parse_family(std::string_view name) {
    if (name == "constant") return ModelFamily::Constant;
    if (name == "linear") return ModelFamily::Linear;
    if (name == "timevarying") return ModelFamily::TimeVarying;
    if (name == "hier") return ModelFamily::HierarchicalLinear;
    throw std::invalid_argument("unknown model family '" + std::string(name) + "'");
}

void ModelSpec::validate() const {
    if (!(hyper_scale > 0.0) || !std::isfinite(hyper_scale))
        throw std::invalid_argument("hyper_scale must be positive");
    if (leagues.empty()) throw std::invalid_argument("model needs at least one league");
    if (family == ModelFamily::HierarchicalLinear && leagues.size() < 2)
        throw std::invalid_argument("hierarchical model needs at least two leagues");
    auto sorted = leagues;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("duplicate league in model spec");
    if (fixed_scales) {
        const auto& f = *fixed_scales;
        if (!(f.sigma > 0.0) || !(f.zeta > 0.0) || !(f.ha_scale > 0.0))
            throw std::invalid_argument("fixed scales must be positive");
    }
}

std::string_view block_name(BlockKind kind) {
    for (const auto& info : kBlockInfo)
        if (info.kind == kind) return info.name;
    return "unknown";
}

BlockKind parse_block_name(std::string_view name) {
    for (const auto& info : kBlockInfo)
        if (name == info.name) return info.kind;
    throw std::invalid_argument("unknown parameter block '" + std::string(name) + "'");
}

ParameterLayout::ParameterLayout(std::vector<std::string> leagues, std::vector<ParameterBlock> blocks)
    : leagues_(std::move(leagues)), blocks_(std::move(blocks)) {
    std::size_t next = 0;
    for (const auto& b : blocks_) {
        if (b.offset != next) throw std::invalid_argument("layout blocks are not dense");
        if (b.size == 0) throw std::invalid_argument("empty layout block");
        if (b.league >= static_cast<int>(leagues_.size()) || b.league < -1)
            throw std::invalid_argument("layout block refers to unknown league");
        if (!b.labels.empty() && b.labels.size() != b.size)
            throw std::invalid_argument("block labels must match its size");
        if (find(b.kind, b.league) != &b) throw std::invalid_argument("duplicate layout block");
        next += b.size;
    }
    dimension_ = next;
}

const ParameterBlock* ParameterLayout::find(BlockKind kind, int league) const {
    for (const auto& b : blocks_)
        if (b.kind == kind && b.league == league) return &b;
    return nullptr;
}

const ParameterBlock& ParameterLayout::at(BlockKind kind, int league) const {
    const auto* b = find(kind, league);
    if (b == nullptr)
        throw std::out_of_range("layout has no block " + std::string(block_name(kind)) +
                                (league >= 0 ? "[" + leagues_.at(static_cast<std::size_t>(league)) + "]" : ""));
    return *b;
}

std::vector<std::string> ParameterLayout::column_names() const {
    std::vector<std::string> names;
    names.reserve(dimension_);
    for (const auto& b : blocks_) {
        std::string base(block_name(b.kind));
        std::string league = b.league >= 0 ? leagues_[static_cast<std::size_t>(b.league)] : "";
        for (std::size_t i = 0; i < b.size; ++i) {
            std::string inner = league;
            if (!b.labels.empty()) inner += (inner.empty() ? "" : ":") + b.labels[i];
            names.push_back(inner.empty() ? base : base + "[" + inner + "]");
        }
    }
    return names;
}

nlohmann::json ParameterLayout::manifest() const {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : blocks_) {
        blocks.push_back({{"name", block_name(b.kind)},
                          {"league", b.league >= 0 ? nlohmann::json(leagues_[static_cast<std::size_t>(b.league)])
                                                   : nlohmann::json(nullptr)},
                          {"offset", b.offset},
                          {"size", b.size},
                          {"log_scale", b.log_scale},
                          {"noncentered", b.noncentered},
                          {"labels", b.labels}});
    }
    return {{"dimension", dimension_}, {"leagues", leagues_}, {"blocks", blocks}};
}

ParameterLayout ParameterLayout::from_manifest(const nlohmann::json& manifest) {
    auto leagues = manifest.at("leagues").get<std::vector<std::string>>();
    std::vector<ParameterBlock> blocks;
    for (const auto& j : manifest.at("blocks")) {
        ParameterBlock b;
        b.kind = parse_block_name(j.at("name").get<std::string>());
        b.league = -1;
        if (!j.at("league").is_null()) {
            auto name = j.at("league").get<std::string>();
            auto it = std::find(leagues.begin(), leagues.end(), name);
            if (it == leagues.end()) throw std::invalid_argument("manifest block names unknown league " + name);
            b.league = static_cast<int>(it - leagues.begin());
        }
        b.offset = j.at("offset").get<std::size_t>();
        b.size = j.at("size").get<std::size_t>();
        b.log_scale = j.at("log_scale").get<bool>();
        b.noncentered = j.value("noncentered", false);
        b.labels = j.at("labels").get<std::vector<std::string>>();
        blocks.push_back(std::move(b));
    }
    ParameterLayout layout(std::move(leagues), std::move(blocks));
    if (layout.dimension() != manifest.at("dimension").get<std::size_t>())
        throw std::invalid_argument("manifest dimension does not match its blocks");
    return layout;
}

ParameterLayout build_layout(const ModelSpec& spec, const std::vector<LeagueDataset>& datasets) {
    spec.validate();
    if (datasets.size() != spec.leagues.size())
        throw std::invalid_argument("expected one dataset per league");
    const bool free_scales = !spec.fixed_scales.has_value();

    std::vector<ParameterBlock> blocks;
    std::size_t offset = 0;
    auto push = [&](BlockKind kind, int league, std::size_t size, std::vector<std::string> labels = {}) {
        bool noncentered = kind == BlockKind::Beta1 && spec.family == ModelFamily::HierarchicalLinear && free_scales &&
                           spec.noncentered_trend;
        blocks.push_back({kind, league, offset, size, is_log_scale(kind), noncentered, std::move(labels)});
        offset += size;
    };

    for (std::size_t k = 0; k < datasets.size(); ++k) {
        const auto& ds = datasets[k];
        if (ds.league_id != spec.leagues[k])
            throw std::invalid_argument("dataset order does not match spec leagues");
        if (ds.num_team_seasons() == 0) throw std::invalid_argument("league " + ds.league_id + " has no team-seasons");
        int league = static_cast<int>(k);

        std::vector<std::string> theta_labels;
        for (const auto& ts : ds.team_seasons) theta_labels.push_back(ts.team + ":" + std::to_string(ts.season));
        push(BlockKind::Theta, league, ds.num_team_seasons(), std::move(theta_labels));

        switch (spec.family) {
        case ModelFamily::Constant:
            push(BlockKind::Alpha, league, 1);
            if (free_scales) push(BlockKind::Eta, league, 1);
            break;
        case ModelFamily::Linear:
            push(BlockKind::Beta0, league, 1);
            push(BlockKind::Beta1, league, 1);
            if (free_scales) {
                push(BlockKind::Lambda0, league, 1);
                push(BlockKind::Lambda1, league, 1);
            }
            break;
        case ModelFamily::TimeVarying: {
            std::vector<std::string> labels;
            for (int season : ds.seasons) labels.push_back(std::to_string(season));
            push(BlockKind::Gamma, league, ds.seasons.size(), std::move(labels));
            if (free_scales) push(BlockKind::Tau, league, 1);
            break;
        }
        case ModelFamily::HierarchicalLinear:
            push(BlockKind::Beta0, league, 1);
            push(BlockKind::Beta1, league, 1);
            if (free_scales) push(BlockKind::Lambda0, league, 1);
            break;
        }
        if (free_scales) {
            push(BlockKind::Zeta, league, 1);
            push(BlockKind::Sigma, league, 1);
        }
    }
    if (spec.family == ModelFamily::HierarchicalLinear) {
        push(BlockKind::Beta1Star, -1, 1);
        if (free_scales) push(BlockKind::Lambda1, -1, 1);
    }
    return ParameterLayout(spec.leagues, std::move(blocks));
}

std::vector<double> constrain(std::span<const double> unconstrained, const ParameterLayout& layout) {
    if (unconstrained.size() != layout.dimension())
        throw std::invalid_argument("vector dimension does not match layout");
    std::vector<double> out(unconstrained.begin(), unconstrained.end());
    for (const auto& b : layout.blocks())
        if (b.log_scale)
            for (std::size_t i = b.offset; i < b.offset + b.size; ++i) out[i] = std::exp(out[i]);
    for (const auto& b : layout.blocks()) {
        if (!b.noncentered) continue;
        auto [location, scale] = noncentered_prior(layout, b);
        double loc = location >= 0 ? out[static_cast<std::size_t>(location)] : 0.0;
        for (std::size_t i = b.offset; i < b.offset + b.size; ++i)
            out[i] = loc + out[static_cast<std::size_t>(scale)] * out[i];
    }
    return out;
}

std::vector<double> unconstrain(std::span<const double> constrained, const ParameterLayout& layout) {
    if (constrained.size() != layout.dimension())
        throw std::invalid_argument("vector dimension does not match layout");
    std::vector<double> out(constrained.begin(), constrained.end());
    for (const auto& b : layout.blocks()) {
        if (!b.noncentered) continue;
        auto [location, scale] = noncentered_prior(layout, b);
        double loc = location >= 0 ? constrained[static_cast<std::size_t>(location)] : 0.0;
        double sd = constrained[static_cast<std::size_t>(scale)];
        if (!(sd > 0.0)) throw std::domain_error("scale parameter lambda1 must be positive");
        for (std::size_t i = b.offset; i < b.offset + b.size; ++i) out[i] = (constrained[i] - loc) / sd;
    }
    for (const auto& b : layout.blocks()) {
        if (!b.log_scale) continue;
        for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
            if (!(out[i] > 0.0))
                throw std::domain_error("scale parameter " + std::string(block_name(b.kind)) + " must be positive");
            out[i] = std::log(out[i]);
        }
    }
    return out;
}

ModelContext::ModelContext(ModelSpec spec, std::vector<LeagueDataset> datasets)
    : spec_(std::move(spec)), datasets_(std::move(datasets)) {
    layout_ = build_layout(spec_, datasets_);

    auto index_of = [&](BlockKind kind, int league) -> long {
        const auto* b = layout_.find(kind, league);
        return b ? static_cast<long>(b->offset) : -1;
    };

    slots_.resize(datasets_.size());
    for (std::size_t k = 0; k < datasets_.size(); ++k) {
        const auto& ds = datasets_[k];
        int league = static_cast<int>(k);
        Slots& s = slots_[k];
        const auto& theta = layout_.at(BlockKind::Theta, league);
        s.theta = theta.offset;
        s.n_theta = theta.size;
        s.alpha = index_of(BlockKind::Alpha, league);
        s.eta = index_of(BlockKind::Eta, league);
        s.beta0 = index_of(BlockKind::Beta0, league);
        s.beta1 = index_of(BlockKind::Beta1, league);
        s.lambda0 = index_of(BlockKind::Lambda0, league);
        s.lambda1 = index_of(BlockKind::Lambda1, league);
        s.gamma = index_of(BlockKind::Gamma, league);
        s.n_gamma = s.gamma >= 0 ? ds.seasons.size() : 0;
        s.tau = index_of(BlockKind::Tau, league);
        s.zeta = index_of(BlockKind::Zeta, league);
        s.sigma = index_of(BlockKind::Sigma, league);
        if (s.beta1 >= 0 && layout_.at(BlockKind::Beta1, league).noncentered) {
            auto [location, scale] = noncentered_prior(layout_, layout_.at(BlockKind::Beta1, league));
            s.beta1_location = location;
            s.beta1_scale = scale;
        }

        s.games.reserve(ds.num_games());
        for (std::size_t g = 0; g < ds.num_games(); ++g) {
            const auto& rec = ds.games[g];
            s.games.push_back({s.theta + ds.home_index[g], s.theta + ds.away_index[g], ds.differentials[g],
                               static_cast<double>(rec.season - ds.t0), ds.season_slot(rec.season),
                               rec.neutral ? 0.0 : 1.0});
        }
        num_games_ += ds.num_games();
    }
    beta1_star_ = index_of(BlockKind::Beta1Star, -1);
    lambda1_shared_ = index_of(BlockKind::Lambda1, -1);
}

double ModelContext::home_advantage(std::span<const double> values, const Slots& s, const CachedGame& g) const {
    switch (spec_.family) {
    case ModelFamily::Constant:
        return values[static_cast<std::size_t>(s.alpha)];
    case ModelFamily::Linear:
    case ModelFamily::HierarchicalLinear:
        return values[static_cast<std::size_t>(s.beta0)] + values[static_cast<std::size_t>(s.beta1)] * g.dt;
    case ModelFamily::TimeVarying:
        return values[static_cast<std::size_t>(s.gamma) + g.season_slot];
    }
    return 0.0;
}

void ModelContext::check_input(std::span<const double> x) const {
    if (x.size() != layout_.dimension())
        throw std::invalid_argument("parameter vector has dimension " + std::to_string(x.size()) + ", layout expects " +
                                    std::to_string(layout_.dimension()));
    for (double v : x)
        if (!std::isfinite(v)) throw std::domain_error("non-finite parameter value");
}

double ModelContext::evaluate(std::span<const double> x, double* grad) const {
    const double hyper = spec_.hyper_scale;
    const FixedScales fixed = spec_.fixed_scales.value_or(FixedScales{});
    Accumulator acc;
    acc.grad = grad;
    if (grad != nullptr) std::fill(grad, grad + x.size(), 0.0);

    double beta1_star = value_or(x, beta1_star_, 0.0);
    double lambda1_shared = scale_or(x, lambda1_shared_, fixed.ha_scale);

    for (const auto& s : slots_) {
        const double sigma = scale_or(x, s.sigma, fixed.sigma);
        const double zeta = scale_or(x, s.zeta, fixed.zeta);
        const double inv_var = 1.0 / (sigma * sigma);
        const bool noncentered = s.beta1_scale >= 0;
        const double beta1_sd = noncentered ? std::exp(x[s.beta1_scale]) : 1.0;
        double beta1 = 0.0;
        if (s.beta1 >= 0)
            beta1 = noncentered ? value_or(x, s.beta1_location, 0.0) + beta1_sd * x[s.beta1] : x[s.beta1];
        double beta1_grad = 0.0;

        // Likelihood.
        double sum_sq = 0.0;
        for (const auto& g : s.games) {
            double ha = s.beta1 >= 0 ? x[s.beta0] + beta1 * g.dt : home_advantage(x, s, g);
            double r = g.y - (x[g.home] - x[g.away] + g.h * ha);
            sum_sq += r * r;
            if (grad == nullptr) continue;
            double w = r * inv_var;
            grad[g.home] += w;
            grad[g.away] -= w;
            if (g.h == 0.0) continue;
            switch (spec_.family) {
            case ModelFamily::Constant:
                grad[s.alpha] += w;
                break;
            case ModelFamily::Linear:
            case ModelFamily::HierarchicalLinear:
                grad[s.beta0] += w;
                beta1_grad += w * g.dt;
                break;
            case ModelFamily::TimeVarying:
                grad[static_cast<std::size_t>(s.gamma) + g.season_slot] += w;
                break;
            }
        }
        const double n = static_cast<double>(s.games.size());
        acc.lp += -n * (kLogSqrt2Pi + std::log(sigma)) - 0.5 * sum_sq * inv_var;
        acc.add(s.sigma, -n + sum_sq * inv_var);
        if (noncentered) {
            acc.add(s.beta1, beta1_grad * beta1_sd);
            acc.add(s.beta1_location, beta1_grad);
            acc.add(s.beta1_scale, beta1_grad * beta1_sd * x[s.beta1]);
        } else {
            acc.add(s.beta1, beta1_grad);
        }

        // Team strengths.
        for (std::size_t i = 0; i < s.n_theta; ++i)
            acc.normal(x[s.theta + i], static_cast<long>(s.theta + i), 0.0, -1, zeta, s.zeta);

        // Home-advantage priors.
        switch (spec_.family) {
        case ModelFamily::Constant: {
            double eta = scale_or(x, s.eta, fixed.ha_scale);
            acc.normal(x[s.alpha], s.alpha, 0.0, -1, eta, s.eta);
            if (s.eta >= 0) acc.half_normal_log(x[s.eta], s.eta, hyper);
            break;
        }
        case ModelFamily::Linear: {
            double lambda0 = scale_or(x, s.lambda0, fixed.ha_scale);
            double lambda1 = scale_or(x, s.lambda1, fixed.ha_scale);
            acc.normal(x[s.beta0], s.beta0, 0.0, -1, lambda0, s.lambda0);
            if (noncentered)
                acc.normal(x[s.beta1], s.beta1, 0.0, -1, 1.0, -1);
            else
                acc.normal(x[s.beta1], s.beta1, 0.0, -1, lambda1, s.lambda1);
            if (s.lambda0 >= 0) acc.half_normal_log(x[s.lambda0], s.lambda0, hyper);
            if (s.lambda1 >= 0) acc.half_normal_log(x[s.lambda1], s.lambda1, hyper);
            break;
        }
        case ModelFamily::TimeVarying: {
            double tau = scale_or(x, s.tau, fixed.ha_scale);
            for (std::size_t t = 0; t < s.n_gamma; ++t)
                acc.normal(x[s.gamma + t], s.gamma + static_cast<long>(t), 0.0, -1, tau, s.tau);
            if (s.tau >= 0) acc.half_normal_log(x[s.tau], s.tau, hyper);
            break;
        }
        case ModelFamily::HierarchicalLinear: {
            double lambda0 = scale_or(x, s.lambda0, fixed.ha_scale);
            acc.normal(x[s.beta0], s.beta0, 0.0, -1, lambda0, s.lambda0);
            if (noncentered)
                acc.normal(x[s.beta1], s.beta1, 0.0, -1, 1.0, -1);
            else
                acc.normal(x[s.beta1], s.beta1, beta1_star, beta1_star_, lambda1_shared, lambda1_shared_);
            if (s.lambda0 >= 0) acc.half_normal_log(x[s.lambda0], s.lambda0, hyper);
            break;
        }
        }

        if (s.zeta >= 0) acc.half_normal_log(x[s.zeta], s.zeta, hyper);
        if (s.sigma >= 0) acc.half_normal_log(x[s.sigma], s.sigma, hyper);
    }

    if (beta1_star_ >= 0) acc.normal(beta1_star, beta1_star_, 0.0, -1, hyper, -1);
    if (lambda1_shared_ >= 0) acc.half_normal_log(x[lambda1_shared_], lambda1_shared_, hyper);
    return acc.lp;
}

double ModelContext::log_density(std::span<const double> x) const {
    check_input(x);
    return evaluate(x, nullptr);
}

double ModelContext::log_density_gradient(std::span<const double> x, std::span<double> grad) const {
    check_input(x);
    if (grad.size() != x.size()) throw std::invalid_argument("gradient buffer has wrong dimension");
    return evaluate(x, grad.data());
}

double ModelContext::mu(std::span<const double> constrained, std::size_t league, std::size_t game) const {
    const auto& s = slots_.at(league);
    const auto& g = s.games.at(game);
    return constrained[g.home] - constrained[g.away] + g.h * home_advantage(constrained, s, g);
}

void ModelContext::pointwise_loglik(std::span<const double> constrained, std::span<double> out) const {
    if (constrained.size() != layout_.dimension()) throw std::invalid_argument("draw does not conform to layout");
    if (out.size() != num_games_) throw std::invalid_argument("output buffer has wrong length");
    const FixedScales fixed = spec_.fixed_scales.value_or(FixedScales{});
    std::size_t row = 0;
    for (const auto& s : slots_) {
        double sigma = s.sigma >= 0 ? constrained[static_cast<std::size_t>(s.sigma)] : fixed.sigma;
        double log_norm = -kLogSqrt2Pi - std::log(sigma);
        for (const auto& g : s.games) {
            double r = (g.y - (constrained[g.home] - constrained[g.away] + g.h * home_advantage(constrained, s, g))) / sigma;
            out[row++] = log_norm - 0.5 * r * r;
        }
    }
}

double log_posterior(const ModelContext& ctx, std::span<const double> x) { return ctx.log_density(x); }

std::vector<double> grad_log_posterior(const ModelContext& ctx, std::span<const double> x) {
    std::vector<double> grad(x.size());
    ctx.log_density_gradient(x, grad);
    return grad;
}

double mu_for_game(const ModelContext& ctx, std::span<const double> constrained, std::size_t league,
                   std::size_t game) {
    return ctx.mu(constrained, league, game);
}

Matrix pointwise_loglik(const ModelContext& ctx, const std::vector<Matrix>& chains) {
    std::size_t m = 0;
    for (const auto& c : chains) {
        if (c.cols() != ctx.dimension()) throw std::invalid_argument("draws do not conform to layout");
        m += c.rows();
    }
    Matrix out(ctx.num_games(), m);
    std::vector<double> column(ctx.num_games());
    std::size_t s = 0;
    for (const auto& c : chains) {
        for (std::size_t r = 0; r < c.rows(); ++r, ++s) {
            auto values = constrain(c.row(r), ctx.layout());
            ctx.pointwise_loglik(values, column);
            for (std::size_t g = 0; g < column.size(); ++g) out(g, s) = column[g];
        }
    }
    return out;
}

} // namespace homeadv
