#include "homeadv/analysis.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace homeadv {

std::string format_fixed(double value, int digits) {
    if (std::isnan(value)) return "NA";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, value);
    std::string s = buf;
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

double quantile(std::span<const double> draws, double p) {
    if (draws.empty()) throw std::invalid_argument("quantile of empty sample");
    std::vector<double> sorted(draws.begin(), draws.end());
    std::sort(sorted.begin(), sorted.end());
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::pair<double, double> credible_interval(std::span<const double> draws, double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("credible level must be in (0, 1)");
    if (draws.size() < 2) throw std::invalid_argument("credible interval needs at least two draws");
    double tail = (1.0 - level) / 2.0;
    return {quantile(draws, tail), quantile(draws, 1.0 - tail)};
}

IntervalSummary summarize(std::span<const double> draws, double level) {
    auto [lo, hi] = credible_interval(draws, level);
    double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / static_cast<double>(draws.size());
    return {mean, lo, hi};
}

std::string format_interval(const IntervalSummary& s, int digits) {
    return format_fixed(s.mean, digits) + " (" + format_fixed(s.lower, digits) + ", " +
           format_fixed(s.upper, digits) + ")";
}

std::size_t league_position(const FitResult& fit, const std::string& league_id) {
    for (std::size_t k = 0; k < fit.leagues.size(); ++k)
        if (fit.leagues[k].league_id == league_id) return k;
    throw std::invalid_argument("fit has no league '" + league_id + "'");
}

std::vector<std::vector<double>> ha_draws_by_season(const FitResult& fit, std::size_t league) {
    const auto& info = fit.leagues.at(league);
    const int k = static_cast<int>(league);
    std::vector<std::vector<double>> out;
    switch (fit.spec.family) {
    case ModelFamily::Constant: {
        auto alpha = fit.constrained_draws(BlockKind::Alpha, k);
        out.assign(info.seasons.size(), alpha);
        break;
    }
    case ModelFamily::Linear:
    case ModelFamily::HierarchicalLinear: {
        auto beta0 = fit.constrained_draws(BlockKind::Beta0, k);
        auto beta1 = fit.constrained_draws(BlockKind::Beta1, k);
        for (int season : info.seasons) {
            double dt = static_cast<double>(season - info.t0);
            std::vector<double> ha(beta0.size());
            for (std::size_t s = 0; s < ha.size(); ++s) ha[s] = beta0[s] + beta1[s] * dt;
            out.push_back(std::move(ha));
        }
        break;
    }
    case ModelFamily::TimeVarying:
        for (std::size_t t = 0; t < info.seasons.size(); ++t)
            out.push_back(fit.constrained_draws(BlockKind::Gamma, k, t));
        break;
    }
    return out;
}

HaTrajectory ha_trajectory(const FitResult& fit, std::size_t league, double level) {
    HaTrajectory traj;
    traj.league_id = fit.leagues.at(league).league_id;
    traj.family = fit.spec.family;
    switch (fit.spec.family) {
    case ModelFamily::Constant: traj.estimator = "alpha"; break;
    case ModelFamily::Linear:
    case ModelFamily::HierarchicalLinear: traj.estimator = "beta0+beta1*(t-t0)"; break;
    case ModelFamily::TimeVarying: traj.estimator = "gamma"; break;
    }
    auto draws = ha_draws_by_season(fit, league);
    const auto& seasons = fit.leagues[league].seasons;
    for (std::size_t t = 0; t < seasons.size(); ++t) traj.points.push_back({seasons[t], summarize(draws[t], level)});
    return traj;
}

TrendSummary trend_summary(std::span<const double> beta1_draws, double level) {
    TrendSummary t;
    t.draws = beta1_draws.size();
    t.beta1 = summarize(beta1_draws, level);
    std::size_t neg = 0;
    std::size_t pos = 0;
    for (double v : beta1_draws) {
        if (v < 0.0) ++neg;
        else if (v > 0.0) ++pos;
        else ++t.zero_draws;
    }
    t.p_negative = static_cast<double>(neg) / static_cast<double>(t.draws);
    t.p_positive = static_cast<double>(pos) / static_cast<double>(t.draws);
    return t;
}

TrendSummary prob_decline(const FitResult& fit, std::size_t league, double level) {
    if (fit.spec.family != ModelFamily::Linear && fit.spec.family != ModelFamily::HierarchicalLinear)
        throw std::invalid_argument("probability of decline needs a linear-trend model");
    return trend_summary(fit.constrained_draws(BlockKind::Beta1, static_cast<int>(league)), level);
}

std::string format_trend(const TrendSummary& t) {
    return "β̂₁ = " + format_fixed(t.beta1.mean, 3) + ", P(β₁<0) = " + format_fixed(t.p_negative, 3);
}

std::map<LeagueSeason, double> standardize_gamma(const std::map<LeagueSeason, double>& gamma_means) {
    if (gamma_means.size() < 2) throw std::invalid_argument("standardization needs at least two estimates");
    const double n = static_cast<double>(gamma_means.size());
    double mean = 0.0;
    for (const auto& [key, v] : gamma_means) mean += v;
    mean /= n;
    double ss = 0.0;
    for (const auto& [key, v] : gamma_means) ss += (v - mean) * (v - mean);
    double sd = std::sqrt(ss / (n - 1.0));
    if (!(sd > 0.0)) throw std::invalid_argument("standardization undefined: zero variance");
    std::map<LeagueSeason, double> z;
    for (const auto& [key, v] : gamma_means) z[key] = (v - mean) / sd;
    return z;
}

std::vector<ShrinkageRow> shrinkage_report(const std::vector<const FitResult*>& separate_fits,
                                           const FitResult& joint_fit) {
    if (joint_fit.spec.family != ModelFamily::HierarchicalLinear)
        throw std::invalid_argument("joint fit must be hierarchical");

    std::set<std::string> joint_leagues;
    for (const auto& l : joint_fit.leagues) joint_leagues.insert(l.league_id);
    std::set<std::string> separate_leagues;
    for (const auto* fit : separate_fits) {
        if (fit->spec.family != ModelFamily::Linear) throw std::invalid_argument("separate fits must be linear");
        for (const auto& l : fit->leagues)
            if (!separate_leagues.insert(l.league_id).second)
                throw std::invalid_argument("league '" + l.league_id + "' appears in more than one separate fit");
    }
    if (joint_leagues != separate_leagues) throw std::invalid_argument("league mismatch between separate and joint fits");

    auto mean = [](const std::vector<double>& x) {
        return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    };
    double beta1_star = mean(joint_fit.constrained_draws(BlockKind::Beta1Star, -1));
    double lambda1 = joint_fit.layout.find(BlockKind::Lambda1, -1)
                         ? mean(joint_fit.constrained_draws(BlockKind::Lambda1, -1))
                         : joint_fit.spec.fixed_scales.value_or(FixedScales{}).ha_scale;

    std::vector<ShrinkageRow> rows;
    for (std::size_t k = 0; k < joint_fit.leagues.size(); ++k) {
        const auto& id = joint_fit.leagues[k].league_id;
        const FitResult* separate = nullptr;
        for (const auto* fit : separate_fits)
            for (const auto& l : fit->leagues)
                if (l.league_id == id) separate = fit;
        auto sep = prob_decline(*separate, league_position(*separate, id));
        auto joint = prob_decline(joint_fit, k);
        rows.push_back({id, sep.beta1.mean, joint.beta1.mean, beta1_star, lambda1, joint.beta1.mean - sep.beta1.mean,
                        sep.p_positive, joint.p_positive});
    }
    return rows;
}

std::string shrinkage_table(const std::vector<ShrinkageRow>& rows) {
    std::ostringstream out;
    out << "league,separate_beta1,joint_beta1,beta1_star,lambda1,shift,p_positive_separate,p_positive_joint\n";
    for (const auto& r : rows)
        out << r.league_id << ',' << format_fixed(r.separate_beta1, 4) << ',' << format_fixed(r.joint_beta1, 4) << ','
            << format_fixed(r.beta1_star, 4) << ',' << format_fixed(r.lambda1, 4) << ',' << format_fixed(r.shift, 4)
            << ',' << format_fixed(r.p_positive_separate, 3) << ',' << format_fixed(r.p_positive_joint, 3) << '\n';
    return out.str();
}

} // namespace homeadv
