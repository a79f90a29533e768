#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homeadv/sampler.h"

namespace homeadv {

// Fixed-point text with `digits` decimals; values that round to zero print
// without a sign.
std::string format_fixed(double value, int digits);

// Equal-tailed interval from linearly interpolated empirical quantiles.
std::pair<double, double> credible_interval(std::span<const double> draws, double level = 0.95);

// Linearly interpolated empirical quantile (order statistics at (n - 1) p).
double quantile(std::span<const double> draws, double p);

struct IntervalSummary {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

IntervalSummary summarize(std::span<const double> draws, double level = 0.95);

// "1.73 (1.07, 2.39)"
std::string format_interval(const IntervalSummary& s, int digits = 2);

struct HaPoint {
    int season = 0;
    IntervalSummary summary;
};

struct HaTrajectory {
    std::string league_id;
    ModelFamily family = ModelFamily::Constant;
    std::string estimator;   // "alpha", "beta0+beta1*(t-t0)" or "gamma"
    std::vector<HaPoint> points;
};

// Per-draw home advantage at every observed season of `league`.
std::vector<std::vector<double>> ha_draws_by_season(const FitResult& fit, std::size_t league);

HaTrajectory ha_trajectory(const FitResult& fit, std::size_t league, double level = 0.95);

struct TrendSummary {
    IntervalSummary beta1;
    double p_negative = 0.0;
    double p_positive = 0.0;
    std::size_t zero_draws = 0;   // excluded from both tails
    std::size_t draws = 0;
};

TrendSummary trend_summary(std::span<const double> beta1_draws, double level = 0.95);

// Linear or HierarchicalLinear fits only.
TrendSummary prob_decline(const FitResult& fit, std::size_t league, double level = 0.95);

// "β̂₁ = -0.032, P(β₁<0) = 0.857"
std::string format_trend(const TrendSummary& t);

using LeagueSeason = std::pair<std::string, int>;

// z-scores of posterior means against their grand mean and sample sd.
std::map<LeagueSeason, double> standardize_gamma(const std::map<LeagueSeason, double>& gamma_means);

struct ShrinkageRow {
    std::string league_id;
    double separate_beta1 = 0.0;
    double joint_beta1 = 0.0;
    double beta1_star = 0.0;
    double lambda1 = 0.0;
    double shift = 0.0;                 // joint minus separate
    double p_positive_separate = 0.0;
    double p_positive_joint = 0.0;
};

std::vector<ShrinkageRow> shrinkage_report(const std::vector<const FitResult*>& separate_fits,
                                           const FitResult& joint_fit);

std::string shrinkage_table(const std::vector<ShrinkageRow>& rows);

// Index of `league_id` within the fit's leagues.
std::size_t league_position(const FitResult& fit, const std::string& league_id);

} // namespace homeadv
