#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "homeadv/matrix.h"

namespace homeadv {

struct LooResult {
    double elpd_loo = 0.0;
    double se = 0.0;
    std::vector<double> pointwise;
    // Tail shape per observation; NaN where no tail could be fitted (too
    // few draws, or a constant tail).
    std::vector<double> pareto_k;
    // True when draws were too few for tail smoothing and plain importance
    // sampling was used.
    bool unsmoothed = false;

    std::size_t num_high_k(double threshold = 0.7) const;
};

struct GpdFit {
    double k = 0.0;
    double sigma = 0.0;
};

// Generalized Pareto fit to ascending positive excesses (Zhang-Stephens
// profile estimate with the weak prior pulling k toward 0.5). Needs >= 5
// points that are not all equal.
GpdFit fit_gpd_tail(std::span<const double> sorted_excesses);

struct PsisWeights {
    std::vector<double> log_weights;   // normalized to sum to one
    double pareto_k = 0.0;
    bool smoothed = false;
};

// Pareto-smoothed importance weights for raw log ratios.
PsisWeights psis_smooth(std::span<const double> log_ratios);

// Rows are observations, columns posterior draws.
LooResult psis_loo(const Matrix& loglik);

struct ElpdRow {
    std::string tag;
    double elpd = 0.0;
    double delta = 0.0;
    double se = 0.0;
    double num_se = 0.0;
};

struct ElpdComparison {
    std::vector<ElpdRow> rows;   // input order
    std::size_t best = 0;

    const ElpdRow& best_row() const { return rows.at(best); }
};

// Ties for the best ELPD go to the earlier tag.
ElpdComparison compare(const std::vector<std::pair<std::string, LooResult>>& loos);

// Delimited comparison table: tag, delta_elpd, se, num_se, beyond_4se.
std::string comparison_table(const ElpdComparison& comparison);

} // namespace homeadv
