#include "homeadv/loo.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "homeadv/analysis.h"

namespace homeadv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> x) {
    double m = *std::max_element(x.begin(), x.end());
    if (m == -kInf) return -kInf;
    double s = 0.0;
    for (double v : x) s += std::exp(v - m);
    return m + std::log(s);
}

// GPD quantile function.
double gpd_quantile(double p, double k, double sigma) {
    if (std::abs(k) < 1e-12) return -sigma * std::log1p(-p);
    return sigma * std::expm1(-k * std::log1p(-p)) / k;
}

double sd_sum(const std::vector<double>& x) {
    const auto n = static_cast<double>(x.size());
    if (x.size() < 2) return 0.0;
    double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(n * ss / (n - 1.0));
}

} // namespace

std::size_t LooResult::num_high_k(double threshold) const {
    return static_cast<std::size_t>(
        std::count_if(pareto_k.begin(), pareto_k.end(), [&](double k) { return k > threshold; }));
}

GpdFit fit_gpd_tail(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 5) throw std::invalid_argument("GPD tail fit needs at least 5 excesses");
    if (!std::is_sorted(x.begin(), x.end())) throw std::invalid_argument("excesses must be sorted ascending");
    if (x.front() < 0.0) throw std::invalid_argument("excesses must be non-negative");
    if (x.back() - x.front() <= 0.0) throw std::invalid_argument("degenerate tail: all excesses equal");

    const double prior = 3.0;
    const std::size_t grid = 30 + static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    const double nd = static_cast<double>(n);
    const double xstar = x[static_cast<std::size_t>(std::floor(nd / 4.0 + 0.5)) - 1];

    std::vector<double> theta(grid);
    std::vector<double> profile(grid);
    for (std::size_t j = 0; j < grid; ++j) {
        double jj = static_cast<double>(j + 1);
        theta[j] = 1.0 / x[n - 1] + (1.0 - std::sqrt(static_cast<double>(grid) / (jj - 0.5))) / prior / xstar;
        double a = -theta[j];
        double k = 0.0;
        for (double v : x) k += std::log1p(a * v);
        k /= nd;
        profile[j] = nd * (std::log(a / k) - k - 1.0);
    }
    double norm = log_sum_exp(profile);
    double theta_hat = 0.0;
    for (std::size_t j = 0; j < grid; ++j) theta_hat += theta[j] * std::exp(profile[j] - norm);

    double k = 0.0;
    for (double v : x) k += std::log1p(-theta_hat * v);
    k /= nd;
    double sigma = -k / theta_hat;
    // Weakly informative prior shrinking k toward 0.5.
    k = (nd * k + 5.0) / (nd + 10.0);
    if (std::isnan(k)) k = kInf;
    return {k, sigma};
}

PsisWeights psis_smooth(std::span<const double> log_ratios) {
    const std::size_t s = log_ratios.size();
    if (s == 0) throw std::invalid_argument("no draws");
    const double max_ratio = *std::max_element(log_ratios.begin(), log_ratios.end());
    std::vector<double> lw(s);
    for (std::size_t i = 0; i < s; ++i) lw[i] = log_ratios[i] - max_ratio;

    PsisWeights out;
    out.pareto_k = kNaN;
    const double sd = static_cast<double>(s);
    const auto tail_len = static_cast<std::size_t>(std::ceil(std::min(0.2 * sd, 3.0 * std::sqrt(sd))));

    if (tail_len >= 5 && tail_len < s) {
        std::vector<std::size_t> order(s);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lw[a] < lw[b]; });
        const std::size_t first_tail = s - tail_len;
        std::vector<double> tail(tail_len);
        for (std::size_t i = 0; i < tail_len; ++i) tail[i] = lw[order[first_tail + i]];
        out.smoothed = true;

        if (std::abs(tail.back() - tail.front()) >= std::numeric_limits<double>::epsilon() / 100.0) {
            const double cutoff = lw[order[first_tail - 1]];
            const double exp_cutoff = std::exp(cutoff);
            std::vector<double> excess(tail_len);
            for (std::size_t i = 0; i < tail_len; ++i) excess[i] = std::max(0.0, std::exp(tail[i]) - exp_cutoff);
            auto fit = fit_gpd_tail(excess);
            out.pareto_k = fit.k;
            if (std::isfinite(fit.k)) {
                for (std::size_t i = 0; i < tail_len; ++i) {
                    double p = (static_cast<double>(i) + 0.5) / static_cast<double>(tail_len);
                    lw[order[first_tail + i]] = std::log(gpd_quantile(p, fit.k, fit.sigma) + exp_cutoff);
                }
            }
        }
    }
    for (auto& v : lw) v = std::min(v, 0.0);
    double norm = log_sum_exp(lw);
    for (auto& v : lw) v -= norm;
    out.log_weights = std::move(lw);
    return out;
}

LooResult psis_loo(const Matrix& loglik) {
    const std::size_t n = loglik.rows();
    const std::size_t m = loglik.cols();
    if (n == 0 || m == 0) throw std::invalid_argument("log-likelihood matrix is empty");
    for (double v : loglik.data())
        if (!std::isfinite(v)) throw std::invalid_argument("log-likelihood matrix has non-finite entries");

    LooResult result;
    result.pointwise.resize(n);
    result.pareto_k.resize(n);
    std::vector<double> ratios(m);
    std::vector<double> terms(m);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = loglik.row(i);
        for (std::size_t s = 0; s < m; ++s) ratios[s] = -row[s];
        auto w = psis_smooth(ratios);
        if (!w.smoothed) result.unsmoothed = true;
        for (std::size_t s = 0; s < m; ++s) terms[s] = w.log_weights[s] + row[s];
        result.pointwise[i] = log_sum_exp(terms);
        result.pareto_k[i] = w.pareto_k;
    }
    result.elpd_loo = std::accumulate(result.pointwise.begin(), result.pointwise.end(), 0.0);
    result.se = sd_sum(result.pointwise);
    return result;
}

ElpdComparison compare(const std::vector<std::pair<std::string, LooResult>>& loos) {
    if (loos.empty()) throw std::invalid_argument("nothing to compare");
    const std::size_t n = loos.front().second.pointwise.size();
    for (const auto& [tag, loo] : loos)
        if (loo.pointwise.size() != n)
            throw std::invalid_argument("model '" + tag + "' has " + std::to_string(loo.pointwise.size()) +
                                        " observations, expected " + std::to_string(n));

    ElpdComparison out;
    for (std::size_t i = 1; i < loos.size(); ++i)
        if (loos[i].second.elpd_loo > loos[out.best].second.elpd_loo) out.best = i;

    const auto& best = loos[out.best].second;
    for (const auto& [tag, loo] : loos) {
        ElpdRow row{tag, loo.elpd_loo, loo.elpd_loo - best.elpd_loo, 0.0, 0.0};
        std::vector<double> diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = loo.pointwise[i] - best.pointwise[i];
        row.se = sd_sum(diff);
        if (row.se > 0.0)
            row.num_se = std::abs(row.delta) / row.se;
        else
            row.num_se = row.delta == 0.0 ? 0.0 : kInf;
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string comparison_table(const ElpdComparison& comparison) {
    std::ostringstream out;
    out << "model,delta_elpd,se,num_se,best,beyond_4se\n";
    for (std::size_t i = 0; i < comparison.rows.size(); ++i) {
        const auto& r = comparison.rows[i];
        bool best = i == comparison.best;
        out << r.tag << ',' << format_fixed(best ? 0.0 : r.delta, 2) << ',' << format_fixed(best ? 0.0 : r.se, 2)
            << ',' << format_fixed(best ? 0.0 : r.num_se, 2) << ',' << (best ? "true" : "false") << ','
            << (r.num_se > 4.0 ? "true" : "false") << '\n';
    }
    return out.str();
}

} // namespace homeadv
