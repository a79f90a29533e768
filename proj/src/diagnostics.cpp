#include "homeadv/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace homeadv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Half-chains of the inputs; odd-length chains lose their first draw.
Chains split_chains(const Chains& chains) {
    if (chains.size() < 2) throw std::invalid_argument("need at least two chains");
    const std::size_t len = chains.front().size();
    for (const auto& c : chains)
        if (c.size() != len) throw std::invalid_argument("chains must have equal length");
    if (len < 4) throw std::invalid_argument("chains need at least four draws");
    const std::size_t skip = len % 2;
    const std::size_t half = (len - skip) / 2;
    Chains out;
    out.reserve(2 * chains.size());
    for (const auto& c : chains) {
        out.emplace_back(c.begin() + static_cast<long>(skip), c.begin() + static_cast<long>(skip + half));
        out.emplace_back(c.begin() + static_cast<long>(skip + half), c.end());
    }
    return out;
}

double mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

struct VarianceParts {
    double within;   // W
    double between;  // B
    std::size_t n;   // draws per sequence
};

VarianceParts variance_parts(const Chains& seqs) {
    std::vector<double> means;
    std::vector<double> vars;
    for (const auto& s : seqs) {
        means.push_back(mean(s));
        vars.push_back(sample_variance(s));
    }
    std::size_t n = seqs.front().size();
    return {mean(vars), static_cast<double>(n) * sample_variance(means), n};
}

} // namespace

double split_rhat(const Chains& chains) {
    auto seqs = split_chains(chains);
    auto [w, b, n] = variance_parts(seqs);
    if (w == 0.0) return kNaN;
    double nd = static_cast<double>(n);
    return std::sqrt(((nd - 1.0) / nd * w + b / nd) / w);
}

double ess(const Chains& chains) {
    auto seqs = split_chains(chains);
    auto [w, b, n] = variance_parts(seqs);
    const double nd = static_cast<double>(n);
    const double var_plus = (nd - 1.0) / nd * w + b / nd;
    if (w == 0.0 || var_plus == 0.0) return kNaN;
    const double m = static_cast<double>(seqs.size());

    auto rho = [&](std::size_t t) {
        double v = 0.0;
        for (const auto& s : seqs)
            for (std::size_t i = t; i < n; ++i) {
                double d = s[i] - s[i - t];
                v += d * d;
            }
        v /= m * static_cast<double>(n - t);
        return 1.0 - v / (2.0 * var_plus);
    };

    // Sum of initial positive, monotonically decreasing pair sums.
    double pair_sum_total = 0.0;
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t + 1 < n; t += 2) {
        double pair = (t == 0 ? 1.0 : rho(t)) + rho(t + 1);
        if (!(pair > 0.0)) break;
        pair = std::min(pair, previous);
        pair_sum_total += pair;
        previous = pair;
    }
    double tau = -1.0 + 2.0 * pair_sum_total;
    return m * nd / tau;
}

DiagnosticsSummary summarize_diagnostics(const std::vector<Matrix>& constrained_chains,
                                         const ParameterLayout& layout, std::size_t divergences) {
    DiagnosticsSummary summary;
    summary.divergences = divergences;
    auto names = layout.column_names();
    const bool usable = constrained_chains.size() >= 2 && constrained_chains.front().rows() >= 4;

    for (std::size_t j = 0; j < layout.dimension(); ++j) {
        ParameterDiagnostic d{names[j], kNaN, kNaN};
        if (usable) {
            Chains chains;
            for (const auto& c : constrained_chains) chains.push_back(c.column(j));
            d.rhat = split_rhat(chains);
            d.ess = ess(chains);
        }
        summary.parameters.push_back(std::move(d));
    }

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& b : layout.blocks()) {
        BlockDiagnostic bd{b.kind, b.league, b.size, std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity(), 0.0};
        std::size_t finite_ess = 0;
        for (std::size_t j = b.offset; j < b.offset + b.size; ++j) {
            const auto& p = summary.parameters[j];
            if (!std::isnan(p.rhat)) {
                bd.min_rhat = std::min(bd.min_rhat, p.rhat);
                bd.max_rhat = std::max(bd.max_rhat, p.rhat);
            }
            if (!std::isnan(p.ess)) {
                bd.mean_ess += p.ess;
                ++finite_ess;
            }
        }
        bd.mean_ess = finite_ess > 0 ? bd.mean_ess / static_cast<double>(finite_ess) : kNaN;
        if (bd.min_rhat > bd.max_rhat) bd.min_rhat = bd.max_rhat = kNaN;
        if (!std::isnan(bd.min_rhat)) {
            lo = std::min(lo, bd.min_rhat);
            hi = std::max(hi, bd.max_rhat);
        }
        summary.blocks.push_back(bd);
    }
    summary.min_rhat = lo <= hi ? lo : kNaN;
    summary.max_rhat = lo <= hi ? hi : kNaN;
    return summary;
}

std::string diagnostics_table(const DiagnosticsSummary& summary, const ParameterLayout& layout) {
    // Column order follows the conventional HA blocks first, then sigma, zeta, theta.
    static constexpr BlockKind kOrder[] = {BlockKind::Alpha,   BlockKind::Eta,     BlockKind::Beta0,
                                           BlockKind::Beta1,   BlockKind::Beta1Star, BlockKind::Lambda0,
                                           BlockKind::Lambda1, BlockKind::Gamma,   BlockKind::Tau,
                                           BlockKind::Sigma,   BlockKind::Zeta,    BlockKind::Theta};
    std::vector<BlockKind> columns;
    for (auto kind : kOrder)
        if (std::any_of(layout.blocks().begin(), layout.blocks().end(),
                        [&](const ParameterBlock& b) { return b.kind == kind; }))
            columns.push_back(kind);

    auto fmt = [](double v, int precision) {
        if (std::isnan(v)) return std::string("NA");
        std::ostringstream os;
        os.setf(std::ios::fixed);
        os.precision(precision);
        os << v;
        return os.str();
    };

    std::ostringstream out;
    out << "league,min_rhat,max_rhat";
    for (auto kind : columns) out << ',' << block_name(kind);
    out << '\n';

    for (std::size_t k = 0; k < layout.leagues().size(); ++k) {
        int league = static_cast<int>(k);
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = 0; i < summary.blocks.size(); ++i) {
            const auto& b = summary.blocks[i];
            if ((b.league != league && b.league != -1) || std::isnan(b.min_rhat)) continue;
            lo = std::min(lo, b.min_rhat);
            hi = std::max(hi, b.max_rhat);
        }
        out << layout.leagues()[k] << ',' << fmt(lo <= hi ? lo : NAN, 2) << ',' << fmt(lo <= hi ? hi : NAN, 2);
        for (auto kind : columns) {
            double value = NAN;
            for (const auto& b : summary.blocks)
                if (b.kind == kind && (b.league == league || b.league == -1)) value = b.mean_ess;
            out << ',' << fmt(value, 0);
        }
        out << '\n';
    }
    return out.str();
}

} // namespace homeadv
