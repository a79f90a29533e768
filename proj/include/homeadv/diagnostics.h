#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "homeadv/matrix.h"
#include "homeadv/model.h"

namespace homeadv {

using Chains = std::vector<std::vector<double>>;

// Split potential scale reduction. Needs >= 2 chains of equal length >= 4;
// odd lengths drop their first draw. Returns NaN when every half-chain has
// zero variance.
double split_rhat(const Chains& chains);

// Effective sample size from variogram autocorrelations of the split chains,
// truncated by Geyer's initial monotone positive-pair rule. NaN on zero variance.
double ess(const Chains& chains);

struct ParameterDiagnostic {
    std::string name;
    double rhat = 0.0;
    double ess = 0.0;
};

// Vector blocks (theta, gamma) summarize with min/max R-hat and mean ESS;
// scalar blocks carry their single values.
struct BlockDiagnostic {
    BlockKind kind = BlockKind::Theta;
    int league = -1;
    std::size_t size = 0;
    double min_rhat = 0.0;
    double max_rhat = 0.0;
    double mean_ess = 0.0;
};

struct DiagnosticsSummary {
    std::vector<ParameterDiagnostic> parameters;
    std::vector<BlockDiagnostic> blocks;
    std::size_t divergences = 0;
    double min_rhat = 0.0;
    double max_rhat = 0.0;
};

// `constrained_chains` holds one (draws x dimension) matrix per chain.
DiagnosticsSummary summarize_diagnostics(const std::vector<Matrix>& constrained_chains,
                                         const ParameterLayout& layout, std::size_t divergences);

// Delimited table: one row per league with min/max R-hat and one ESS column
// per block (mean ESS for vector blocks). Shared blocks repeat on every row.
std::string diagnostics_table(const DiagnosticsSummary& summary, const ParameterLayout& layout);

} // namespace homeadv
