#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nbc/sbm.hpp"

// Fast evaluation of N^{(k)} z in O((m+n) k) time. N^{(k)} is the matrix of
// weighted non-backtracking path counts with step weight 1{edge} - offset,
// where offset is d/n of the weighting model (kept explicit so that induced
// subgraphs of a model can retain the original offset). The all-ones matrix
// is never materialized: 1x = (sum x) * ones.

namespace nbc {

enum class Normalize { Auto, On, Off };

// The four stacked vectors (Q^{(k,1-c)}z, Q^{(k-1,1-c)}z, Q^{(k,-c)}z,
// Q^{(k-1,-c)}z), where Q^{(k,rho)} = sum_j rho^{2j} N^{(k-2j)} and c is the
// edge offset. At level 0: q1 = q3 = z, q2 = q4 = 0. True values are the
// stored vectors times 2^scale_exp2; per-step renormalization uses powers
// of two only, so scaling is exact and sign patterns are identical with
// normalization on or off.
struct NbStack {
    std::vector<double> q1, q2, q3, q4;
    int level = 0;
    int64_t scale_exp2 = 0;
    // smallest single-step magnitude ratio seen; values far below 1 signal
    // catastrophic cancellation inside the recursion
    double min_step_gain = std::numeric_limits<double>::infinity();
};

NbStack make_level0_stack(std::span<const double> z);

// One multiplication by the 4n x 4n block operator; level increases by 1.
// With normalize set, all four blocks are rescaled by a common power of two.
void apply_m(const LabelledGraph& g, double offset, NbStack& stack, bool normalize);

// First block row of the hat operator: returns N^{(level+1)} z (times
// 2^stack.scale_exp2).
std::vector<double> apply_m_hat(const LabelledGraph& g, double offset, const NbStack& stack);

struct MatvecResult {
    std::vector<double> values;
    int64_t scale_exp2 = 0;
    double min_step_gain = std::numeric_limits<double>::infinity();
};

// N^{(k)} z. k = 0 returns z itself (N^{(0)} = I). Normalize::Auto turns
// per-step rescaling on for k > 20.
MatvecResult nb_matvec(const LabelledGraph& g, double offset, int k, std::span<const double> z,
                       Normalize normalize = Normalize::Auto);

struct PairStatistic {
    double value = 0.0;      // times 2^scale_exp2
    int64_t scale_exp2 = 0;
    double min_step_gain = std::numeric_limits<double>::infinity();
    bool empty = false;      // sources or targets were empty
};

// sum over targets of (N^{(k)} 1_sources)_t.
PairStatistic pair_statistic(const LabelledGraph& g, double offset,
                             std::span<const int32_t> sources, std::span<const int32_t> targets,
                             int k, Normalize normalize = Normalize::Auto);

}  // namespace nbc
