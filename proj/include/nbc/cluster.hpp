#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nbc/nb_engine.hpp"
#include "nbc/sbm.hpp"

// The weighted non-backtracking clustering algorithm: remove a random
// sqrt(n)-set, anchor at a removed vertex of moderate degree, and for each
// vertex read the sign of the path-weight statistic from the anchor's
// neighborhood to the vertex's radius-R sphere, computed on per-round
// random induced subgraphs. cluster_simple() is the high-signal variant
// with R = 0 and no dither.

namespace nbc {

struct AlgoParams {
    double alpha = 0.0;     // path-length exponent, k = ceil(alpha ln n)
    int k = 0;
    int R = 2;              // sphere radius, even
    double delta = 0.0;     // removal fraction, delta = delta'/2
    double s_prime = 0.0;   // s (1 - delta)
    double d_prime = 0.0;   // d (1 - delta)
    double kappa = 0.0;     // dither constant
    int ell = 2;            // tangle radius, diagnostics only
    int anchor_degree = 2;  // target |S*|
    int rounds = 0;         // removal rounds
    Normalize normalize = Normalize::Auto;
};

struct DeriveOptions {
    int64_t min_n = 1000;
    double alpha_safety = 1.05;
    std::optional<double> kappa_override;
    std::optional<int> rounds_override;
    std::optional<int> r_override;
    int64_t calibration_samples = 20000;
    uint64_t calibration_seed = 0xCA11B;
};

// Closed forms: 1 - delta' = d/s^2, delta = delta'/2, alpha =
// safety * 2 / ln(s^2/d), R = max(2, 2 ceil(ln ln ln ln n)), kappa from
// branching calibration at (d', s', R) unless overridden. Requires
// s^2 > d strictly and n >= min_n.
AlgoParams derive_params(const SbmParams& params, const DeriveOptions& options = {});

struct AnchorChoice {
    int32_t w_star = -1;          // chosen removed vertex (original index)
    std::vector<int32_t> s_star;  // its neighbors inside the kept set
};

// w* in removed minimizing |deg_kept(w) - target|, ties to the lowest
// index; S* = neighbors of w* among kept vertices.
AnchorChoice choose_anchor(const LabelledGraph& g, std::span<const int32_t> removed,
                           std::span<const uint8_t> kept_mask, int target);

struct ClusterDiagnostics {
    int anchor_size = 0;
    int32_t anchor_vertex = -1;
    int64_t jv_zero_count = 0;       // vertices that never met the round condition
    int64_t tie_count = 0;           // tau_{J_v,v} == 0 fallthroughs
    int rounds_executed = 0;
    int rounds_with_batches = 0;
    std::vector<float> round_seconds;  // per executed round
    double min_step_gain = std::numeric_limits<double>::infinity();
    bool scale_headroom_low = false; // min_step_gain < 1e-6
    bool empty_statistic = false;    // |S*| == 0
    double engine_seconds = 0.0;
    double total_seconds = 0.0;
};

struct ClusterResult {
    std::vector<int8_t> tau;
    ClusterDiagnostics diagnostics;
};

// The full algorithm. The graph's labels, if any, are ignored.
// Deterministic given the seed.
ClusterResult cluster(const LabelledGraph& g, const SbmParams& params, const AlgoParams& algo,
                      uint64_t seed);

// Simplified variant: R = 0, kappa = 0, S_v = {v}.
ClusterResult cluster_simple(const LabelledGraph& g, const SbmParams& params,
                             const AlgoParams& algo, uint64_t seed);

}  // namespace nbc
