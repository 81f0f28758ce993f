#include "nbc/cluster.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nbc/branching.hpp"
#include "nbc/rng.hpp"

namespace nbc {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// first `count` entries of a partial Fisher-Yates shuffle of `pool`
std::vector<int32_t> sample_without_replacement(std::vector<int32_t>& pool, size_t count,
                                                Rng& rng) {
    if (count > pool.size())
        throw std::invalid_argument("sample_without_replacement: count exceeds pool");
    for (size_t i = 0; i < count; ++i) {
        const size_t j = i + static_cast<size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    return {pool.begin(), pool.begin() + static_cast<ptrdiff_t>(count)};
}

int sgn(double x) { return x > 0.0 ? 1 : x < 0.0 ? -1 : 0; }

struct Spheres {
    // per kept vertex: B_{R-1}(v) and S_v = B_R(v) \ B_{R-1}(v), in the
    // working graph's indices
    std::vector<std::vector<int32_t>> inner;
    std::vector<std::vector<int32_t>> sphere;
};

Spheres build_spheres(const LabelledGraph& g, int R) {
    Spheres sp;
    const auto n = static_cast<size_t>(g.n());
    sp.inner.resize(n);
    sp.sphere.resize(n);
    if (R == 0) {
        for (int32_t v = 0; v < g.n(); ++v) sp.sphere[v] = {v};  // B_0 \ B_{-1}
        return sp;
    }
    // timestamped BFS; one linear mark array shared across all vertices
    std::vector<int32_t> mark(n, -1);
    std::vector<int32_t> frontier, next;
    for (int32_t v = 0; v < g.n(); ++v) {
        frontier.assign(1, v);
        mark[v] = v;
        sp.inner[v].push_back(v);
        for (int depth = 1; depth <= R && !frontier.empty(); ++depth) {
            next.clear();
            for (int32_t u : frontier) {
                for (int32_t w : g.neighbors(u)) {
                    if (mark[w] != v) {
                        mark[w] = v;
                        next.push_back(w);
                        (depth <= R - 1 ? sp.inner[v] : sp.sphere[v]).push_back(w);
                    }
                }
            }
            std::swap(frontier, next);
        }
    }
    return sp;
}

ClusterResult run_pipeline(const LabelledGraph& g, const SbmParams& params,
                           const AlgoParams& algo, uint64_t seed, bool simple) {
    const auto t_start = std::chrono::steady_clock::now();
    params.validate();
    if (g.n() != params.n) throw std::invalid_argument("cluster: graph size != params.n");
    if (algo.k < 0 || algo.rounds <= 0 || algo.delta <= 0.0 || algo.delta >= 0.5)
        throw std::invalid_argument("cluster: inconsistent algorithm parameters");
    const int R = simple ? 0 : algo.R;
    if (!simple && (R < 2 || R % 2 != 0))
        throw std::invalid_argument("cluster: R must be even and >= 2");

    const int64_t n = g.n();
    const double offset = params.d() / static_cast<double>(n);
    ClusterResult result;
    result.tau.assign(static_cast<size_t>(n), 0);
    ClusterDiagnostics& diag = result.diagnostics;

    // step 1: remove ceil(sqrt n) random vertices, keep G' = G[V']
    const auto sqrt_n = static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<int32_t> all(static_cast<size_t>(n));
    for (int64_t v = 0; v < n; ++v) all[v] = static_cast<int32_t>(v);
    Rng removal_rng(seed, 1);
    const std::vector<int32_t> removed = sample_without_replacement(all, sqrt_n, removal_rng);
    std::vector<uint8_t> kept_mask(static_cast<size_t>(n), 1);
    for (int32_t v : removed) kept_mask[v] = 0;

    // step 2: anchor w* in V'' with degree into V' closest to the target
    const AnchorChoice anchor = choose_anchor(g, removed, kept_mask, algo.anchor_degree);
    diag.anchor_vertex = anchor.w_star;
    diag.anchor_size = static_cast<int>(anchor.s_star.size());
    diag.empty_statistic = anchor.s_star.empty();

    std::vector<int32_t> kept;
    kept.reserve(static_cast<size_t>(n) - sqrt_n);
    for (int64_t v = 0; v < n; ++v)
        if (kept_mask[v]) kept.push_back(static_cast<int32_t>(v));
    const InducedSubgraph gp = induced_subgraph(g, kept);
    const auto np = gp.graph.n();

    std::vector<int32_t> s_star;  // anchor neighbors in G' indices
    for (int32_t v : anchor.s_star) s_star.push_back(gp.from_original[v]);
    std::sort(s_star.begin(), s_star.end());
    std::vector<uint8_t> in_s_star(static_cast<size_t>(np), 0);
    for (int32_t v : s_star) in_s_star[v] = 1;

    // step 3: spheres in G'
    const Spheres spheres = build_spheres(gp.graph, R);

    // dither scale, shared by every round
    const double dither_scale =
        simple ? 0.0
               : algo.kappa * std::pow(std::abs(algo.s_prime), algo.k + R + 1) /
                     (algo.d_prime * static_cast<double>(n)) *
                     static_cast<double>(s_star.size());

    const auto u_size_raw = static_cast<int64_t>(
        std::ceil(static_cast<double>(n) * algo.delta) - static_cast<double>(sqrt_n));
    const auto pool_size = static_cast<int64_t>(np) - static_cast<int64_t>(s_star.size());
    if (u_size_raw < 0 || u_size_raw > pool_size)
        throw std::invalid_argument("cluster: removal fraction incompatible with n");
    const auto u_size = static_cast<size_t>(u_size_raw);

    std::vector<int32_t> pool_base;  // V' \ S*, G' indices
    pool_base.reserve(static_cast<size_t>(pool_size));
    for (int32_t v = 0; v < np; ++v)
        if (!in_s_star[v]) pool_base.push_back(v);

    std::vector<int32_t> jv(static_cast<size_t>(np), 0);
    std::vector<int8_t> tau_round(static_cast<size_t>(np), 0);  // tau_{J_v,v}
    std::vector<uint8_t> decided(static_cast<size_t>(np), 0);
    int64_t undecided = np;

    std::vector<uint8_t> in_vj(static_cast<size_t>(np), 0);
    double engine_seconds = 0.0;

    for (int j = 1; j <= algo.rounds && undecided > 0; ++j) {
        const auto t_round = std::chrono::steady_clock::now();
        diag.rounds_executed = j;

        // step 4: U_j uniform over V' \ S*; the round's working set is
        // V_j = V' \ U_j, which keeps S* inside as the J_v condition and the
        // statistic require. (|V_j| = n - ceil(n delta), the set the d', s'
        // parameters describe.)
        Rng round_rng(seed, 1000 + static_cast<uint64_t>(j));
        std::vector<int32_t> pool = pool_base;
        const std::vector<int32_t> u_j = sample_without_replacement(pool, u_size, round_rng);
        std::fill(in_vj.begin(), in_vj.end(), 1);
        for (int32_t v : u_j) in_vj[v] = 0;
        // S* n U_j is empty by construction, so S* stays in V_j
        assert(std::all_of(s_star.begin(), s_star.end(), [&](int32_t v) { return in_vj[v]; }));

        // step 6 precondition scan: J_v = first j with B_{R-1}(v) disjoint
        // from V_j and S_v u S* inside V_j
        std::vector<int32_t> batch;
        for (int32_t v = 0; v < np; ++v) {
            if (decided[v]) continue;
            bool ok = true;
            for (int32_t w : spheres.inner[v])
                if (in_vj[w]) { ok = false; break; }
            if (!ok) continue;
            for (int32_t w : spheres.sphere[v])
                if (!in_vj[w]) { ok = false; break; }
            if (ok) batch.push_back(v);
        }

        if (!batch.empty()) {
            ++diag.rounds_with_batches;
            const auto t_engine = std::chrono::steady_clock::now();
            std::vector<int32_t> vj_vertices;
            vj_vertices.reserve(static_cast<size_t>(np) - u_size);
            for (int32_t v = 0; v < np; ++v)
                if (in_vj[v]) vj_vertices.push_back(v);
            assert(vj_vertices.size() == static_cast<size_t>(np) - u_size);
            const InducedSubgraph gj = induced_subgraph(gp.graph, vj_vertices);

            std::vector<double> z(static_cast<size_t>(gj.graph.n()), 0.0);
            for (int32_t u : s_star) z[gj.from_original[u]] = 1.0;
            const MatvecResult y = nb_matvec(gj.graph, offset, algo.k, z, algo.normalize);
            diag.min_step_gain = std::min(diag.min_step_gain, y.min_step_gain);
            engine_seconds += seconds_since(t_engine);

            Rng xi_rng(seed, 2'000'000 + static_cast<uint64_t>(j));
            for (int32_t v : batch) {
                double stat = 0.0;
                for (int32_t w : spheres.sphere[v]) stat += y.values[gj.from_original[w]];
                const double xi = xi_rng.uniform_pm1();
                // dither brought under the engine's scale; exact because the
                // scale is a power of two
                const double dither =
                    std::ldexp(dither_scale * xi, static_cast<int>(-y.scale_exp2));
                jv[v] = j;
                tau_round[v] = static_cast<int8_t>(sgn(stat + dither));
                decided[v] = 1;
                --undecided;
            }
        }
        diag.round_seconds.push_back(static_cast<float>(seconds_since(t_round)));
    }

    diag.scale_headroom_low = diag.min_step_gain < 1e-6;

    // final assembly; undecided and tied vertices get random labels
    Rng label_rng(seed, 2);
    for (int64_t v = 0; v < n; ++v) {
        const int32_t pv = gp.from_original[v];
        if (pv >= 0 && decided[pv] && tau_round[pv] != 0) {
            result.tau[v] = tau_round[pv];
        } else {
            if (pv >= 0 && decided[pv] && tau_round[pv] == 0) ++diag.tie_count;
            if (pv >= 0 && !decided[pv]) ++diag.jv_zero_count;
            result.tau[v] = label_rng.sign();
        }
    }

    diag.engine_seconds = engine_seconds;
    diag.total_seconds = seconds_since(t_start);
    return result;
}

}  // namespace

AlgoParams derive_params(const SbmParams& params, const DeriveOptions& options) {
    params.validate();
    const double d = params.d();
    const double s = params.s();
    if (!(s * s > d))
        throw std::invalid_argument("derive_params: below threshold (requires s^2 > d)");
    if (params.n < options.min_n)
        throw std::invalid_argument("derive_params: n below configured minimum");

    AlgoParams algo;
    const double one_minus_delta_prime = d / (s * s);
    algo.delta = (1.0 - one_minus_delta_prime) / 2.0;
    algo.alpha = options.alpha_safety * 2.0 / std::log(s * s / d);
    algo.k = static_cast<int>(std::ceil(algo.alpha * std::log(static_cast<double>(params.n))));
    algo.s_prime = s * (1.0 - algo.delta);
    algo.d_prime = d * (1.0 - algo.delta);

    if (options.r_override) {
        algo.R = *options.r_override;
    } else {
        const double lll = std::log(std::log(std::log(static_cast<double>(params.n))));
        algo.R = 2;
        if (lll > 1.0)  // ln ln ln ln n > 0 only for astronomically large n
            algo.R = std::max(2, 2 * static_cast<int>(std::ceil(std::log(lll))));
    }
    if (algo.R % 2 != 0) ++algo.R;

    const double lnln = std::log(std::log(static_cast<double>(params.n)));
    algo.anchor_degree = std::max(2, static_cast<int>(std::ceil(std::sqrt(std::max(0.0, lnln)))));
    algo.rounds = options.rounds_override
                      ? *options.rounds_override
                      : static_cast<int>(std::ceil(std::log(static_cast<double>(params.n))));

    if (options.kappa_override) {
        algo.kappa = *options.kappa_override;
    } else {
        algo.kappa = calibrate_kappa(algo.d_prime, std::abs(algo.s_prime), algo.R,
                                     options.calibration_samples, options.calibration_seed)
                         .kappa;
    }
    return algo;
}

AnchorChoice choose_anchor(const LabelledGraph& g, std::span<const int32_t> removed,
                           std::span<const uint8_t> kept_mask, int target) {
    if (removed.empty()) throw std::invalid_argument("choose_anchor: empty removed set");
    AnchorChoice choice;
    int best_gap = std::numeric_limits<int>::max();
    for (int32_t w : removed) {
        int deg = 0;
        for (int32_t u : g.neighbors(w))
            if (kept_mask[u]) ++deg;
        const int gap = std::abs(deg - target);
        if (gap < best_gap || (gap == best_gap && w < choice.w_star)) {
            best_gap = gap;
            choice.w_star = w;
        }
    }
    for (int32_t u : g.neighbors(choice.w_star))
        if (kept_mask[u]) choice.s_star.push_back(u);
    return choice;
}

ClusterResult cluster(const LabelledGraph& g, const SbmParams& params, const AlgoParams& algo,
                      uint64_t seed) {
    return run_pipeline(g, params, algo, seed, false);
}

ClusterResult cluster_simple(const LabelledGraph& g, const SbmParams& params,
                             const AlgoParams& algo, uint64_t seed) {
    return run_pipeline(g, params, algo, seed, true);
}

}  // namespace nbc
