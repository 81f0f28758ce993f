#include "nbc/branching.hpp"

#include <cmath>
#include <stdexcept>

#include "nbc/rng.hpp"

namespace nbc {

namespace {

void check_tree_params(double d, double s, int R) {
    if (!(d > 0.0)) throw std::invalid_argument("branching: d must be positive");
    if (std::abs(s) > d) throw std::invalid_argument("branching: |s| <= d required (keep probability s/d)");
    if (R < 0) throw std::invalid_argument("branching: negative depth");
    if (s < 0.0 && R % 2 != 0)
        throw std::invalid_argument("branching: s < 0 requires even R");
}

// Poisson(d) offspring down to depth R; percolation components tracked as
// edges are revealed (kept with probability |s|/d).
LabelledTree grow_percolated(double d, double keep_prob, int R, Rng& rng, size_t cap) {
    LabelledTree t;
    t.parent.push_back(-1);
    t.component.push_back(0);
    t.level_offsets = {0, 1};
    int32_t next_component = 1;
    size_t level_begin = 0, level_end = 1;
    for (int r = 0; r < R && level_end > level_begin; ++r) {
        for (size_t v = level_begin; v < level_end; ++v) {
            const long children = rng.poisson(d);
            for (long i = 0; i < children; ++i) {
                t.parent.push_back(static_cast<int32_t>(v));
                const bool kept = rng.uniform01() < keep_prob;
                t.component.push_back(kept ? t.component[v] : next_component++);
                if (t.parent.size() > cap)
                    throw std::runtime_error("branching: population cap exceeded");
            }
        }
        level_begin = level_end;
        level_end = t.parent.size();
        t.level_offsets.push_back(level_end);
        if (level_end > level_begin) t.depth = r + 1;
    }
    while (static_cast<int>(t.level_offsets.size()) < R + 2)
        t.level_offsets.push_back(t.parent.size());
    return t;
}

int32_t depth_of(const LabelledTree& t, size_t v) {
    for (int r = 0; r <= t.depth; ++r)
        if (v >= t.level_offsets[r] && v < t.level_offsets[r + 1]) return r;
    return -1;
}

}  // namespace

LabelledTree sample_labelled_tree(double d, double s, int R, RootMode mode, uint64_t seed,
                                  TreeConstruction construction, size_t population_cap) {
    check_tree_params(d, s, R);
    const bool flip_odd = s < 0.0;
    const double s_abs = std::abs(s);
    Rng rng(seed, 0);

    LabelledTree t;
    if (construction == TreeConstruction::Percolation) {
        t = grow_percolated(d, s_abs / d, R, rng, population_cap);
        // one label per component; component 0 is the root's
        std::vector<int8_t> comp_label;
        int32_t comp_count = 0;
        for (int32_t c : t.component) comp_count = std::max(comp_count, c + 1);
        comp_label.resize(static_cast<size_t>(comp_count));
        for (auto& lab : comp_label) lab = rng.sign();
        if (mode == RootMode::Plus) comp_label[0] = 1;
        if (mode == RootMode::Minus) comp_label[0] = -1;
        t.label.resize(t.size());
        for (size_t v = 0; v < t.size(); ++v) t.label[v] = comp_label[t.component[v]];
    } else {
        t = grow_percolated(d, 0.0, R, rng, population_cap);
        t.component.clear();
        const double p_same = (d + s_abs) / (2.0 * d);
        t.label.resize(t.size());
        t.label[0] = mode == RootMode::Plus ? 1 : mode == RootMode::Minus ? -1 : rng.sign();
        Rng chain(seed, 1);
        for (size_t v = 1; v < t.size(); ++v) {
            const int8_t parent_label = t.label[t.parent[v]];
            t.label[v] = chain.uniform01() < p_same ? parent_label
                                                    : static_cast<int8_t>(-parent_label);
        }
    }

    if (flip_odd) {
        for (size_t v = 0; v < t.size(); ++v)
            if (depth_of(t, v) % 2 == 1) t.label[v] = static_cast<int8_t>(-t.label[v]);
    }
    return t;
}

int64_t psi(const LabelledTree& tree, int R) {
    if (R < 0) throw std::invalid_argument("psi: negative depth");
    int64_t acc = 0;
    if (R > tree.depth) return 0;
    for (size_t v = tree.level_offsets[R]; v < tree.level_offsets[R + 1]; ++v)
        acc += tree.label[v];
    return acc;
}

CoupledPsi coupled_plus_minus(double d, double s, int R, uint64_t seed, size_t population_cap) {
    check_tree_params(d, s, R);
    const bool flip_odd = s < 0.0;
    const double s_abs = std::abs(s);
    Rng rng(seed, 0);
    LabelledTree t = grow_percolated(d, d > 0 ? s_abs / d : 0.0, R, rng, population_cap);

    int32_t comp_count = 0;
    for (int32_t c : t.component) comp_count = std::max(comp_count, c + 1);
    std::vector<int8_t> comp_label(static_cast<size_t>(comp_count));
    for (auto& lab : comp_label) lab = rng.sign();

    CoupledPsi out;
    if (R > t.depth) return out;
    for (size_t v = t.level_offsets[R]; v < t.level_offsets[R + 1]; ++v) {
        const int8_t sign_flip = flip_odd && R % 2 == 1 ? -1 : 1;  // R even when s<0
        const bool in_root_comp = t.component[v] == 0;
        const int8_t off = static_cast<int8_t>(comp_label[t.component[v]] * sign_flip);
        out.psi_plus += in_root_comp ? sign_flip : off;
        out.psi_minus += in_root_comp ? -sign_flip : off;
        if (in_root_comp) ++out.root_component_level_size;
    }
    return out;
}

KappaCalibration calibrate_kappa(double d, double s, int R, int64_t samples, uint64_t seed) {
    check_tree_params(d, s, R);
    if (!(s * s > d))
        throw std::invalid_argument("calibrate_kappa: requires s^2 > d");
    if (samples < 100) throw std::invalid_argument("calibrate_kappa: too few samples");

    const double scale_base = std::pow(std::abs(s), R);  // s^R; R even when s < 0
    std::vector<CoupledPsi> draws(static_cast<size_t>(samples));
    std::vector<double> xi(static_cast<size_t>(samples));
    Rng xi_rng(seed, 0xD17);
    uint64_t x = seed;
    const uint64_t base = splitmix64(x);
    for (int64_t i = 0; i < samples; ++i) {
        draws[i] = coupled_plus_minus(d, s, R, base + static_cast<uint64_t>(i));
        xi[i] = xi_rng.uniform_pm1();
    }

    for (double kappa = 1.0; kappa <= 1024.0; kappa *= 2.0) {
        const double bound = kappa * scale_base;
        int64_t tail_p = 0, tail_m = 0, better = 0;
        for (int64_t i = 0; i < samples; ++i) {
            if (std::abs(static_cast<double>(draws[i].psi_plus)) >= bound) ++tail_p;
            if (std::abs(static_cast<double>(draws[i].psi_minus)) >= bound) ++tail_m;
            if (static_cast<double>(draws[i].psi_plus) >= xi[i] * bound) ++better;
        }
        KappaCalibration cal;
        cal.kappa = kappa;
        cal.tail_plus = static_cast<double>(tail_p) / static_cast<double>(samples);
        cal.tail_minus = static_cast<double>(tail_m) / static_cast<double>(samples);
        cal.better_than_half = static_cast<double>(better) / static_cast<double>(samples);
        cal.better_stderr = std::sqrt(cal.better_than_half * (1.0 - cal.better_than_half) /
                                      static_cast<double>(samples));
        cal.samples = samples;
        cal.seed = seed;
        if (cal.tail_plus <= 0.05 && cal.tail_minus <= 0.05 && cal.better_than_half >= 0.52)
            return cal;
    }
    throw CalibrationError("calibrate_kappa: no grid value satisfies both conditions");
}

}  // namespace nbc
