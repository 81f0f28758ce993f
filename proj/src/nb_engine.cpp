#include "nbc/nb_engine.hpp"

#include <cmath>
#include <stdexcept>

namespace nbc {

namespace {

void sparse_matvec(const LabelledGraph& g, std::span<const double> x, std::vector<double>& out) {
    const int64_t n = g.n();
    out.assign(static_cast<size_t>(n), 0.0);
    for (int32_t v = 0; v < n; ++v) {
        double acc = 0.0;
        for (int32_t w : g.neighbors(v)) acc += x[w];
        out[v] = acc;
    }
}

double max_abs(const NbStack& s) {
    double m = 0.0;
    for (const auto* q : {&s.q1, &s.q2, &s.q3, &s.q4})
        for (double x : *q) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

NbStack make_level0_stack(std::span<const double> z) {
    NbStack s;
    s.q1.assign(z.begin(), z.end());
    s.q3.assign(z.begin(), z.end());
    s.q2.assign(z.size(), 0.0);
    s.q4.assign(z.size(), 0.0);
    return s;
}

void apply_m(const LabelledGraph& g, double offset, NbStack& stack, bool normalize) {
    const auto n = static_cast<size_t>(g.n());
    if (stack.q1.size() != n)
        throw std::invalid_argument("apply_m: stack size does not match graph");
    const double c = offset;
    const double w1 = 1.0 - c;       // edge weight
    const double w1sq = w1 * w1;
    const double csq = c * c;
    const double nn = static_cast<double>(g.n());

    const double in_max = max_abs(stack);

    std::vector<double> a_q1, a_q3;
    sparse_matvec(g, stack.q1, a_q1);
    sparse_matvec(g, stack.q3, a_q3);
    double sum_q3 = 0.0;
    for (double x : stack.q3) sum_q3 += x;

    std::vector<double> new_q1(n), new_q3(n);
    for (size_t v = 0; v < n; ++v) {
        const double deg = g.degree(static_cast<int32_t>(v));
        // -(c)(1 - A - I) x = -c ((sum x) - A x - x)
        const double ones_part = -c * (sum_q3 - a_q3[v] - stack.q3[v]);
        const double shared = w1 * a_q1[v] + ones_part;
        new_q1[v] = shared - w1sq * (deg - 1.0) * stack.q2[v]
                    - csq * ((nn - 1.0) - deg) * stack.q4[v];
        new_q3[v] = shared - w1sq * deg * stack.q2[v]
                    - csq * ((nn - 2.0) - deg) * stack.q4[v];
    }
    stack.q2 = std::move(stack.q1);
    stack.q4 = std::move(stack.q3);
    stack.q1 = std::move(new_q1);
    stack.q3 = std::move(new_q3);
    ++stack.level;

    const double out_max = max_abs(stack);
    if (in_max > 0.0 && out_max > 0.0)
        stack.min_step_gain = std::min(stack.min_step_gain, out_max / in_max);

    if (normalize && out_max > 0.0) {
        const int e = std::ilogb(out_max) + 1;
        if (e != 0) {
            const double f = std::ldexp(1.0, -e);  // exact power-of-two scaling
            for (auto* q : {&stack.q1, &stack.q2, &stack.q3, &stack.q4})
                for (double& x : *q) x *= f;
            stack.scale_exp2 += e;
        }
    }
}

std::vector<double> apply_m_hat(const LabelledGraph& g, double offset, const NbStack& stack) {
    const auto n = static_cast<size_t>(g.n());
    if (stack.q1.size() != n)
        throw std::invalid_argument("apply_m_hat: stack size does not match graph");
    const double c = offset;
    const double w1 = 1.0 - c;
    const double w1sq = w1 * w1;
    const double csq = c * c;
    const double nn = static_cast<double>(g.n());

    std::vector<double> a_q1, a_q3;
    sparse_matvec(g, stack.q1, a_q1);
    sparse_matvec(g, stack.q3, a_q3);
    double sum_q3 = 0.0;
    for (double x : stack.q3) sum_q3 += x;

    std::vector<double> out(n);
    for (size_t v = 0; v < n; ++v) {
        const double deg = g.degree(static_cast<int32_t>(v));
        out[v] = w1 * a_q1[v] - w1sq * deg * stack.q2[v]
                 - c * (sum_q3 - a_q3[v] - stack.q3[v])
                 - csq * ((nn - 1.0) - deg) * stack.q4[v];
    }
    return out;
}

MatvecResult nb_matvec(const LabelledGraph& g, double offset, int k, std::span<const double> z,
                       Normalize normalize) {
    if (k < 0) throw std::invalid_argument("nb_matvec: negative k");
    if (static_cast<int64_t>(z.size()) != g.n())
        throw std::invalid_argument("nb_matvec: vector size does not match graph");
    MatvecResult result;
    if (k == 0) {
        result.values.assign(z.begin(), z.end());
        return result;
    }
    const bool do_norm = normalize == Normalize::On || (normalize == Normalize::Auto && k > 20);
    NbStack stack = make_level0_stack(z);
    for (int step = 0; step < k - 1; ++step) apply_m(g, offset, stack, do_norm);
    result.values = apply_m_hat(g, offset, stack);
    result.scale_exp2 = stack.scale_exp2;
    result.min_step_gain = stack.min_step_gain;
    return result;
}

PairStatistic pair_statistic(const LabelledGraph& g, double offset,
                             std::span<const int32_t> sources, std::span<const int32_t> targets,
                             int k, Normalize normalize) {
    PairStatistic stat;
    if (sources.empty() || targets.empty()) {
        stat.empty = true;
        return stat;
    }
    std::vector<double> z(static_cast<size_t>(g.n()), 0.0);
    for (int32_t u : sources) {
        if (u < 0 || u >= g.n()) throw std::out_of_range("pair_statistic: source out of range");
        z[u] = 1.0;
    }
    MatvecResult r = nb_matvec(g, offset, k, z, normalize);
    for (int32_t t : targets) {
        if (t < 0 || t >= g.n()) throw std::out_of_range("pair_statistic: target out of range");
        stat.value += r.values[t];
    }
    stat.scale_exp2 = r.scale_exp2;
    stat.min_step_gain = r.min_step_gain;
    return stat;
}

}  // namespace nbc
