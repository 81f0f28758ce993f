#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nbc/dense_reference.hpp"
#include "nbc/nb_engine.hpp"
#include "nbc/path_oracle.hpp"
#include "nbc/rng.hpp"
#include "nbc/sbm.hpp"
#include "test_support.hpp"

using namespace nbc;
using nbc::testing::close;

namespace {

LabelledGraph complete_graph(int n) {
    std::vector<std::pair<int32_t, int32_t>> edges;
    for (int32_t u = 0; u < n; ++u)
        for (int32_t v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    return LabelledGraph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("level-0 stack layout") {
    const std::vector<double> z{1.0, -2.0, 3.0};
    const NbStack s = make_level0_stack(z);
    CHECK(s.q1 == z);
    CHECK(s.q3 == z);
    CHECK(s.q2 == std::vector<double>(3, 0.0));
    CHECK(s.q4 == std::vector<double>(3, 0.0));
    CHECK(s.level == 0);
    CHECK(s.scale_exp2 == 0);
}

TEST_CASE("one step on the empty graph matches the rank-one closed form") {
    const LabelledGraph empty = LabelledGraph::from_edges(4, {});
    const double d = 1.2, offset = d / 4.0;
    const std::vector<double> z{0.5, -1.0, 2.0, 0.25};
    NbStack s = make_level0_stack(z);
    apply_m(empty, offset, s, false);
    double total = 0.0;
    for (double x : z) total += x;
    for (int v = 0; v < 4; ++v) {
        const double expect = -offset * (total - z[v]);  // -(d/n)(ones - I) z
        CHECK(s.q1[v] == doctest::Approx(expect).epsilon(1e-12));
        CHECK(s.q2[v] == doctest::Approx(z[v]));
    }
}

TEST_CASE("apply_m equals the dense operator on random graphs") {
    for (uint64_t seed = 0; seed < 60; ++seed) {
        Rng pick(seed, 5);
        const auto n = static_cast<int64_t>(4 + pick.below(5));  // 4..8
        const double d = 1.0 + pick.uniform01();
        const double s = 0.8 * d * pick.uniform01();
        const LabelledGraph g = sample_sbm({n, d + s, d - s}, seed);
        const double offset = d / static_cast<double>(n);
        const DenseMatrix m_op = dense_m_operator(g, offset);

        Rng zr(seed, 6);
        std::vector<double> z(static_cast<size_t>(n));
        for (auto& x : z) x = zr.uniform_pm1();
        NbStack stack = make_level0_stack(z);

        std::vector<double> dense_state(4 * static_cast<size_t>(n), 0.0);
        for (int64_t i = 0; i < n; ++i) {
            dense_state[i] = z[i];
            dense_state[2 * n + i] = z[i];
        }
        for (int step = 0; step < 4; ++step) {
            apply_m(g, offset, stack, false);
            dense_state = dense_apply(m_op, dense_state);
            for (int64_t i = 0; i < n; ++i) {
                REQUIRE(close(stack.q1[i], dense_state[i], 1e-10));
                REQUIRE(close(stack.q2[i], dense_state[n + i], 1e-10));
                REQUIRE(close(stack.q3[i], dense_state[2 * n + i], 1e-10));
                REQUIRE(close(stack.q4[i], dense_state[3 * n + i], 1e-10));
            }
        }
    }
}

TEST_CASE("apply_m_hat gives N^{(level+1)} z") {
    const LabelledGraph k3 = complete_graph(3);
    const double offset = 1.5 / 3.0;
    SUBCASE("K3, one step from a basis vector") {
        const std::vector<double> z{1.0, 0.0, 0.0};
        const NbStack s = make_level0_stack(z);
        const auto out = apply_m_hat(k3, offset, s);
        CHECK(out[0] == doctest::Approx(0.0));
        CHECK(out[1] == doctest::Approx(0.5));
        CHECK(out[2] == doctest::Approx(0.5));
    }
    SUBCASE("empty graph: N^{(1)} = -(d/n)(ones - I)") {
        const LabelledGraph empty = LabelledGraph::from_edges(5, {});
        const double off2 = 2.0 / 5.0;
        std::vector<double> z(5, 0.0);
        z[0] = 1.0;
        const NbStack s = make_level0_stack(z);
        const auto out = apply_m_hat(empty, off2, s);
        CHECK(out[0] == doctest::Approx(0.0));
        for (int v = 1; v < 5; ++v) CHECK(out[v] == doctest::Approx(-off2));
    }
    SUBCASE("zero vector stays zero") {
        const std::vector<double> z(3, 0.0);
        const auto out = apply_m_hat(k3, offset, make_level0_stack(z));
        for (double x : out) CHECK(x == 0.0);
    }
}

TEST_CASE("nb_matvec against the brute-force oracle") {
    SUBCASE("k = 0 is the identity") {
        const LabelledGraph k3 = complete_graph(3);
        const std::vector<double> z{2.0, -1.0, 0.5};
        const auto r = nb_matvec(k3, 0.5, 0, z);
        CHECK(r.values == z);
    }
    SUBCASE("K3 pinned example") {
        const LabelledGraph k3 = complete_graph(3);
        const std::vector<double> z{1.0, 0.0, 0.0};
        const auto r = nb_matvec(k3, 0.5, 2, z, Normalize::Off);
        CHECK(r.values[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(r.values[1] == doctest::Approx(0.25));
        CHECK(r.values[2] == doctest::Approx(0.25));
    }
    SUBCASE("random graphs, all k <= 6, entrywise 1e-9") {
        for (uint64_t seed = 0; seed < 50; ++seed) {
            Rng pick(seed, 7);
            const auto n = static_cast<int64_t>(4 + pick.below(7));
            const double d = 1.0 + std::min(2.0, static_cast<double>(n) / 2.5 - 1.0) *
                                       pick.uniform01();
            const double s = 0.8 * d * pick.uniform01();
            const LabelledGraph g = sample_sbm({n, d + s, d - s}, seed + 1000);
            const double offset = d / static_cast<double>(n);
            const auto mats = nb_matrices_bruteforce(g, d, 6);
            for (int k = 0; k <= 6; ++k) {
                for (int32_t col = 0; col < n; ++col) {
                    std::vector<double> z(static_cast<size_t>(n), 0.0);
                    z[col] = 1.0;
                    const auto r = nb_matvec(g, offset, k, z, Normalize::Off);
                    for (int32_t row = 0; row < n; ++row)
                        REQUIRE(close(r.values[row], mats[k][row][col], 1e-9));
                }
            }
        }
    }
}

TEST_CASE("exact linearity") {
    const LabelledGraph g = sample_sbm({9, 2.5, 0.5}, 17);
    const double offset = 1.5 / 9.0;
    Rng rng(3, 0);
    std::vector<double> x(9), y(9), combo(9);
    for (int i = 0; i < 9; ++i) {
        x[i] = rng.uniform_pm1();
        y[i] = rng.uniform_pm1();
    }
    const double a = 1.75, b = -0.4;
    for (int i = 0; i < 9; ++i) combo[i] = a * x[i] + b * y[i];
    for (int k : {1, 3, 5}) {
        const auto rx = nb_matvec(g, offset, k, x, Normalize::Off);
        const auto ry = nb_matvec(g, offset, k, y, Normalize::Off);
        const auto rc = nb_matvec(g, offset, k, combo, Normalize::Off);
        for (int i = 0; i < 9; ++i)
            CHECK(close(rc.values[i], a * rx.values[i] + b * ry.values[i], 1e-9));
    }
}

TEST_CASE("normalization is an exact power-of-two rescaling") {
    const LabelledGraph g = sample_sbm({200, 5.0, 1.0}, 23);
    const double offset = 3.0 / 200.0;
    std::vector<double> z(200, 0.0);
    z[0] = 1.0;
    z[77] = 1.0;
    for (int k : {5, 25}) {
        const auto plain = nb_matvec(g, offset, k, z, Normalize::Off);
        const auto scaled = nb_matvec(g, offset, k, z, Normalize::On);
        REQUIRE(plain.scale_exp2 == 0);
        for (int i = 0; i < 200; ++i) {
            const double rescaled =
                std::ldexp(scaled.values[i], static_cast<int>(scaled.scale_exp2));
            REQUIRE(rescaled == plain.values[i]);  // bit-exact
        }
    }
}

TEST_CASE("positive scaling preserves signs") {
    const LabelledGraph g = sample_sbm({150, 4.0, 0.5}, 5);
    const double offset = 2.25 / 150.0;
    std::vector<double> z(150, 0.0);
    z[3] = 1.0;
    const auto a = nb_matvec(g, offset, 24, z, Normalize::Off);
    const auto b = nb_matvec(g, offset, 24, z, Normalize::On);
    for (int i = 0; i < 150; ++i) {
        const auto sign = [](double x) { return x > 0 ? 1 : x < 0 ? -1 : 0; };
        CHECK(sign(a.values[i]) == sign(b.values[i]));
    }
}

TEST_CASE("pair statistic") {
    const LabelledGraph k4 = complete_graph(4);
    const double offset = 2.0 / 4.0;
    SUBCASE("identity convention at k = 0") {
        const std::vector<int32_t> vs{2};
        const auto s = pair_statistic(k4, offset, vs, vs, 0);
        CHECK(!s.empty);
        CHECK(s.value == doctest::Approx(1.0));
    }
    SUBCASE("single edge at k = 1") {
        const std::vector<int32_t> src{0}, dst{1};
        const auto s = pair_statistic(k4, offset, src, dst, 1);
        CHECK(s.value == doctest::Approx(1.0 - offset));
    }
    SUBCASE("sums brute-force entries") {
        const std::vector<int32_t> src{0}, dst{2, 3};
        const auto s = pair_statistic(k4, offset, src, dst, 2, Normalize::Off);
        const double want = nb_sum_bruteforce(k4, 2.0, 2, 0, 2) +
                            nb_sum_bruteforce(k4, 2.0, 2, 0, 3);
        CHECK(s.value == doctest::Approx(want).epsilon(1e-12));
    }
    SUBCASE("empty sets flagged") {
        const std::vector<int32_t> src{0};
        CHECK(pair_statistic(k4, offset, src, {}, 2).empty);
        CHECK(pair_statistic(k4, offset, {}, src, 2).empty);
    }
}

TEST_CASE("symmetry of N^k through the engine") {
    for (uint64_t seed = 100; seed < 130; ++seed) {
        const LabelledGraph g = sample_sbm({8, 3.0, 1.0}, seed);
        const double offset = 2.0 / 8.0;
        for (int k : {2, 4, 6}) {
            std::vector<double> eu(8, 0.0), ev(8, 0.0);
            eu[1] = 1.0;
            ev[6] = 1.0;
            const auto ru = nb_matvec(g, offset, k, eu, Normalize::Off);
            const auto rv = nb_matvec(g, offset, k, ev, Normalize::Off);
            CHECK(close(ru.values[6], rv.values[1], 1e-9));
        }
    }
}

TEST_CASE("near-linear cost in n") {
    // doubling n at fixed d, k should not much more than double the time;
    // generous 3x gate here, the acceptance suite pins the 2.5x one
    const double d = 3.0;
    const int k = 30;
    const auto time_one = [&](int64_t n) {
        const LabelledGraph g = sample_sbm({n, d + 1.0, d - 1.0}, 9);
        std::vector<double> z(static_cast<size_t>(n), 0.0);
        z[0] = 1.0;
        nb_matvec(g, d / static_cast<double>(n), k, z);  // warm up
        double best = 1e100;
        for (int rep = 0; rep < 3; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            nb_matvec(g, d / static_cast<double>(n), k, z);
            best = std::min(best, std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - t0)
                                      .count());
        }
        return best;
    };
    const double t1 = time_one(40000);
    const double t2 = time_one(80000);
    CHECK(t2 / t1 < 3.0);
}
