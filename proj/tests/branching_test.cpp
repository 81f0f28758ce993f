#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "nbc/branching.hpp"
#include "nbc/rng.hpp"
#include "test_support.hpp"

using namespace nbc;
using nbc::testing::chi2_two_sample_pvalue;
using nbc::testing::moments;

TEST_CASE("psi basics") {
    SUBCASE("depth zero in plus mode is +1") {
        const LabelledTree t = sample_labelled_tree(2.0, 1.0, 0, RootMode::Plus, 3);
        CHECK(psi(t, 0) == 1);
    }
    SUBCASE("extinct tree contributes zero") {
        // d small: find a seed whose tree dies before depth 4
        for (uint64_t seed = 0; seed < 50; ++seed) {
            const LabelledTree t = sample_labelled_tree(0.3, 0.1, 4, RootMode::Plus, seed);
            if (t.depth < 4) {
                CHECK(psi(t, 4) == 0);
                return;
            }
        }
        FAIL("no extinct tree found at d = 0.3");
    }
    SUBCASE("hand summed level") {
        const LabelledTree t = sample_labelled_tree(3.0, 1.5, 2, RootMode::Plus, 11);
        if (t.depth >= 1) {
            int64_t acc = 0;
            for (size_t v = t.level_offsets[1]; v < t.level_offsets[2]; ++v) acc += t.label[v];
            CHECK(psi(t, 1) == acc);
        }
    }
}

TEST_CASE("degenerate percolation regimes") {
    SUBCASE("s = d keeps every edge: all labels equal the root") {
        for (uint64_t seed = 0; seed < 20; ++seed) {
            const LabelledTree t = sample_labelled_tree(2.5, 2.5, 3, RootMode::Plus, seed);
            for (size_t v = 0; v < t.size(); ++v) CHECK(t.label[v] == 1);
            CHECK(psi(t, 3) == static_cast<int64_t>(t.level_size(3)));
        }
    }
    SUBCASE("s = 0: root component is trivial, plus and minus readings agree beyond it") {
        for (uint64_t seed = 0; seed < 200; ++seed) {
            const CoupledPsi cp = coupled_plus_minus(3.0, 0.0, 2, seed);
            CHECK(cp.psi_plus == cp.psi_minus);
            CHECK(cp.root_component_level_size == 0);
        }
    }
    SUBCASE("|s| > d rejected") {
        CHECK_THROWS_AS(sample_labelled_tree(2.0, 2.5, 3, RootMode::Free, 1),
                        std::invalid_argument);
    }
}

TEST_CASE("coupled readings differ by exactly twice the root component") {
    for (uint64_t seed = 0; seed < 3000; ++seed) {
        const CoupledPsi cp = coupled_plus_minus(3.0, std::sqrt(6.0), 4, seed);
        CHECK(cp.psi_plus - cp.psi_minus == 2 * cp.root_component_level_size);
        CHECK(cp.psi_plus >= cp.psi_minus);
    }
}

TEST_CASE("mean of psi_plus follows the one-generation bias recursion") {
    // E psi_{r+1}^+ = s E psi_r^+, so E psi_R^+ = s^R
    const double d = 3.0, s = std::sqrt(6.0);
    const int R = 4;
    std::vector<double> draws;
    for (uint64_t seed = 0; seed < 20000; ++seed)
        draws.push_back(
            static_cast<double>(coupled_plus_minus(d, s, R, seed ^ 0xABCDEF).psi_plus));
    const auto m = moments(draws);
    CHECK(std::abs(m.mean - std::pow(s, R)) <= 4.0 * m.stderr_mean);
}

TEST_CASE("free-mode psi is symmetric about zero") {
    std::vector<double> draws;
    for (uint64_t seed = 0; seed < 20000; ++seed) {
        const LabelledTree t = sample_labelled_tree(3.0, 1.5, 3, RootMode::Free, seed ^ 0x1234);
        draws.push_back(static_cast<double>(psi(t, 3)));
    }
    const auto m = moments(draws);
    CHECK(std::abs(m.mean) <= 4.0 * m.stderr_mean);
}

TEST_CASE("root-component level size matches a Poisson(s) branching process") {
    // the kept-edge subtree at the root is itself Galton-Watson with
    // Poisson(d * s/d) = Poisson(s) offspring
    const double d = 3.0, s = std::sqrt(6.0);
    const int R = 4;
    std::map<int64_t, int64_t> observed, oracle;
    for (uint64_t seed = 0; seed < 100000; ++seed) {
        const CoupledPsi cp = coupled_plus_minus(d, s, R, seed ^ 0xFEED);
        ++observed[std::min<int64_t>(cp.root_component_level_size, 10)];
    }
    Rng rng(0xD0E, 0);
    for (int rep = 0; rep < 100000; ++rep) {
        int64_t level = 1;
        for (int r = 0; r < R && level > 0; ++r) {
            int64_t next = 0;
            for (int64_t i = 0; i < level; ++i) next += rng.poisson(s);
            level = next;
        }
        ++oracle[std::min<int64_t>(level, 10)];
    }
    CHECK(chi2_two_sample_pvalue(observed, oracle) > 0.01);
}

TEST_CASE("percolation and Markov constructions share a law") {
    // joint binning of (|level 1|, |level 2|, psi_R) at R <= 3, d <= 3
    for (const auto& [d, s, R] : std::vector<std::tuple<double, double, int>>{
             {2.0, 1.0, 2}, {3.0, 1.5, 3}}) {
        std::map<int64_t, int64_t> perc, markov;
        for (uint64_t seed = 0; seed < 100000; ++seed) {
            for (auto construction : {TreeConstruction::Percolation, TreeConstruction::Markov}) {
                const LabelledTree t = sample_labelled_tree(
                    d, s, R, RootMode::Plus, seed ^ 0xC0DE, construction);
                const int64_t l1 = std::min<int64_t>(t.level_size(1), 6);
                const int64_t l2 = std::min<int64_t>(t.level_size(2), 6);
                const int64_t p = std::clamp<int64_t>(psi(t, R), -5, 5) + 5;
                const int64_t bin = (l1 * 8 + l2) * 16 + p;
                ++(construction == TreeConstruction::Percolation ? perc : markov)[bin];
            }
        }
        CAPTURE(d);
        CHECK(chi2_two_sample_pvalue(perc, markov) > 0.01);
    }
}

TEST_CASE("negative signal flips odd generations and keeps even levels") {
    SUBCASE("odd depth rejected") {
        CHECK_THROWS_AS(sample_labelled_tree(3.0, -1.5, 3, RootMode::Plus, 1),
                        std::invalid_argument);
    }
    SUBCASE("law of psi at even depth is unchanged") {
        std::map<int64_t, int64_t> neg, pos;
        for (uint64_t seed = 0; seed < 60000; ++seed) {
            const LabelledTree tn =
                sample_labelled_tree(2.5, -1.4, 2, RootMode::Plus, seed ^ 0xAA);
            const LabelledTree tp =
                sample_labelled_tree(2.5, 1.4, 2, RootMode::Plus, seed ^ 0x55);
            ++neg[std::clamp<int64_t>(psi(tn, 2), -8, 8)];
            ++pos[std::clamp<int64_t>(psi(tp, 2), -8, 8)];
        }
        CHECK(chi2_two_sample_pvalue(neg, pos) > 0.01);
    }
}

TEST_CASE("population cap") {
    bool threw = false;
    for (uint64_t seed = 0; seed < 10 && !threw; ++seed) {
        try {
            sample_labelled_tree(5.0, 2.0, 12, RootMode::Free, seed,
                                 TreeConstruction::Percolation, 2000);
        } catch (const std::runtime_error&) {
            threw = true;
        }
    }
    CHECK(threw);
}

TEST_CASE("kappa calibration") {
    SUBCASE("below threshold rejected") {
        CHECK_THROWS_AS(calibrate_kappa(3.0, 1.0, 4, 5000, 1), std::invalid_argument);
    }
    SUBCASE("calibrates at the flagship operating point") {
        const KappaCalibration cal = calibrate_kappa(3.0, std::sqrt(6.0), 4, 30000, 0xCA11B);
        CHECK(cal.tail_plus <= 0.05);
        CHECK(cal.tail_minus <= 0.05);
        CHECK(cal.better_than_half >= 0.52);
        // regression pin: the grid search lands on a small constant
        CHECK(cal.kappa >= 1.0);
        CHECK(cal.kappa <= 16.0);
    }
    SUBCASE("second moments stay on the Kesten-Stigum scale") {
        // E[psi_R^2] / s^{2R} roughly constant across R
        const double d = 3.0, s = std::sqrt(6.0);
        std::vector<double> ratios;
        for (int R : {2, 4, 6}) {
            double acc = 0.0;
            const int64_t trials = 20000;
            for (uint64_t seed = 0; seed < static_cast<uint64_t>(trials); ++seed) {
                const auto cp = coupled_plus_minus(d, s, R, seed ^ (0x77 + R));
                acc += static_cast<double>(cp.psi_plus) * static_cast<double>(cp.psi_plus);
            }
            ratios.push_back(acc / static_cast<double>(trials) / std::pow(s, 2 * R));
        }
        CHECK(ratios[1] / ratios[0] < 1.5);
        CHECK(ratios[1] / ratios[0] > 0.5);
        CHECK(ratios[2] / ratios[1] < 1.5);
        CHECK(ratios[2] / ratios[1] > 0.5);
    }
}
