#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

// Labelled Poisson(d) Galton-Watson trees truncated at depth R, via either
// the bond-percolation construction (edges kept with probability s/d,
// labels constant on components) or the label Markov chain (child copies
// parent with probability a/(a+b)). Both produce the same law; the tests
// check that. Negative s is handled by sampling with |s| and flipping odd
// generations, which requires even R.

namespace nbc {

enum class RootMode { Free, Plus, Minus };
enum class TreeConstruction { Percolation, Markov };

struct LabelledTree {
    std::vector<int32_t> parent;         // BFS order, parent[0] = -1
    std::vector<int8_t> label;
    std::vector<int32_t> component;      // percolation component id (root = 0), or empty
    std::vector<size_t> level_offsets;   // level r = [offsets[r], offsets[r+1])
    int depth = 0;

    size_t size() const { return parent.size(); }
    size_t level_size(int r) const {
        if (r < 0 || r > depth) return 0;
        return level_offsets[r + 1] - level_offsets[r];
    }
};

inline constexpr size_t kDefaultTreePopulationCap = 10'000'000;

LabelledTree sample_labelled_tree(double d, double s, int R, RootMode mode, uint64_t seed,
                                  TreeConstruction construction = TreeConstruction::Percolation,
                                  size_t population_cap = kDefaultTreePopulationCap);

// Psi_R = sum of labels at depth R (0 when the tree dies out earlier).
int64_t psi(const LabelledTree& tree, int R);

struct CoupledPsi {
    int64_t psi_plus = 0;
    int64_t psi_minus = 0;
    int64_t root_component_level_size = 0;  // C; psi_plus - psi_minus = 2C
};

// One percolated tree, same off-root component labels; only the root
// component's label differs between the two readings.
CoupledPsi coupled_plus_minus(double d, double s, int R, uint64_t seed,
                              size_t population_cap = kDefaultTreePopulationCap);

struct KappaCalibration {
    double kappa = 0.0;
    double tail_plus = 0.0;        // P[|Psi_R^+| >= kappa s^R]
    double tail_minus = 0.0;
    double better_than_half = 0.0; // P[Psi_R^+ >= xi kappa s^R]
    double better_stderr = 0.0;
    int64_t samples = 0;
    uint64_t seed = 0;
};

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Smallest kappa in {1, 2, 4, ...} with both tails <= 0.05 and the
// better-than-half estimate >= 0.52. Requires s^2 > d. Throws
// CalibrationError when no grid value qualifies.
KappaCalibration calibrate_kappa(double d, double s, int R, int64_t samples, uint64_t seed);

}  // namespace nbc
