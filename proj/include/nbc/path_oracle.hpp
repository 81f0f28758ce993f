#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nbc/sbm.hpp"

// Exhaustive ground-truth machinery for paths in the complete graph:
// enumeration, exact weights and expectations, edge classification, SAW
// decompositions and tangle detection. Everything here is exponential-time
// by design and guarded by size caps; it exists to verify the fast engine
// and the model's moment formulas on tiny instances.

namespace nbc {

namespace oracle_caps {
inline constexpr int kMaxVertices = 12;
inline constexpr int kMaxLength = 8;
inline constexpr int kMaxExpectationEdges = 20;
inline constexpr int kMaxTangleEdges = 20;
}  // namespace oracle_caps

// Per-step classification of a path u_0..u_k. A step (u_i, u_{i+1}) is
//   new        if u_{i+1} was not visited before,
//   old        if the undirected edge {u_i, u_{i+1}} was traversed before,
//   returning  otherwise (vertex revisited along a fresh edge).
// Always: k_new + k_old + k_ret = k, distinct vertices = k_new + 1,
// distinct edges = k_new + k_ret.
struct PathRecord {
    std::vector<int32_t> vertices;
    int k_new = 0;
    int k_old = 0;
    int k_ret = 0;
    int backtracks = 0;  // indices i with u_i == u_{i+2}

    int length() const { return static_cast<int>(vertices.size()) - 1; }
    int distinct_vertices() const { return k_new + 1; }
    int distinct_edges() const { return k_new + k_ret; }
};

PathRecord classify_edges(std::span<const int32_t> path);

// All non-backtracking sequences u_0=u,...,u_k=v over the complete graph
// on n vertices (u_i != u_{i-1}, u_i != u_{i+2}).
std::vector<std::vector<int32_t>> enumerate_nb_paths(int n, int k, int32_t u, int32_t v);

// Same, restricted to self-avoiding paths (all vertices distinct).
std::vector<std::vector<int32_t>> enumerate_saw_paths(int n, int k, int32_t u, int32_t v);

// prod over steps of W_e = 1{e in E(G)} - d/n.
double path_weight(const LabelledGraph& g, double d, std::span<const int32_t> path);

// N^{(k)}_{u,v} and Y_{u,v} by full enumeration. N^{(0)} = I.
double nb_sum_bruteforce(const LabelledGraph& g, double d, int k, int32_t u, int32_t v);
double saw_sum_bruteforce(const LabelledGraph& g, double d, int k, int32_t u, int32_t v);

// Dense N^{(0..k_max)} for all pairs at once (one DFS per start vertex;
// every prefix of a non-backtracking path is non-backtracking).
std::vector<std::vector<std::vector<double>>> nb_matrices_bruteforce(const LabelledGraph& g,
                                                                     double d, int k_max);

// Decomposition of a path into edge-disjoint segments with multiplicities.
// Segments are self-avoiding paths, except that a segment may close into a
// simple cycle (first == last vertex, interior distinct). Interior vertices
// of one segment appear in no other segment.
struct SawDecomposition {
    struct Segment {
        std::vector<int32_t> vertices;
        int multiplicity = 0;
        bool closed() const { return vertices.front() == vertices.back(); }
        int length() const { return static_cast<int>(vertices.size()) - 1; }
    };
    std::vector<Segment> segments;
    std::vector<int32_t> endpoints;  // V_end, sorted
};

// Cuts the path at every visit to V_end = cut_set + degree>=3 vertices +
// path endpoints + backtrack vertices, then removes duplicate segments
// (a segment and its reversal count as one traversal each).
SawDecomposition canonical_saw_decomposition(std::span<const int32_t> path,
                                             std::span<const int32_t> cut_set = {});

struct TangleReport {
    bool tangle_free = true;
    int32_t witness_vertex = -1;   // center of an offending neighborhood
    int witness_vertices = 0;      // |ball|
    int witness_edges = 0;         // edges induced on the ball
};

// A graph is ell-tangle-free iff every radius-ell neighborhood has at most
// one cycle. The induced ball around v is connected, so the test is
// edges(ball) <= |ball|.
TangleReport is_tangle_free(const LabelledGraph& g, int ell);

// Minimal total crossing multiplicity over distinct-edge subsets F of the
// path's multigraph whose removal leaves it ell-tangle-free. Exhaustive.
int tangle_count(std::span<const int32_t> path, int ell);

struct EndpointLabel {
    int32_t vertex;
    int8_t label;
};

// Exact E[prod_i prod_{e in zeta_i} W_e^{m_i} | sigma_{V_end}]: sums over
// all 2^#interior labellings, with the two edge outcomes (present/absent)
// folded in analytically per edge. Throws if labels are missing for any
// segment endpoint or the edge count exceeds the cap.
double exact_path_expectation(const SbmParams& params,
                              const SawDecomposition& decomposition,
                              std::span<const EndpointLabel> endpoint_labels);

}  // namespace nbc
