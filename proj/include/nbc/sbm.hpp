#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace nbc {

// Two-community stochastic block model parameters. d and s are always
// derived from (a, b), never stored, so the identities d = (a+b)/2 and
// s = (a-b)/2 hold exactly. s may be negative (b > a); clustering
// additionally requires s^2 > d, which is checked where it matters.
struct SbmParams {
    int64_t n = 0;
    double a = 0.0;  // within-class rate, edge probability a/n
    double b = 0.0;  // between-class rate, edge probability b/n

    double d() const { return 0.5 * (a + b); }
    double s() const { return 0.5 * (a - b); }

    // throws std::invalid_argument on out-of-range parameters
    void validate() const;
};

// Sparse undirected simple graph with optional hidden +-1 labels.
// Immutable after construction; adjacency is CSR with sorted neighbor
// lists, safe to share across threads.
class LabelledGraph {
public:
    LabelledGraph() = default;

    // edges may be in any order; (u,v) and (v,u) are the same edge and
    // duplicates/self-loops are rejected.
    static LabelledGraph from_edges(int64_t n,
                                    std::span<const std::pair<int32_t, int32_t>> edges,
                                    std::vector<int8_t> labels = {});

    int64_t n() const { return static_cast<int64_t>(offsets_.empty() ? 0 : offsets_.size() - 1); }
    int64_t edge_count() const { return static_cast<int64_t>(neighbors_.size()) / 2; }

    std::span<const int32_t> neighbors(int32_t v) const {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }
    int32_t degree(int32_t v) const {
        return static_cast<int32_t>(offsets_[v + 1] - offsets_[v]);
    }
    bool has_edge(int32_t u, int32_t v) const;

    bool has_labels() const { return !labels_.empty(); }
    std::span<const int8_t> labels() const { return labels_; }
    void set_labels(std::vector<int8_t> labels);
    void clear_labels() { labels_.clear(); }

    std::vector<std::pair<int32_t, int32_t>> edges() const;

private:
    std::vector<int64_t> offsets_;
    std::vector<int32_t> neighbors_;
    std::vector<int8_t> labels_;
};

// Samples G(n, a/n, b/n) with i.i.d. uniform +-1 labels. Expected O(n d)
// work via geometric skipping over the pair index within each label-class
// block, so n up to 10^6 stays in seconds.
LabelledGraph sample_sbm(const SbmParams& params, uint64_t seed);

// |1/n sum_v sigma_v tau_v|; invariant under a global sign flip of either
// argument. Throws on length mismatch or entries outside {-1, +1}.
double overlap(std::span<const int8_t> sigma, std::span<const int8_t> tau);

// Vertices at graph distance <= r from v, sorted. ball(g, v, 0) = {v}.
std::vector<int32_t> ball(const LabelledGraph& g, int32_t v, int r);

struct InducedSubgraph {
    LabelledGraph graph;
    std::vector<int32_t> to_original;    // new index -> original vertex
    std::vector<int32_t> from_original;  // original vertex -> new index, -1 if dropped
};

// Subgraph on `keep` (kept in sorted original order) with both-endpoint
// edges; labels restricted when present.
InducedSubgraph induced_subgraph(const LabelledGraph& g, std::span<const int32_t> keep);

// Edge-list file: one "u v" per line, 0-based, u < v, no header.
// Label file: one +-1 per line, line i = vertex i.
// The edge list carries no vertex count; pass n_hint to keep trailing
// isolated vertices.
void write_edge_list(const LabelledGraph& g, const std::string& path);
LabelledGraph read_edge_list(const std::string& path, int64_t n_hint = -1);
void write_labels(std::span<const int8_t> labels, const std::string& path);
std::vector<int8_t> read_labels(const std::string& path);

}  // namespace nbc
