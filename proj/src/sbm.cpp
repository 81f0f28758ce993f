#include "nbc/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "nbc/rng.hpp"

namespace nbc {

void SbmParams::validate() const {
    if (n <= 0) throw std::invalid_argument("SbmParams: n must be positive");
    if (!(a >= 0.0) || !(b >= 0.0))
        throw std::invalid_argument("SbmParams: rates must be nonnegative");
    if (a >= static_cast<double>(n) || b >= static_cast<double>(n))
        throw std::invalid_argument("SbmParams: a/n and b/n must lie in [0, 1)");
}

LabelledGraph LabelledGraph::from_edges(int64_t n,
                                        std::span<const std::pair<int32_t, int32_t>> edges,
                                        std::vector<int8_t> labels) {
    if (n < 0) throw std::invalid_argument("LabelledGraph: negative vertex count");
    LabelledGraph g;
    std::vector<int32_t> deg(static_cast<size_t>(n), 0);
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::out_of_range("LabelledGraph: edge endpoint out of range");
        if (u == v) throw std::invalid_argument("LabelledGraph: self-loop");
        ++deg[u];
        ++deg[v];
    }
    g.offsets_.assign(static_cast<size_t>(n) + 1, 0);
    for (int64_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
    g.neighbors_.resize(static_cast<size_t>(g.offsets_[n]));
    std::vector<int64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.neighbors_[cursor[u]++] = v;
        g.neighbors_[cursor[v]++] = u;
    }
    for (int64_t v = 0; v < n; ++v) {
        auto begin = g.neighbors_.begin() + g.offsets_[v];
        auto end = g.neighbors_.begin() + g.offsets_[v + 1];
        std::sort(begin, end);
        if (std::adjacent_find(begin, end) != end)
            throw std::invalid_argument("LabelledGraph: duplicate edge");
    }
    if (!labels.empty()) g.set_labels(std::move(labels));
    return g;
}

bool LabelledGraph::has_edge(int32_t u, int32_t v) const {
    auto adj = neighbors(u);
    return std::binary_search(adj.begin(), adj.end(), v);
}

void LabelledGraph::set_labels(std::vector<int8_t> labels) {
    if (static_cast<int64_t>(labels.size()) != n())
        throw std::invalid_argument("LabelledGraph: label count != vertex count");
    for (int8_t x : labels)
        if (x != 1 && x != -1) throw std::invalid_argument("LabelledGraph: label not in {-1,+1}");
    labels_ = std::move(labels);
}

std::vector<std::pair<int32_t, int32_t>> LabelledGraph::edges() const {
    std::vector<std::pair<int32_t, int32_t>> out;
    out.reserve(static_cast<size_t>(edge_count()));
    for (int32_t v = 0; v < n(); ++v)
        for (int32_t w : neighbors(v))
            if (v < w) out.emplace_back(v, w);
    return out;
}

namespace {

// Visits each index of [0, total) independently with probability p, in
// increasing order, via geometric gaps.
template <typename Fn>
void geometric_scan(int64_t total, double p, Rng& rng, Fn&& fn) {
    if (total <= 0 || p <= 0.0) return;
    if (p >= 1.0) {
        for (int64_t t = 0; t < total; ++t) fn(t);
        return;
    }
    const double log_q = std::log1p(-p);
    int64_t t = -1;
    for (;;) {
        const double u = 1.0 - rng.uniform01();  // (0, 1]
        const double gap = std::floor(std::log(u) / log_q);
        if (gap > static_cast<double>(total)) break;
        t += 1 + static_cast<int64_t>(gap);
        if (t >= total) break;
        fn(t);
    }
}

// index of an unordered pair within one class: t in [0, m(m-1)/2) -> (i, j), j < i
std::pair<int64_t, int64_t> unrank_pair(int64_t t) {
    auto i = static_cast<int64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(t))) / 2.0);
    while (i * (i - 1) / 2 > t) --i;
    while ((i + 1) * i / 2 <= t) ++i;
    return {i, t - i * (i - 1) / 2};
}

}  // namespace

LabelledGraph sample_sbm(const SbmParams& params, uint64_t seed) {
    params.validate();
    const int64_t n = params.n;

    Rng label_rng(seed, 0);
    std::vector<int8_t> labels(static_cast<size_t>(n));
    for (auto& x : labels) x = label_rng.sign();

    std::vector<int32_t> plus, minus;
    for (int64_t v = 0; v < n; ++v)
        (labels[v] == 1 ? plus : minus).push_back(static_cast<int32_t>(v));

    std::vector<std::pair<int32_t, int32_t>> edges;
    edges.reserve(static_cast<size_t>(params.d() * static_cast<double>(n) / 2 + 16));

    Rng edge_rng(seed, 1);
    const double p_in = params.a / static_cast<double>(n);
    const double p_out = params.b / static_cast<double>(n);

    for (const auto* cls : {&plus, &minus}) {
        const auto m = static_cast<int64_t>(cls->size());
        geometric_scan(m * (m - 1) / 2, p_in, edge_rng, [&](int64_t t) {
            auto [i, j] = unrank_pair(t);
            edges.emplace_back((*cls)[j], (*cls)[i]);
        });
    }
    const auto np = static_cast<int64_t>(plus.size());
    const auto nm = static_cast<int64_t>(minus.size());
    if (np > 0 && nm > 0) {
        geometric_scan(np * nm, p_out, edge_rng, [&](int64_t t) {
            edges.emplace_back(plus[t / nm], minus[t % nm]);
        });
    }
    return LabelledGraph::from_edges(n, edges, std::move(labels));
}

double overlap(std::span<const int8_t> sigma, std::span<const int8_t> tau) {
    if (sigma.size() != tau.size())
        throw std::invalid_argument("overlap: length mismatch");
    if (sigma.empty()) throw std::invalid_argument("overlap: empty labelling");
    int64_t acc = 0;
    for (size_t i = 0; i < sigma.size(); ++i) {
        if ((sigma[i] != 1 && sigma[i] != -1) || (tau[i] != 1 && tau[i] != -1))
            throw std::invalid_argument("overlap: entry outside {-1,+1}");
        acc += static_cast<int64_t>(sigma[i]) * tau[i];
    }
    return std::abs(static_cast<double>(acc)) / static_cast<double>(sigma.size());
}

std::vector<int32_t> ball(const LabelledGraph& g, int32_t v, int r) {
    if (v < 0 || v >= g.n()) throw std::out_of_range("ball: vertex out of range");
    if (r < 0) throw std::invalid_argument("ball: negative radius");
    std::vector<int32_t> out{v};
    std::vector<int8_t> seen(static_cast<size_t>(g.n()), 0);
    seen[v] = 1;
    std::vector<int32_t> frontier{v};
    for (int depth = 0; depth < r && !frontier.empty(); ++depth) {
        std::vector<int32_t> next;
        for (int32_t u : frontier) {
            for (int32_t w : g.neighbors(u)) {
                if (!seen[w]) {
                    seen[w] = 1;
                    next.push_back(w);
                    out.push_back(w);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

InducedSubgraph induced_subgraph(const LabelledGraph& g, std::span<const int32_t> keep) {
    InducedSubgraph result;
    result.to_original.assign(keep.begin(), keep.end());
    std::sort(result.to_original.begin(), result.to_original.end());
    result.to_original.erase(
        std::unique(result.to_original.begin(), result.to_original.end()),
        result.to_original.end());
    result.from_original.assign(static_cast<size_t>(g.n()), -1);
    for (size_t i = 0; i < result.to_original.size(); ++i) {
        const int32_t v = result.to_original[i];
        if (v < 0 || v >= g.n()) throw std::out_of_range("induced_subgraph: vertex out of range");
        result.from_original[v] = static_cast<int32_t>(i);
    }
    std::vector<std::pair<int32_t, int32_t>> edges;
    for (int32_t v : result.to_original) {
        const int32_t nv = result.from_original[v];
        for (int32_t w : g.neighbors(v)) {
            const int32_t nw = result.from_original[w];
            if (nw >= 0 && nv < nw) edges.emplace_back(nv, nw);
        }
    }
    std::vector<int8_t> labels;
    if (g.has_labels()) {
        labels.reserve(result.to_original.size());
        for (int32_t v : result.to_original) labels.push_back(g.labels()[v]);
    }
    result.graph = LabelledGraph::from_edges(
        static_cast<int64_t>(result.to_original.size()), edges, std::move(labels));
    return result;
}

void write_edge_list(const LabelledGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (int32_t v = 0; v < g.n(); ++v)
        for (int32_t w : g.neighbors(v))
            if (v < w) out << v << ' ' << w << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

LabelledGraph read_edge_list(const std::string& path, int64_t n_hint) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::pair<int32_t, int32_t>> edges;
    int64_t max_v = -1;
    int64_t u, v;
    while (in >> u >> v) {
        if (u < 0 || v < 0 || u >= v)
            throw std::runtime_error("edge list: expected 0-based pairs with u < v in " + path);
        edges.emplace_back(static_cast<int32_t>(u), static_cast<int32_t>(v));
        max_v = std::max(max_v, v);
    }
    return LabelledGraph::from_edges(std::max(max_v + 1, n_hint), edges);
}

void write_labels(std::span<const int8_t> labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (int8_t x : labels) out << static_cast<int>(x) << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<int8_t> read_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<int8_t> labels;
    std::string tok;
    while (in >> tok) {
        if (tok == "1" || tok == "+1")
            labels.push_back(1);
        else if (tok == "-1")
            labels.push_back(-1);
        else
            throw std::runtime_error("label file: entry '" + tok + "' not +-1 in " + path);
    }
    return labels;
}

}  // namespace nbc
