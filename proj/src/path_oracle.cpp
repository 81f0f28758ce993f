#include "nbc/path_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace nbc {

namespace {

std::pair<int32_t, int32_t> norm_edge(int32_t u, int32_t v) {
    return u < v ? std::pair{u, v} : std::pair{v, u};
}

void check_enumeration_caps(int n, int k) {
    if (n < 2 || n > oracle_caps::kMaxVertices)
        throw std::invalid_argument("path oracle: vertex count outside [2, cap]");
    if (k < 0 || k > oracle_caps::kMaxLength)
        throw std::invalid_argument("path oracle: length outside [0, cap]");
}

}  // namespace

PathRecord classify_edges(std::span<const int32_t> path) {
    if (path.empty()) throw std::invalid_argument("classify_edges: empty path");
    PathRecord rec;
    rec.vertices.assign(path.begin(), path.end());
    std::set<int32_t> visited{path[0]};
    std::set<std::pair<int32_t, int32_t>> traversed;
    for (size_t i = 1; i < path.size(); ++i) {
        if (path[i] == path[i - 1])
            throw std::invalid_argument("classify_edges: consecutive duplicate vertex");
        const auto e = norm_edge(path[i - 1], path[i]);
        if (!visited.count(path[i])) {
            ++rec.k_new;
        } else if (traversed.count(e)) {
            ++rec.k_old;
        } else {
            ++rec.k_ret;
        }
        visited.insert(path[i]);
        traversed.insert(e);
    }
    for (size_t i = 0; i + 2 < path.size(); ++i)
        if (path[i] == path[i + 2]) ++rec.backtracks;
    return rec;
}

namespace {

void dfs_nb(int n, int k, int32_t target, std::vector<int32_t>& path,
            std::vector<std::vector<int32_t>>& out, bool self_avoiding) {
    const int len = static_cast<int>(path.size()) - 1;
    if (len == k) {
        if (path.back() == target) out.push_back(path);
        return;
    }
    const int32_t prev = path.back();
    const int32_t prev2 = path.size() >= 2 ? path[path.size() - 2] : -1;
    for (int32_t w = 0; w < n; ++w) {
        if (w == prev || w == prev2) continue;
        if (self_avoiding && std::find(path.begin(), path.end(), w) != path.end()) continue;
        path.push_back(w);
        dfs_nb(n, k, target, path, out, self_avoiding);
        path.pop_back();
    }
}

}  // namespace

std::vector<std::vector<int32_t>> enumerate_nb_paths(int n, int k, int32_t u, int32_t v) {
    check_enumeration_caps(n, k);
    if (u < 0 || u >= n || v < 0 || v >= n)
        throw std::out_of_range("enumerate_nb_paths: endpoint out of range");
    std::vector<std::vector<int32_t>> out;
    if (k == 0) {
        if (u == v) out.push_back({u});
        return out;
    }
    std::vector<int32_t> path{u};
    dfs_nb(n, k, v, path, out, false);
    return out;
}

std::vector<std::vector<int32_t>> enumerate_saw_paths(int n, int k, int32_t u, int32_t v) {
    check_enumeration_caps(n, k);
    if (u < 0 || u >= n || v < 0 || v >= n)
        throw std::out_of_range("enumerate_saw_paths: endpoint out of range");
    std::vector<std::vector<int32_t>> out;
    if (k == 0) {
        if (u == v) out.push_back({u});
        return out;
    }
    if (u == v || k >= n) return out;  // no room for k+1 distinct vertices
    std::vector<int32_t> path{u};
    dfs_nb(n, k, v, path, out, true);
    return out;
}

double path_weight(const LabelledGraph& g, double d, std::span<const int32_t> path) {
    const double c = d / static_cast<double>(g.n());
    double w = 1.0;
    for (size_t i = 1; i < path.size(); ++i) {
        if (path[i] == path[i - 1])
            throw std::invalid_argument("path_weight: consecutive duplicate vertex");
        w *= g.has_edge(path[i - 1], path[i]) ? 1.0 - c : -c;
    }
    return w;
}

double nb_sum_bruteforce(const LabelledGraph& g, double d, int k, int32_t u, int32_t v) {
    double acc = 0.0;
    for (const auto& path : enumerate_nb_paths(static_cast<int>(g.n()), k, u, v))
        acc += path_weight(g, d, path);
    return acc;
}

double saw_sum_bruteforce(const LabelledGraph& g, double d, int k, int32_t u, int32_t v) {
    double acc = 0.0;
    for (const auto& path : enumerate_saw_paths(static_cast<int>(g.n()), k, u, v))
        acc += path_weight(g, d, path);
    return acc;
}

namespace {

void dfs_weighted(const LabelledGraph& g, double c, int k_max,
                  std::vector<int32_t>& path, double weight,
                  std::vector<std::vector<std::vector<double>>>& acc) {
    const int len = static_cast<int>(path.size()) - 1;
    acc[len][path[0]][path.back()] += weight;
    if (len == k_max) return;
    const int32_t prev = path.back();
    const int32_t prev2 = path.size() >= 2 ? path[path.size() - 2] : -1;
    for (int32_t w = 0; w < g.n(); ++w) {
        if (w == prev || w == prev2) continue;
        path.push_back(w);
        dfs_weighted(g, c, k_max, path,
                     weight * (g.has_edge(prev, w) ? 1.0 - c : -c), acc);
        path.pop_back();
    }
}

}  // namespace

std::vector<std::vector<std::vector<double>>> nb_matrices_bruteforce(const LabelledGraph& g,
                                                                     double d, int k_max) {
    const int n = static_cast<int>(g.n());
    check_enumeration_caps(n, k_max);
    std::vector result(static_cast<size_t>(k_max) + 1,
                       std::vector(static_cast<size_t>(n), std::vector<double>(n, 0.0)));
    const double c = d / static_cast<double>(n);
    for (int32_t u = 0; u < n; ++u) {
        std::vector<int32_t> path{u};
        dfs_weighted(g, c, k_max, path, 1.0, result);
    }
    return result;
}

SawDecomposition canonical_saw_decomposition(std::span<const int32_t> path,
                                             std::span<const int32_t> cut_set) {
    const PathRecord rec = classify_edges(path);  // validates the path
    const int k = rec.length();

    // V_end = cut_set + degree>=3 vertices + endpoints + backtrack vertices
    std::set<int32_t> v_end(cut_set.begin(), cut_set.end());
    v_end.insert(path.front());
    v_end.insert(path.back());
    for (size_t i = 0; i + 2 < path.size(); ++i)
        if (path[i] == path[i + 2]) v_end.insert(path[i + 1]);
    std::map<int32_t, std::set<int32_t>> adjacency;
    for (int i = 0; i < k; ++i) {
        adjacency[path[i]].insert(path[i + 1]);
        adjacency[path[i + 1]].insert(path[i]);
    }
    for (const auto& [v, nbrs] : adjacency)
        if (nbrs.size() >= 3) v_end.insert(v);

    // cut at every visit to V_end
    std::vector<std::vector<int32_t>> pieces;
    std::vector<int32_t> current{path[0]};
    for (size_t i = 1; i < path.size(); ++i) {
        current.push_back(path[i]);
        if (v_end.count(path[i])) {
            pieces.push_back(std::move(current));
            current = {path[i]};
        }
    }
    if (current.size() > 1)
        throw std::logic_error("canonical_saw_decomposition: path did not end on V_end");

    SawDecomposition out;
    out.endpoints.assign(v_end.begin(), v_end.end());
    std::map<std::vector<int32_t>, size_t> index_of;
    for (auto& piece : pieces) {
        std::vector<int32_t> key = piece;
        std::vector<int32_t> reversed(piece.rbegin(), piece.rend());
        if (reversed < key) key = reversed;
        auto [it, inserted] = index_of.try_emplace(key, out.segments.size());
        if (inserted)
            out.segments.push_back({std::move(piece), 1});
        else
            ++out.segments[it->second].multiplicity;
    }

    for (const auto& seg : out.segments) {
        std::set<int32_t> distinct(seg.vertices.begin(), seg.vertices.end());
        const size_t expected = seg.closed() ? seg.vertices.size() - 1 : seg.vertices.size();
        if (distinct.size() != expected)
            throw std::logic_error("canonical_saw_decomposition: segment is neither a SAW nor a simple cycle");
    }
    return out;
}

TangleReport is_tangle_free(const LabelledGraph& g, int ell) {
    if (ell < 1) throw std::invalid_argument("is_tangle_free: ell must be >= 1");
    // timestamped marks: one pass per vertex, O(ball size) each, no
    // per-vertex allocation (this runs on n = 10^5 graphs)
    std::vector<int32_t> mark(static_cast<size_t>(g.n()), -1);
    std::vector<int32_t> ball_buf, frontier, next;
    for (int32_t v = 0; v < g.n(); ++v) {
        ball_buf.assign(1, v);
        frontier.assign(1, v);
        mark[v] = v;
        for (int depth = 0; depth < ell && !frontier.empty(); ++depth) {
            next.clear();
            for (int32_t u : frontier) {
                for (int32_t w : g.neighbors(u)) {
                    if (mark[w] != v) {
                        mark[w] = v;
                        next.push_back(w);
                        ball_buf.push_back(w);
                    }
                }
            }
            std::swap(frontier, next);
        }
        // the induced ball is connected, so more edges than vertices means
        // a second cycle
        int edges = 0;
        for (int32_t u : ball_buf)
            for (int32_t w : g.neighbors(u))
                if (w > u && mark[w] == v) ++edges;
        if (edges > static_cast<int>(ball_buf.size())) {
            TangleReport rep;
            rep.tangle_free = false;
            rep.witness_vertex = v;
            rep.witness_vertices = static_cast<int>(ball_buf.size());
            rep.witness_edges = edges;
            return rep;
        }
    }
    return TangleReport{};
}

int tangle_count(std::span<const int32_t> path, int ell) {
    classify_edges(path);  // validates

    // compact the path's distinct edges with crossing multiplicities
    std::map<std::pair<int32_t, int32_t>, int> multiplicity;
    std::map<int32_t, int32_t> compact;
    for (int32_t v : path) compact.emplace(v, 0);
    int32_t next_id = 0;
    for (auto& [v, id] : compact) id = next_id++;
    for (size_t i = 1; i < path.size(); ++i)
        ++multiplicity[norm_edge(compact[path[i - 1]], compact[path[i]])];

    std::vector<std::pair<int32_t, int32_t>> edge_list;
    std::vector<int> mult;
    for (const auto& [e, m] : multiplicity) {
        edge_list.push_back(e);
        mult.push_back(m);
    }
    const int e_count = static_cast<int>(edge_list.size());
    if (e_count > oracle_caps::kMaxTangleEdges)
        throw std::invalid_argument("tangle_count: too many distinct edges for exhaustive search");

    const int n_compact = next_id;
    int best = 0;
    for (int m : mult) best += m;  // deleting everything is always tangle-free
    for (uint32_t mask = 0; mask < (1u << e_count); ++mask) {
        int cost = 0;
        std::vector<std::pair<int32_t, int32_t>> kept;
        for (int i = 0; i < e_count; ++i) {
            if (mask & (1u << i))
                cost += mult[i];
            else
                kept.push_back(edge_list[i]);
        }
        if (cost >= best) continue;
        const auto sub = LabelledGraph::from_edges(n_compact, kept);
        if (is_tangle_free(sub, ell).tangle_free) best = cost;
    }
    return best;
}

double exact_path_expectation(const SbmParams& params,
                              const SawDecomposition& decomposition,
                              std::span<const EndpointLabel> endpoint_labels) {
    params.validate();
    const double n = static_cast<double>(params.n);
    const double c = params.d() / n;
    const double s = params.s();
    const double d = params.d();

    std::map<int32_t, int8_t> fixed;
    for (const auto& [v, lab] : endpoint_labels) {
        if (lab != 1 && lab != -1)
            throw std::invalid_argument("exact_path_expectation: label outside {-1,+1}");
        fixed[v] = lab;
    }

    struct EdgeTerm {
        int32_t u, v;
        int m;
    };
    std::vector<EdgeTerm> edges;
    std::set<std::pair<int32_t, int32_t>> seen;
    std::set<int32_t> interior;
    for (const auto& seg : decomposition.segments) {
        if (seg.vertices.size() < 2)
            throw std::invalid_argument("exact_path_expectation: degenerate segment");
        if (!fixed.count(seg.vertices.front()) || !fixed.count(seg.vertices.back()))
            throw std::invalid_argument("exact_path_expectation: missing endpoint label");
        for (size_t i = 1; i < seg.vertices.size(); ++i) {
            const auto e = norm_edge(seg.vertices[i - 1], seg.vertices[i]);
            if (!seen.insert(e).second)
                throw std::invalid_argument("exact_path_expectation: segments are not edge-disjoint");
            edges.push_back({e.first, e.second, seg.multiplicity});
        }
        for (size_t i = 1; i + 1 < seg.vertices.size(); ++i)
            if (!fixed.count(seg.vertices[i])) interior.insert(seg.vertices[i]);
    }
    if (static_cast<int>(edges.size()) > oracle_caps::kMaxExpectationEdges)
        throw std::invalid_argument("exact_path_expectation: too many edges for exhaustive sum");

    std::vector<int32_t> interior_list(interior.begin(), interior.end());
    const size_t bits = interior_list.size();

    double total = 0.0;
    std::map<int32_t, int8_t> sigma = fixed;
    for (uint64_t assignment = 0; assignment < (uint64_t{1} << bits); ++assignment) {
        for (size_t i = 0; i < bits; ++i)
            sigma[interior_list[i]] = (assignment >> i) & 1 ? int8_t{1} : int8_t{-1};
        double prod = 1.0;
        for (const auto& [u, v, m] : edges) {
            const double p = (d + static_cast<double>(sigma[u]) * sigma[v] * s) / n;
            prod *= p * std::pow(1.0 - c, m) + (1.0 - p) * std::pow(-c, m);
        }
        total += prod;
    }
    return total / static_cast<double>(uint64_t{1} << bits);
}

}  // namespace nbc
