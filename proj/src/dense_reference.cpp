#include "nbc/dense_reference.hpp"

#include <stdexcept>

#include "nbc/path_oracle.hpp"

namespace nbc {

DenseMatrix dense_identity(int n) {
    DenseMatrix m(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) m[i][i] = 1.0;
    return m;
}

DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b) {
    const size_t rows = a.size(), inner = b.size(), cols = b[0].size();
    if (a[0].size() != inner) throw std::invalid_argument("dense_multiply: shape mismatch");
    DenseMatrix out(rows, std::vector<double>(cols, 0.0));
    for (size_t i = 0; i < rows; ++i)
        for (size_t k = 0; k < inner; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (size_t j = 0; j < cols; ++j) out[i][j] += aik * b[k][j];
        }
    return out;
}

std::vector<double> dense_apply(const DenseMatrix& a, const std::vector<double>& x) {
    std::vector<double> out(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < x.size(); ++j) out[i] += a[i][j] * x[j];
    return out;
}

namespace {

// writes `block` into the (bi, bj) block of a 4n x 4n matrix
void put_block(DenseMatrix& big, const DenseMatrix& block, int bi, int bj, double factor) {
    const size_t n = block.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) big[bi * n + i][bj * n + j] = factor * block[i][j];
}

struct Blocks {
    DenseMatrix adjacency, degree, ones, identity;
};

Blocks base_blocks(const LabelledGraph& g) {
    const int n = static_cast<int>(g.n());
    Blocks b;
    b.adjacency.assign(n, std::vector<double>(n, 0.0));
    b.degree.assign(n, std::vector<double>(n, 0.0));
    b.ones.assign(n, std::vector<double>(n, 1.0));
    b.identity = dense_identity(n);
    for (int32_t v = 0; v < n; ++v) {
        b.degree[v][v] = g.degree(v);
        for (int32_t w : g.neighbors(v)) b.adjacency[v][w] = 1.0;
    }
    return b;
}

DenseMatrix scaled_sum(const DenseMatrix& a, double fa, const DenseMatrix& b, double fb) {
    DenseMatrix out = a;
    for (size_t i = 0; i < out.size(); ++i)
        for (size_t j = 0; j < out[i].size(); ++j) out[i][j] = fa * a[i][j] + fb * b[i][j];
    return out;
}

}  // namespace

DenseMatrix dense_m_operator(const LabelledGraph& g, double offset) {
    const int n = static_cast<int>(g.n());
    const double c = offset;
    const Blocks b = base_blocks(g);
    DenseMatrix m(4 * n, std::vector<double>(4 * n, 0.0));

    // ones - A - I  and  (n-1)I - D, (n-2)I - D
    DenseMatrix ones_a = b.ones;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ones_a[i][j] -= b.adjacency[i][j] + b.identity[i][j];

    put_block(m, b.adjacency, 0, 0, 1.0 - c);
    put_block(m, scaled_sum(b.degree, 1.0, b.identity, -1.0), 0, 1, -(1.0 - c) * (1.0 - c));
    put_block(m, ones_a, 0, 2, -c);
    put_block(m, scaled_sum(b.identity, n - 1.0, b.degree, -1.0), 0, 3, -c * c);

    put_block(m, b.identity, 1, 0, 1.0);

    put_block(m, b.adjacency, 2, 0, 1.0 - c);
    put_block(m, b.degree, 2, 1, -(1.0 - c) * (1.0 - c));
    put_block(m, ones_a, 2, 2, -c);
    put_block(m, scaled_sum(b.identity, n - 2.0, b.degree, -1.0), 2, 3, -c * c);

    put_block(m, b.identity, 3, 2, 1.0);
    return m;
}

DenseMatrix dense_m_hat_operator(const LabelledGraph& g, double offset) {
    const int n = static_cast<int>(g.n());
    const double c = offset;
    const Blocks b = base_blocks(g);
    DenseMatrix m(4 * n, std::vector<double>(4 * n, 0.0));

    DenseMatrix ones_a = b.ones;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) ones_a[i][j] -= b.adjacency[i][j] + b.identity[i][j];

    put_block(m, b.adjacency, 0, 0, 1.0 - c);
    put_block(m, b.degree, 0, 1, -(1.0 - c) * (1.0 - c));
    put_block(m, ones_a, 0, 2, -c);
    put_block(m, scaled_sum(b.identity, n - 1.0, b.degree, -1.0), 0, 3, -c * c);
    return m;
}

std::vector<DenseMatrix> dense_n_matrices(const LabelledGraph& g, double offset, int k_max) {
    const double d = offset * static_cast<double>(g.n());
    return nb_matrices_bruteforce(g, d, k_max);
}

DenseMatrix dense_q_matrix(const std::vector<DenseMatrix>& n_mats, double rho, int k) {
    const int n = static_cast<int>(n_mats[0].size());
    DenseMatrix q(n, std::vector<double>(n, 0.0));
    if (k < 0) return q;
    if (k >= static_cast<int>(n_mats.size()))
        throw std::invalid_argument("dense_q_matrix: k beyond available N matrices");
    double rho_pow = 1.0;
    for (int j = 0; 2 * j <= k; ++j) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) q[r][c] += rho_pow * n_mats[k - 2 * j][r][c];
        rho_pow *= rho * rho;
    }
    return q;
}

DenseMatrix dense_q_stack(const std::vector<DenseMatrix>& n_mats, double offset, int k) {
    const int n = static_cast<int>(n_mats[0].size());
    const DenseMatrix q1 = dense_q_matrix(n_mats, 1.0 - offset, k);
    const DenseMatrix q2 = dense_q_matrix(n_mats, 1.0 - offset, k - 1);
    const DenseMatrix q3 = dense_q_matrix(n_mats, -offset, k);
    const DenseMatrix q4 = dense_q_matrix(n_mats, -offset, k - 1);
    DenseMatrix stack(4 * n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            stack[i][j] = q1[i][j];
            stack[n + i][j] = q2[i][j];
            stack[2 * n + i][j] = q3[i][j];
            stack[3 * n + i][j] = q4[i][j];
        }
    return stack;
}

}  // namespace nbc
