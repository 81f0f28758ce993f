#pragma once

#include <vector>

#include "nbc/sbm.hpp"

// Dense materializations of the block operator recursion at tiny n, built
// from brute-force path enumeration. This is the oracle side of the engine
// checks; never use it beyond the enumeration caps.

namespace nbc {

using DenseMatrix = std::vector<std::vector<double>>;

DenseMatrix dense_identity(int n);
DenseMatrix dense_multiply(const DenseMatrix& a, const DenseMatrix& b);
std::vector<double> dense_apply(const DenseMatrix& a, const std::vector<double>& x);

// the 4n x 4n operators of the powering recursion
DenseMatrix dense_m_operator(const LabelledGraph& g, double offset);
DenseMatrix dense_m_hat_operator(const LabelledGraph& g, double offset);

// N^{(0..k_max)} from brute-force enumeration
std::vector<DenseMatrix> dense_n_matrices(const LabelledGraph& g, double offset, int k_max);

// Q^{(k,rho)} = sum_j rho^{2j} N^{(k-2j)}, zero for k < 0
DenseMatrix dense_q_matrix(const std::vector<DenseMatrix>& n_mats, double rho, int k);

// the 4n x n stack (Q^{(k,1-c)}; Q^{(k-1,1-c)}; Q^{(k,-c)}; Q^{(k-1,-c)})
DenseMatrix dense_q_stack(const std::vector<DenseMatrix>& n_mats, double offset, int k);

}  // namespace nbc
