#pragma once

#include <stdexcept>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/transforms.hpp"

namespace kaczmarz {

/// L_alpha = slt(A A^T) + alpha^{-1} diag(A A^T); one triangular solve with
/// it expresses a full cycle of the cyclic method on a transformed problem.
struct SweepOperator {
    DenseMat l_alpha;  // lower triangular, m x m
    double alpha = 1.0;
};

inline SweepOperator build_sweep_operator(const SparseRowMat& a, double alpha) {
    const std::size_t m = a.rows();
    if (m > 2000) throw std::invalid_argument("build_sweep_operator: m exceeds 2000 guard");
    if (!(alpha > 0.0)) throw std::invalid_argument("build_sweep_operator: alpha must be positive");
    DenseMat l(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::vector<double> col = a.times_own_row_transposed(i);  // (A A^T)_{:, i}
        if (col[i] <= 0.0)
            throw std::invalid_argument("build_sweep_operator: zero row in A");
        l(i, i) = col[i] / alpha;
        for (std::size_t j = i + 1; j < m; ++j) l(j, i) = col[j];
    }
    return {std::move(l), alpha};
}

/// Forward substitution: solves L Y = Z column-wise.
inline DenseMat forward_solve(const SweepOperator& op, const DenseMat& z) {
    const std::size_t m = op.l_alpha.rows();
    if (z.rows() != m) throw std::invalid_argument("forward_solve: shape mismatch");
    DenseMat y(m, z.cols());
    for (std::size_t i = 0; i < m; ++i) {
        const double* li = op.l_alpha.row_ptr(i);
        for (std::size_t j = 0; j < z.cols(); ++j) {
            double acc = z(i, j);
            for (std::size_t k = 0; k < i; ++k) acc -= li[k] * y(k, j);
            y(i, j) = acc / li[i];
        }
    }
    return y;
}

/// Matrix formula for one full cycle on a transformed problem:
///   full column rank: X' = X + A^T L^{-1} (C_hat - A X Q) Q^T
///   full row rank:    X' = X + A^T L^{-1} (C_tilde - A X)
/// Equals m consecutive row steps in the order 1..m.
inline DenseMat sweep_formula_step(const DenseMat& x, const TransformedProblem& tp,
                                   const SweepOperator& op) {
    const Problem& pr = tp.problem;
    if (tp.form == BForm::FullCol) {
        const DenseMat res = pr.c - pr.a.times_dense(x) * pr.b;  // C_hat - A X Q
        const DenseMat y = forward_solve(op, res);
        return x + pr.a.transpose_times_dense(y * transpose(pr.b));
    }
    const DenseMat res = pr.c - pr.a.times_dense(x);  // C_tilde - A X
    const DenseMat y = forward_solve(op, res);
    return x + pr.a.transpose_times_dense(y);
}

}  // namespace kaczmarz
