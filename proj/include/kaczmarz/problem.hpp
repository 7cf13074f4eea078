#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/sparse_matrix.hpp"

namespace kaczmarz {

/// A consistent instance of A X B = C. A is m x p (sparse rows), B is q x n,
/// C is m x n, the unknown X is p x q. Immutable after construction and safe
/// to share across concurrent solves. An optional reference solution enables
/// RSE traces and stopping.
struct Problem {
    SparseRowMat a;
    DenseMat b;
    DenseMat c;
    std::optional<DenseMat> x_star;

    // cached row weights, ||A_{i,:}||^2 and their total
    std::vector<double> a_row_norms_sq;
    double a_fro_sq = 0.0;

    Problem(SparseRowMat a_in, DenseMat b_in, DenseMat c_in,
            std::optional<DenseMat> x_star_in = std::nullopt)
        : a(std::move(a_in)), b(std::move(b_in)), c(std::move(c_in)),
          x_star(std::move(x_star_in)) {
        if (a.rows() == 0 || a.cols() == 0 || b.rows() == 0 || b.cols() == 0)
            throw std::invalid_argument("problem: empty coefficient matrix");
        if (c.rows() != a.rows() || c.cols() != b.cols())
            throw std::invalid_argument("problem: C must be m x n");
        a_row_norms_sq = row_norms_squared(a);
        for (std::size_t i = 0; i < a_row_norms_sq.size(); ++i) {
            if (a_row_norms_sq[i] <= 0.0)
                throw std::invalid_argument("problem: zero row in A; omit it first");
            a_fro_sq += a_row_norms_sq[i];
        }
        if (x_star) {
            if (x_star->rows() != p() || x_star->cols() != q())
                throw std::invalid_argument("problem: x_star must be p x q");
            const double gap = frobenius_distance(a.times_dense(*x_star) * b, c);
            if (gap > 1.0e-8 * frobenius_norm(c))
                throw std::invalid_argument("problem: x_star does not solve AXB=C");
        }
    }

    std::size_t m() const noexcept { return a.rows(); }
    std::size_t p() const noexcept { return a.cols(); }
    std::size_t q() const noexcept { return b.rows(); }
    std::size_t n() const noexcept { return b.cols(); }

    /// R = C - A X B, recomputed from scratch.
    DenseMat residual(const DenseMat& x) const {
        DenseMat r = c;
        r -= a.times_dense(x) * b;
        return r;
    }
};

}  // namespace kaczmarz
