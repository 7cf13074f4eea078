#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/problem.hpp"

namespace kaczmarz {

/// Iterate of a row-action run: the current X, the maintained residual
/// R = C - A X B (greedy methods only), and the step counter.
struct IterateState {
    DenseMat x;
    DenseMat r;
    long k = 0;
    long last_row = -1;
};

namespace detail {

inline std::vector<double> rowvec_times(const std::vector<double>& u, const DenseMat& b) {
    std::vector<double> out(b.cols(), 0.0);
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double ui = u[i];
        if (ui == 0.0) continue;
        const double* bi = b.row_ptr(i);
        for (std::size_t j = 0; j < b.cols(); ++j) out[j] += ui * bi[j];
    }
    return out;
}

inline std::vector<double> rowvec_times_transpose(const std::vector<double>& w,
                                                  const DenseMat& b) {
    std::vector<double> out(b.rows(), 0.0);
    for (std::size_t i = 0; i < b.rows(); ++i) {
        const double* bi = b.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < b.cols(); ++j) s += w[j] * bi[j];
        out[i] = s;
    }
    return out;
}

inline double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// X += scale * A_{i,:}^T * t, scattering over the sparse row.
inline void scatter_rank_one(DenseMat& x, const SparseRowMat& a, std::size_t i,
                             double scale, const std::vector<double>& t) {
    for (std::size_t k = a.row_begin(i); k < a.row_end(i); ++k) {
        const double f = scale * a.value(k);
        double* xr = x.row_ptr(a.col_index(k));
        for (std::size_t j = 0; j < t.size(); ++j) xr[j] += f * t[j];
    }
}

}  // namespace detail

/// One Kaczmarz row action computed from the data: X gains
/// (alpha / ||A_i||^2) A_i^T ((C_i - A_i X B) B^T). Returns ||dX||_F,
/// the "norm of the rank-one update" stopping quantity.
inline double row_step(DenseMat& x, const Problem& pr, std::size_t i, double alpha) {
    const double nrm_sq = pr.a_row_norms_sq[i];
    std::vector<double> u = pr.a.row_times_dense(i, x);   // A_i X      (1 x q)
    std::vector<double> w = detail::rowvec_times(u, pr.b);  // A_i X B  (1 x n)
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = pr.c(i, j) - w[j];
    const std::vector<double> t = detail::rowvec_times_transpose(w, pr.b);  // 1 x q
    detail::scatter_rank_one(x, pr.a, i, alpha / nrm_sq, t);
    return alpha * detail::norm(t) / std::sqrt(nrm_sq);
}

/// Paired greedy update: the X step driven by the maintained residual row
/// (line 9 of the greedy algorithms) together with the rank-one residual
/// recurrence R -= (alpha / ||A_i||^2) (A A_i^T) ((R_i B^T) B) (line 10).
/// Returns ||dX||_F.
inline double residual_row_step(DenseMat& x, DenseMat& r, const Problem& pr,
                                std::size_t i, double alpha) {
    const double nrm_sq = pr.a_row_norms_sq[i];
    const double scale = alpha / nrm_sq;
    std::vector<double> ri(r.cols());
    for (std::size_t j = 0; j < r.cols(); ++j) ri[j] = r(i, j);
    const std::vector<double> t = detail::rowvec_times_transpose(ri, pr.b);  // R_i B^T
    detail::scatter_rank_one(x, pr.a, i, scale, t);
    const std::vector<double> tb = detail::rowvec_times(t, pr.b);       // (R_i B^T) B
    const std::vector<double> s = pr.a.times_own_row_transposed(i);     // A A_i^T
    for (std::size_t row = 0; row < r.rows(); ++row) {
        const double f = scale * s[row];
        if (f == 0.0) continue;
        double* rr = r.row_ptr(row);
        for (std::size_t j = 0; j < tb.size(); ++j) rr[j] -= f * tb[j];
    }
    return alpha * detail::norm(t) / std::sqrt(nrm_sq);
}

/// Full-gradient GI step X += alpha A^T (C - A X B) B^T, association order
/// chosen by the cheaper flop count. Returns ||dX||_F.
inline double gi_step(DenseMat& x, const Problem& pr, double alpha) {
    const double m = static_cast<double>(pr.m());
    const double p = static_cast<double>(pr.p());
    const double q = static_cast<double>(pr.q());
    const double n = static_cast<double>(pr.n());
    const double nnz = static_cast<double>(pr.a.nnz());

    DenseMat res = pr.c;
    if (nnz * q + m * q * n <= p * q * n + nnz * n)
        res -= pr.a.times_dense(x) * pr.b;  // (A X) B
    else
        res -= pr.a.times_dense(x * pr.b);  // A (X B)

    DenseMat g;
    const DenseMat bt = transpose(pr.b);
    if (nnz * n + p * n * q <= m * n * q + nnz * q)
        g = pr.a.transpose_times_dense(res) * bt;  // (A^T R) B^T
    else
        g = pr.a.transpose_times_dense(res * bt);  // A^T (R B^T)

    double upd_sq = 0.0;
    for (std::size_t idx = 0; idx < g.entries().size(); ++idx) {
        const double d = alpha * g.entries()[idx];
        x.entries()[idx] += d;
        upd_sq += d * d;
    }
    return std::sqrt(upd_sq);
}

}  // namespace kaczmarz
