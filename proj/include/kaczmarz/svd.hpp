#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/sparse_matrix.hpp"

namespace kaczmarz {

/// Thin SVD, M = U diag(sigma) V^T with k = min(rows, cols) columns.
/// Columns of U belonging to zero singular values are left as zero vectors;
/// every consumer truncates at rank_tol anyway.
struct SvdFactors {
    DenseMat u;
    std::vector<double> sigma;  // nonincreasing, >= 0
    DenseMat v;
    double rank_tol = 0.0;  // sigma_max * max(rows, cols) * machine eps

    std::size_t numerical_rank() const {
        std::size_t r = 0;
        while (r < sigma.size() && sigma[r] > rank_tol) ++r;
        return r;
    }
};

/// One-sided Jacobi SVD. Simple and accurate at desk scale; matrices are
/// capped at 4096 on the short dimension.
inline SvdFactors svd(const DenseMat& m_in) {
    if (m_in.rows() == 0 || m_in.cols() == 0)
        throw std::invalid_argument("svd of empty matrix");
    if (std::min(m_in.rows(), m_in.cols()) > 4096)
        throw std::invalid_argument("svd: short dimension exceeds 4096 guard");

    const bool transposed = m_in.rows() < m_in.cols();
    // Work on the transpose so that each column of W is a contiguous row.
    DenseMat wt = transposed ? m_in : transpose(m_in);
    const std::size_t r = transposed ? m_in.cols() : m_in.rows();
    const std::size_t c = transposed ? m_in.rows() : m_in.cols();
    DenseMat vt = DenseMat::identity(c);  // row i is column i of V

    const double conv_tol = 1.0e-15;
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < c; ++p) {
            for (std::size_t q = p + 1; q < c; ++q) {
                double* wp = wt.row_ptr(p);
                double* wq = wt.row_ptr(q);
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (std::size_t i = 0; i < r; ++i) {
                    app += wp[i] * wp[i];
                    aqq += wq[i] * wq[i];
                    apq += wp[i] * wq[i];
                }
                if (app == 0.0 || aqq == 0.0) continue;
                if (std::abs(apq) <= conv_tol * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (std::size_t i = 0; i < r; ++i) {
                    const double a = wp[i], b = wq[i];
                    wp[i] = cs * a - sn * b;
                    wq[i] = sn * a + cs * b;
                }
                double* vp = vt.row_ptr(p);
                double* vq = vt.row_ptr(q);
                for (std::size_t i = 0; i < c; ++i) {
                    const double a = vp[i], b = vq[i];
                    vp[i] = cs * a - sn * b;
                    vq[i] = sn * a + cs * b;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sig(c);
    for (std::size_t j = 0; j < c; ++j) {
        double s = 0.0;
        const double* wj = wt.row_ptr(j);
        for (std::size_t i = 0; i < r; ++i) s += wj[i] * wj[i];
        sig[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(c);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sig[a] > sig[b]; });

    SvdFactors f;
    f.sigma.resize(c);
    DenseMat u(r, c), v(c, c);
    for (std::size_t j = 0; j < c; ++j) {
        const std::size_t src = order[j];
        f.sigma[j] = sig[src];
        const double* wj = wt.row_ptr(src);
        if (sig[src] > 0.0)
            for (std::size_t i = 0; i < r; ++i) u(i, j) = wj[i] / sig[src];
        const double* vj = vt.row_ptr(src);
        for (std::size_t i = 0; i < c; ++i) v(i, j) = vj[i];
    }
    const double sigma_max = f.sigma.empty() ? 0.0 : f.sigma[0];
    f.rank_tol = sigma_max *
                 static_cast<double>(std::max(m_in.rows(), m_in.cols())) *
                 std::numeric_limits<double>::epsilon();
    if (transposed) {
        f.u = std::move(v);
        f.v = std::move(u);
    } else {
        f.u = std::move(u);
        f.v = std::move(v);
    }
    return f;
}

inline SvdFactors svd(const SparseRowMat& m) { return svd(m.to_dense()); }

/// Moore-Penrose pseudoinverse with truncation at rank_tol.
inline DenseMat pseudo_inverse(const SvdFactors& f) {
    const std::size_t k = f.numerical_rank();
    DenseMat pinv(f.v.rows(), f.u.rows());
    for (std::size_t i = 0; i < pinv.rows(); ++i)
        for (std::size_t j = 0; j < pinv.cols(); ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < k; ++l)
                s += f.v(i, l) * f.u(j, l) / f.sigma[l];
            pinv(i, j) = s;
        }
    return pinv;
}

/// Orthonormal basis of range(M): columns of U with sigma above rank_tol.
inline DenseMat range_basis_u(const SvdFactors& f) {
    const std::size_t k = f.numerical_rank();
    DenseMat b(f.u.rows(), k);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) b(i, j) = f.u(i, j);
    return b;
}

/// Orthonormal basis of range(M^T).
inline DenseMat range_basis_v(const SvdFactors& f) {
    const std::size_t k = f.numerical_rank();
    DenseMat b(f.v.rows(), k);
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) b(i, j) = f.v(i, j);
    return b;
}

/// Smallest singular value above the rank tolerance.
inline double sigma_min_positive(const SvdFactors& f) {
    const std::size_t k = f.numerical_rank();
    if (k == 0) throw std::invalid_argument("sigma_min_positive of zero matrix");
    return f.sigma[k - 1];
}

inline double sigma_min_positive(const DenseMat& m) { return sigma_min_positive(svd(m)); }
inline double sigma_min_positive(const SparseRowMat& m) { return sigma_min_positive(svd(m)); }

namespace detail {

/// Power iteration on M^T M with the deterministic all-ones start.
/// Returns the Rayleigh estimate of sigma_max; `strict` demands the
/// eigenresidual tolerance and throws at the iteration cap.
template <typename MatVec, typename MatVecT>
double power_sigma_max(std::size_t cols, MatVec&& av, MatVecT&& atv, bool strict,
                       double rel_tol, long cap) {
    std::vector<double> v(cols, 1.0 / std::sqrt(static_cast<double>(cols)));
    double lambda = 0.0;
    int restarts = 0;
    for (long it = 0; it < cap; ++it) {
        std::vector<double> w = atv(av(v));  // M^T M v
        double nw = 0.0, ray = 0.0;
        for (std::size_t i = 0; i < cols; ++i) {
            nw += w[i] * w[i];
            ray += w[i] * v[i];
        }
        nw = std::sqrt(nw);
        if (nw == 0.0) {
            // Start vector fell in the null space; restart on a basis vector.
            if (static_cast<std::size_t>(restarts) >= cols)
                throw std::runtime_error("spectral_norm: zero matrix");
            std::fill(v.begin(), v.end(), 0.0);
            v[restarts++] = 1.0;
            continue;
        }
        lambda = ray;
        // Eigenresidual ||M^T M v - lambda v||; for symmetric operators this
        // bounds the distance from lambda to an eigenvalue.
        double res = 0.0;
        for (std::size_t i = 0; i < cols; ++i) {
            const double d = w[i] - lambda * v[i];
            res += d * d;
        }
        res = std::sqrt(res);
        for (std::size_t i = 0; i < cols; ++i) v[i] = w[i] / nw;
        if (lambda > 0.0 && res <= rel_tol * lambda) return std::sqrt(lambda);
    }
    if (strict)
        throw std::runtime_error("spectral_norm: power iteration hit the cap");
    return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace detail

/// Largest singular value to relative 1e-12: exact SVD below the 64 cutoff,
/// power iteration on M^T M above it.
inline double spectral_norm(const DenseMat& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("spectral_norm of empty matrix");
    if (std::min(m.rows(), m.cols()) <= 64) return svd(m).sigma[0];
    const DenseMat mt = transpose(m);
    return detail::power_sigma_max(
        m.cols(),
        [&](const std::vector<double>& x) {
            std::vector<double> y(m.rows(), 0.0);
            for (std::size_t i = 0; i < m.rows(); ++i) {
                const double* mi = m.row_ptr(i);
                double s = 0.0;
                for (std::size_t j = 0; j < m.cols(); ++j) s += mi[j] * x[j];
                y[i] = s;
            }
            return y;
        },
        [&](const std::vector<double>& x) {
            std::vector<double> y(m.cols(), 0.0);
            for (std::size_t j = 0; j < m.cols(); ++j) {
                const double* mj = mt.row_ptr(j);
                double s = 0.0;
                for (std::size_t i = 0; i < m.rows(); ++i) s += mj[i] * x[i];
                y[j] = s;
            }
            return y;
        },
        /*strict=*/true, 1.0e-12, 100000);
}

inline double spectral_norm(const SparseRowMat& m) {
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("spectral_norm of empty matrix");
    if (std::min(m.rows(), m.cols()) <= 64) return svd(m.to_dense()).sigma[0];
    return detail::power_sigma_max(
        m.cols(), [&](const std::vector<double>& x) { return m.times_vec(x); },
        [&](const std::vector<double>& x) { return m.transpose_times_vec(x); },
        /*strict=*/true, 1.0e-12, 100000);
}

/// Loose, never-throwing estimate used for stepsize defaults on large
/// operators (e.g. blur matrices) where the top of the spectrum clusters.
inline double spectral_norm_estimate(const SparseRowMat& m) {
    if (std::min(m.rows(), m.cols()) <= 64) return svd(m.to_dense()).sigma[0];
    return detail::power_sigma_max(
        m.cols(), [&](const std::vector<double>& x) { return m.times_vec(x); },
        [&](const std::vector<double>& x) { return m.transpose_times_vec(x); },
        /*strict=*/false, 1.0e-8, 20000);
}

/// Minimum norm solution X* = A^+ C B^+ of a consistent AXB = C.
/// Throws if the reconstructed equation misses C by more than 1e-8 ||C||_F.
inline DenseMat min_norm_solution(const DenseMat& a, const DenseMat& b, const DenseMat& c) {
    if (a.rows() != c.rows() || b.cols() != c.cols())
        throw std::invalid_argument("min_norm_solution: shape mismatch");
    const SvdFactors fa = svd(a);
    const SvdFactors fb = svd(b);
    const DenseMat x = pseudo_inverse(fa) * c * pseudo_inverse(fb);
    const double gap = frobenius_distance(a * x * b, c);
    if (gap > 1.0e-8 * frobenius_norm(c))
        throw std::runtime_error("min_norm_solution: equation is inconsistent");
    return x;
}

inline DenseMat min_norm_solution(const SparseRowMat& a, const DenseMat& b, const DenseMat& c) {
    return min_norm_solution(a.to_dense(), b, c);
}

}  // namespace kaczmarz
