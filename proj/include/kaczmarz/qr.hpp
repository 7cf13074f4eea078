#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"

namespace kaczmarz {

/// Thin QR of a full-column-rank matrix: B = Q R with Q (q x n) having
/// orthonormal columns and R (n x n) upper triangular with positive diagonal.
struct QrFactors {
    DenseMat q;
    DenseMat r;
};

/// Householder QR with the sign fix that makes diag(R) positive.
/// Throws on numerical rank deficiency (|R_ii| at or below the tolerance).
inline QrFactors qr_thin(const DenseMat& b) {
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    if (n == 0 || m < n) throw std::invalid_argument("qr_thin needs rows >= cols >= 1");

    DenseMat work = b;  // upper part becomes R
    std::vector<std::vector<double>> vs(n);
    std::vector<double> betas(n, 0.0);

    for (std::size_t k = 0; k < n; ++k) {
        double norm_x = 0.0;
        for (std::size_t i = k; i < m; ++i) norm_x += work(i, k) * work(i, k);
        norm_x = std::sqrt(norm_x);
        std::vector<double> v(m - k, 0.0);
        if (norm_x > 0.0) {
            const double x0 = work(k, k);
            const double sign = x0 >= 0.0 ? 1.0 : -1.0;
            v[0] = x0 + sign * norm_x;
            for (std::size_t i = k + 1; i < m; ++i) v[i - k] = work(i, k);
            double vtv = 0.0;
            for (double t : v) vtv += t * t;
            if (vtv > 0.0) {
                const double beta = 2.0 / vtv;
                // apply H = I - beta v v^T to trailing columns
                for (std::size_t j = k; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t i = k; i < m; ++i) s += v[i - k] * work(i, j);
                    s *= beta;
                    for (std::size_t i = k; i < m; ++i) work(i, j) -= s * v[i - k];
                }
                betas[k] = beta;
            }
        }
        vs[k] = std::move(v);
    }

    DenseMat r(n, n);
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) r(i, j) = work(i, j);
        max_diag = std::max(max_diag, std::abs(r(i, i)));
    }
    const double tol = max_diag * static_cast<double>(std::max(m, n)) *
                       std::numeric_limits<double>::epsilon();
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(r(i, i)) <= tol)
            throw std::runtime_error("qr_thin: numerically rank-deficient input");

    // Q = H_0 H_1 ... H_{n-1} E_n, applied in reverse to identity columns.
    DenseMat q(m, n);
    for (std::size_t j = 0; j < n; ++j) q(j, j) = 1.0;
    for (std::size_t k = n; k-- > 0;) {
        if (betas[k] == 0.0) continue;
        const auto& v = vs[k];
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i - k] * q(i, j);
            s *= betas[k];
            for (std::size_t i = k; i < m; ++i) q(i, j) -= s * v[i - k];
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (r(i, i) < 0.0) {
            for (std::size_t j = i; j < n; ++j) r(i, j) = -r(i, j);
            for (std::size_t row = 0; row < m; ++row) q(row, i) = -q(row, i);
        }
    }
    return {std::move(q), std::move(r)};
}

/// Solves Y R = C for Y with R upper triangular (right division, row-wise
/// forward sweep over the columns). Used for C_hat = C R^{-1}.
inline DenseMat right_divide_upper(const DenseMat& c, const DenseMat& r) {
    const std::size_t n = r.rows();
    if (r.cols() != n || c.cols() != n)
        throw std::invalid_argument("right_divide_upper: shape mismatch");
    DenseMat y(c.rows(), n);
    for (std::size_t i = 0; i < c.rows(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = c(i, j);
            for (std::size_t l = 0; l < j; ++l) s -= y(i, l) * r(l, j);
            if (r(j, j) == 0.0) throw std::runtime_error("singular triangular factor");
            y(i, j) = s / r(j, j);
        }
    }
    return y;
}

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
inline DenseMat cholesky_spd(const DenseMat& s) {
    const std::size_t n = s.rows();
    if (s.cols() != n) throw std::invalid_argument("cholesky needs a square matrix");
    DenseMat l(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = s(i, j);
            for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
            if (i == j) {
                if (acc <= 0.0)
                    throw std::runtime_error("cholesky_spd: matrix is not positive definite");
                l(i, i) = std::sqrt(acc);
            } else {
                l(i, j) = acc / l(j, j);
            }
        }
    }
    return l;
}

/// Solves S Y = RHS with S symmetric positive definite via Cholesky.
inline DenseMat spd_solve(const DenseMat& s, const DenseMat& rhs) {
    const DenseMat l = cholesky_spd(s);
    const std::size_t n = l.rows();
    if (rhs.rows() != n) throw std::invalid_argument("spd_solve: shape mismatch");
    DenseMat y(n, rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {  // forward
            double acc = rhs(i, j);
            for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * y(k, j);
            y(i, j) = acc / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {  // backward with L^T
            double acc = y(i, j);
            for (std::size_t k = i + 1; k < n; ++k) acc -= l(k, i) * y(k, j);
            y(i, j) = acc / l(i, i);
        }
    }
    return y;
}

}  // namespace kaczmarz
