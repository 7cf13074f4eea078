#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <stdexcept>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/svd.hpp"
#include "kaczmarz/sweep_operator.hpp"

namespace kaczmarz {

namespace detail {

inline Eigen::MatrixXd to_eigen(const DenseMat& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return e;
}

/// A^T L^{-1} A for the sweep operator, p x p.
inline DenseMat sweep_iteration_core(const SparseRowMat& a, const SweepOperator& op) {
    const DenseMat y = forward_solve(op, a.to_dense());
    return a.transpose_times_dense(y);
}

}  // namespace detail

/// Spectral radius of a dense (possibly nonsymmetric) matrix; dense
/// Hessenberg-QR eigenvalues, desk scale only.
inline double spectral_radius(const DenseMat& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: square input required");
    if (m.rows() > 4096) throw std::invalid_argument("spectral_radius: exceeds 4096 guard");
    const Eigen::MatrixXd e = detail::to_eigen(m);
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(e, false).eigenvalues();
    double rho = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) rho = std::max(rho, std::abs(ev(i)));
    return rho;
}

/// rho(I_p - A^T L_alpha^{-1} A), the per-sweep factor of the cyclic method
/// on A X = C_tilde (B of full row rank).
inline double spectral_radius_fullrow(const SparseRowMat& a, double alpha) {
    if (a.cols() > 2000) throw std::invalid_argument("spectral_radius_fullrow: p exceeds 2000 guard");
    const SweepOperator op = build_sweep_operator(a, alpha);
    DenseMat m = detail::sweep_iteration_core(a, op);
    m *= -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;
    return spectral_radius(m);
}

/// Spectral radius of I_pq - Q Q^T (x) A^T L_alpha^{-1} A restricted to
/// range(B) (x) range(A^T), obtained by explicit projection onto the
/// orthonormal range bases. Q must have orthonormal columns (B = Q R).
inline double restricted_spectral_radius_fullcol(const SparseRowMat& a, const DenseMat& q,
                                                 double alpha) {
    const std::size_t p = a.cols();
    const std::size_t qdim = q.rows();
    if (p * qdim > 4096)
        throw std::invalid_argument("restricted_spectral_radius_fullcol: pq exceeds 4096 guard");

    const SweepOperator op = build_sweep_operator(a, alpha);
    const DenseMat core = detail::sweep_iteration_core(a, op);  // p x p
    const DenseMat qqt = q * transpose(q);                      // q x q
    DenseMat m = kron_small(qqt, core);
    m *= -1.0;
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += 1.0;

    // Basis of range(B) (x) range(A^T): Q is already an orthonormal basis of
    // range(B); range(A^T) comes from the SVD of A.
    const DenseMat va = range_basis_v(svd(a));
    const DenseMat w = kron_small(q, va);
    const DenseMat projected = transpose(w) * m * w;
    return spectral_radius(projected);
}

}  // namespace kaczmarz
