#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/selection.hpp"
#include "kaczmarz/sparse_matrix.hpp"
#include "kaczmarz/svd.hpp"

namespace kaczmarz {

/// Convergence-factor bounds attached to one residual state.
struct BoundReport {
    double alpha = 0.0;
    double theta = 0.0;
    double delta = 0.0;          // state-independent RBK bound
    double delta_k_theta = 0.0;  // greedy bound at this state
    double varphi_k_theta = 0.0;
    double epsilon = 0.0;  // mean ratio / max ratio, in (0, 1]
    std::vector<std::size_t> omega_set;
    bool degenerate = false;  // all weighted residual ratios equal
};

namespace detail {

inline double delta_from_parts(double alpha, double b_norm, double phi, double smin_a,
                               double smin_b) {
    const double g = 2.0 * alpha - alpha * alpha * b_norm * b_norm;
    return 1.0 - g * phi * smin_a * smin_a * smin_b * smin_b;
}

}  // namespace detail

/// RBK upper bound: delta = 1 - (2a - a^2 ||B||^2) sigma_min^2(A)
/// sigma_min^2(B) / ||A||_F^2, valid for alpha in (0, 2 ||B||^-2).
inline double delta_bound(const SparseRowMat& a, const DenseMat& b, double alpha) {
    const double b_norm = spectral_norm(b);
    if (!(alpha > 0.0) || !(alpha * b_norm * b_norm < 2.0))
        throw std::invalid_argument("delta_bound: alpha outside (0, 2 ||B||^-2)");
    const double fro_sq = frobenius_norm(a) * frobenius_norm(a);
    return detail::delta_from_parts(alpha, b_norm, 1.0 / fro_sq, sigma_min_positive(a),
                                    sigma_min_positive(b));
}

struct OmegaResult {
    std::vector<std::size_t> omega;  // rows with below-mean weighted residual
    double epsilon = 1.0;            // mean ratio / max ratio
    bool degenerate = false;
};

/// Omega_k = { i : ||R_i||^2/||A_i||^2 below the plain mean of the ratios },
/// together with epsilon = mean/max. All-equal states are flagged.
inline OmegaResult omega_set(const DenseMat& residual, const SparseRowMat& a) {
    if (residual.rows() != a.rows())
        throw std::invalid_argument("omega_set: row count mismatch");
    const std::vector<double> res_rows = detail::residual_row_norms_sq(residual);
    double total = 0.0;
    for (double v : res_rows) total += v;
    if (total <= 0.0) throw std::domain_error("omega_set: zero residual");

    const std::size_t m = a.rows();
    std::vector<double> ratio(m);
    double max_ratio = 0.0, mean_ratio = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double w = a.row_norm_squared(i);
        if (w <= 0.0) throw std::invalid_argument("omega_set: zero row in A");
        ratio[i] = res_rows[i] / w;
        mean_ratio += ratio[i];
        max_ratio = std::max(max_ratio, ratio[i]);
    }
    mean_ratio /= static_cast<double>(m);

    OmegaResult out;
    for (std::size_t i = 0; i < m; ++i)
        if (ratio[i] < mean_ratio) out.omega.push_back(i);
    out.epsilon = std::min(mean_ratio / max_ratio, 1.0);
    out.degenerate = out.omega.empty();
    if (out.degenerate) out.epsilon = 1.0;
    return out;
}

/// Greedy bound delta_{k,theta} through
/// varphi_{k,theta} = theta / (sum_{i not in Omega} ||A_i||^2
///                    + eps sum_{i in Omega} ||A_i||^2) + (1-theta)/||A||_F^2.
inline BoundReport delta_k_theta_bound(const SparseRowMat& a, const DenseMat& b,
                                       double alpha, double theta,
                                       const DenseMat& residual) {
    if (theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("delta_k_theta_bound: theta must be in [0,1]");
    const double b_norm = spectral_norm(b);
    if (!(alpha > 0.0) || !(alpha * b_norm * b_norm < 2.0))
        throw std::invalid_argument("delta_k_theta_bound: alpha outside (0, 2 ||B||^-2)");

    const OmegaResult om = omega_set(residual, a);
    const std::vector<double> row_sq = row_norms_squared(a);
    double fro_sq = 0.0;
    for (double v : row_sq) fro_sq += v;

    std::vector<char> in_omega(a.rows(), 0);
    for (std::size_t i : om.omega) in_omega[i] = 1;
    double weighted = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        weighted += in_omega[i] ? om.epsilon * row_sq[i] : row_sq[i];

    const double smin_a = sigma_min_positive(a);
    const double smin_b = sigma_min_positive(b);

    BoundReport rep;
    rep.alpha = alpha;
    rep.theta = theta;
    rep.epsilon = om.epsilon;
    rep.omega_set = om.omega;
    rep.degenerate = om.degenerate;
    rep.varphi_k_theta = theta / weighted + (1.0 - theta) / fro_sq;
    rep.delta = detail::delta_from_parts(alpha, b_norm, 1.0 / fro_sq, smin_a, smin_b);
    rep.delta_k_theta =
        detail::delta_from_parts(alpha, b_norm, rep.varphi_k_theta, smin_a, smin_b);
    return rep;
}

/// The BK limit point for initial guess x0 (Eq. X):
/// X*0 = X* + x0 - A^+ A x0 B B^+.
inline DenseMat x_star_0(const SparseRowMat& a, const DenseMat& b, const DenseMat& c,
                         const DenseMat& x0) {
    const SvdFactors fa = svd(a);
    const SvdFactors fb = svd(b);
    const DenseMat x_star = pseudo_inverse(fa) * c * pseudo_inverse(fb);
    // A^+ A projects onto range(A^T), B B^+ onto range(B).
    const DenseMat va = range_basis_v(fa);
    const DenseMat ub = range_basis_u(fb);
    const DenseMat projected = va * (transpose(va) * x0 * ub) * transpose(ub);
    return x_star + x0 - projected;
}

}  // namespace kaczmarz
