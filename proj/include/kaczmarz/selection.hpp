#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/rng.hpp"

namespace kaczmarz {

/// Cyclic sweep order: step k touches row k mod m (0-based).
inline std::size_t cyclic_index(long k, std::size_t m) {
    if (m == 0) throw std::invalid_argument("cyclic_index: empty matrix");
    return static_cast<std::size_t>(k % static_cast<long>(m));
}

/// RBK row draw, P(i) proportional to ||A_{i,:}||^2. The sampler is built
/// once per solve from the fixed row weights.
inline std::size_t rbk_sample(Rng& rng, const CdfSampler& row_weights) {
    return row_weights.sample(rng);
}

/// Outcome of the greedy threshold test: the candidate rows whose weighted
/// residual clears xi_k (gamma_k for theta = 1/2), with sampling weights
/// ||R_{i,:}||^2 restricted to the candidates.
struct SelectionDiagnostics {
    double threshold = 0.0;  // xi_k (or gamma_k)
    std::vector<std::size_t> candidate_set;
    std::vector<double> weights;
    double total_weight = 0.0;
    double max_ratio = 0.0;
    std::size_t argmax_row = 0;  // smallest index attaining the max ratio
};

namespace detail {

inline std::vector<double> residual_row_norms_sq(const DenseMat& r) {
    std::vector<double> out(r.rows(), 0.0);
    for (std::size_t i = 0; i < r.rows(); ++i) {
        const double* ri = r.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < r.cols(); ++j) s += ri[j] * ri[j];
        out[i] = s;
    }
    return out;
}

/// Core of the threshold rule, on precomputed ||R_{i,:}||^2. Candidacy is
/// decided on the ratios themselves so the argmax row is always a member,
/// also for theta = 1 in floating point.
inline SelectionDiagnostics greedy_threshold_rows(const std::vector<double>& res_row_sq,
                                                  const std::vector<double>& a_row_norms_sq,
                                                  double a_fro_sq, double theta) {
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta must be in [0,1]");
    const std::size_t m = res_row_sq.size();
    double res_fro_sq = 0.0;
    for (double v : res_row_sq) res_fro_sq += v;
    if (res_fro_sq <= 0.0)
        throw std::domain_error("greedy_threshold: zero residual (converged)");

    SelectionDiagnostics d;
    std::vector<double> ratio(m);
    for (std::size_t i = 0; i < m; ++i) {
        ratio[i] = res_row_sq[i] / a_row_norms_sq[i];
        if (ratio[i] > d.max_ratio) {
            d.max_ratio = ratio[i];
            d.argmax_row = i;
        }
    }
    const double avg = res_fro_sq / a_fro_sq;
    d.threshold = theta * d.max_ratio + (1.0 - theta) * avg;
    for (std::size_t i = 0; i < m; ++i) {
        if (ratio[i] >= d.threshold || i == d.argmax_row) {
            d.candidate_set.push_back(i);
            d.weights.push_back(res_row_sq[i]);
            d.total_weight += res_row_sq[i];
        }
    }
    return d;
}

inline std::size_t argmax_ratio_row(const std::vector<double>& res_row_sq,
                                    const std::vector<double>& a_row_norms_sq) {
    double best = -1.0;
    std::size_t best_i = 0;
    bool any = false;
    for (std::size_t i = 0; i < res_row_sq.size(); ++i) {
        const double r = res_row_sq[i] / a_row_norms_sq[i];
        if (r > best) {  // strict: ties keep the smallest index
            best = r;
            best_i = i;
        }
        if (res_row_sq[i] > 0.0) any = true;
    }
    if (!any) throw std::domain_error("mwrbk_select: zero residual (converged)");
    return best_i;
}

}  // namespace detail

/// Threshold selection of the greedy methods; theta = 1/2 reproduces the
/// GRBK rule, theta = 1 keeps only argmax rows, theta = 0 keeps every row
/// with at-least-average weighted residual.
inline SelectionDiagnostics greedy_threshold(const DenseMat& residual,
                                             const std::vector<double>& a_row_norms_sq,
                                             double a_fro_sq, double theta) {
    if (residual.rows() != a_row_norms_sq.size())
        throw std::invalid_argument("greedy_threshold: row count mismatch");
    return detail::greedy_threshold_rows(detail::residual_row_norms_sq(residual),
                                         a_row_norms_sq, a_fro_sq, theta);
}

/// Draw within the candidate set, P(i) = ||R~_{i,:}||^2 / ||R~||_F^2.
inline std::size_t greedy_sample(Rng& rng, const SelectionDiagnostics& diag) {
    if (diag.candidate_set.empty())
        throw std::invalid_argument("greedy_sample: empty candidate set");
    if (diag.candidate_set.size() == 1) return diag.candidate_set[0];
    const CdfSampler sampler(diag.weights);
    return diag.candidate_set[sampler.sample(rng)];
}

/// Deterministic maximal weighted residual row; ties take the smallest index.
inline std::size_t mwrbk_select(const DenseMat& residual,
                                const std::vector<double>& a_row_norms_sq) {
    if (residual.rows() != a_row_norms_sq.size())
        throw std::invalid_argument("mwrbk_select: row count mismatch");
    return detail::argmax_ratio_row(detail::residual_row_norms_sq(residual),
                                    a_row_norms_sq);
}

}  // namespace kaczmarz
