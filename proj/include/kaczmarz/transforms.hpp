#pragma once

#include <stdexcept>
#include <utility>

#include "kaczmarz/problem.hpp"
#include "kaczmarz/qr.hpp"

namespace kaczmarz {

enum class BForm { FullCol, FullRow };

/// A problem rewritten so that the whole-sweep matrix formula applies:
/// B replaced by an orthonormal Q (full column rank) or by the identity
/// (full row rank). The solution set is unchanged.
struct TransformedProblem {
    Problem problem;
    BForm form;
    QrFactors qr;  // only meaningful for FullCol
};

/// B = Q R (thin); the equation becomes A X Q = C_hat with C_hat = C R^{-1}
/// obtained by a triangular solve, never an explicit inverse.
inline TransformedProblem transform_fullcol(const Problem& pr) {
    QrFactors f = qr_thin(pr.b);  // throws on rank deficiency
    DenseMat c_hat = right_divide_upper(pr.c, f.r);
    Problem tp(pr.a, f.q, std::move(c_hat), pr.x_star);
    return TransformedProblem{std::move(tp), BForm::FullCol, std::move(f)};
}

/// B full row rank; the equation becomes A X = C_tilde with
/// C_tilde = C B^T (B B^T)^{-1} via a symmetric positive definite solve.
inline TransformedProblem transform_fullrow(const Problem& pr) {
    const DenseMat bt = transpose(pr.b);
    const DenseMat gram = pr.b * bt;  // q x q
    DenseMat y;
    try {
        y = spd_solve(gram, pr.b * transpose(pr.c));  // (B B^T)^{-1} B C^T
    } catch (const std::runtime_error&) {
        throw std::runtime_error("transform_fullrow: B B^T is numerically singular");
    }
    Problem tp(pr.a, DenseMat::identity(pr.q()), transpose(y), pr.x_star);
    return TransformedProblem{std::move(tp), BForm::FullRow, QrFactors{}};
}

}  // namespace kaczmarz
