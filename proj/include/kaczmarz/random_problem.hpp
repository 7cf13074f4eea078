#pragma once

#include <cstdint>
#include <stdexcept>

#include "kaczmarz/problem.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/svd.hpp"

namespace kaczmarz {

/// Rank shape of a randomly generated factor. Deficient factors are built by
/// duplicating a standard-normal block (rows or columns), the construction
/// the paper uses for its rank-deficient sets.
enum class RankMode { Full, DeficientDupRows, DeficientDupCols };

struct RandomProblemSpec {
    std::size_t m = 0, p = 0, q = 0, n = 0;
    RankMode rank_a = RankMode::Full;
    RankMode rank_b = RankMode::Full;
    std::uint64_t seed = 0;
    bool attach_x_star = true;  // SVD oracle; skip for large instances
};

namespace detail {

inline DenseMat randn_mat(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMat m(rows, cols);
    for (double& v : m.entries()) v = rng.next_normal();
    return m;
}

inline DenseMat random_factor(Rng& rng, std::size_t rows, std::size_t cols, RankMode mode) {
    switch (mode) {
        case RankMode::Full:
            return randn_mat(rng, rows, cols);
        case RankMode::DeficientDupRows: {
            const std::size_t half = (rows + 1) / 2;
            const DenseMat base = randn_mat(rng, half, cols);
            DenseMat out(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) out(i, j) = base(i % half, j);
            return out;
        }
        case RankMode::DeficientDupCols: {
            const std::size_t half = (cols + 1) / 2;
            const DenseMat base = randn_mat(rng, rows, half);
            DenseMat out(rows, cols);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < cols; ++j) out(i, j) = base(i, j % half);
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace detail

/// Consistent random instance: A, B standard normal (optionally block
/// duplicated), X standard normal, C = A X B exactly; the minimum norm
/// solution is attached from the SVD oracle.
inline Problem random_problem(const RandomProblemSpec& spec) {
    if (spec.m == 0 || spec.p == 0 || spec.q == 0 || spec.n == 0)
        throw std::invalid_argument("random_problem: zero dimension");
    Rng rng(spec.seed);
    const DenseMat a_dense = detail::random_factor(rng, spec.m, spec.p, spec.rank_a);
    const DenseMat b = detail::random_factor(rng, spec.q, spec.n, spec.rank_b);
    const DenseMat x = detail::randn_mat(rng, spec.p, spec.q);
    const SparseRowMat a = SparseRowMat::from_dense(a_dense);
    const DenseMat c = a.times_dense(x) * b;
    std::optional<DenseMat> x_star;
    if (spec.attach_x_star) x_star = min_norm_solution(a_dense, b, c);
    return Problem(a, b, c, std::move(x_star));
}

}  // namespace kaczmarz
