#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace kaczmarz {

/// Dense row-major matrix of doubles. Holds X, B, C, residuals and all
/// desk-scale factor computations. Value semantics throughout.
class DenseMat {
public:
    DenseMat() = default;
    DenseMat(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), e_(rows * cols, fill) {}

    static DenseMat identity(std::size_t n) {
        DenseMat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    /// Row-wise literal construction: DenseMat::from_rows({{1, 2}, {3, 4}}).
    static DenseMat from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        const std::size_t r = rows.size();
        const std::size_t c = r == 0 ? 0 : rows.begin()->size();
        DenseMat m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != c) throw std::invalid_argument("ragged row list");
            std::size_t j = 0;
            for (double v : row) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return e_.size(); }
    bool empty() const noexcept { return e_.empty(); }

    double& operator()(std::size_t i, std::size_t j) {
        assert(i < rows_ && j < cols_);
        return e_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const {
        assert(i < rows_ && j < cols_);
        return e_[i * cols_ + j];
    }

    double* row_ptr(std::size_t i) { return e_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return e_.data() + i * cols_; }

    std::vector<double>& entries() noexcept { return e_; }
    const std::vector<double>& entries() const noexcept { return e_; }

    void fill(double v) { std::fill(e_.begin(), e_.end(), v); }

    DenseMat& operator+=(const DenseMat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
        return *this;
    }
    DenseMat& operator-=(const DenseMat& o) {
        check_same_shape(o);
        for (std::size_t i = 0; i < e_.size(); ++i) e_[i] -= o.e_[i];
        return *this;
    }
    DenseMat& operator*=(double s) {
        for (double& v : e_) v *= s;
        return *this;
    }

private:
    void check_same_shape(const DenseMat& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> e_;
};

inline DenseMat operator+(DenseMat a, const DenseMat& b) { return a += b; }
inline DenseMat operator-(DenseMat a, const DenseMat& b) { return a -= b; }
inline DenseMat operator*(DenseMat a, double s) { return a *= s; }
inline DenseMat operator*(double s, DenseMat a) { return a *= s; }

inline DenseMat transpose(const DenseMat& a) {
    DenseMat t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

/// C = A * B; plain ikj loop, desk scale only.
inline DenseMat operator*(const DenseMat& a, const DenseMat& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul shape mismatch");
    DenseMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* ci = c.row_ptr(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const double* bk = b.row_ptr(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

inline double frobenius_norm(const DenseMat& m) {
    double s = 0.0;
    for (double v : m.entries()) s += v * v;
    return std::sqrt(s);
}

inline double frobenius_distance(const DenseMat& a, const DenseMat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.entries().size(); ++i) {
        const double d = a.entries()[i] - b.entries()[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double max_abs(const DenseMat& m) {
    double s = 0.0;
    for (double v : m.entries()) s = std::max(s, std::abs(v));
    return s;
}

inline bool all_finite(const DenseMat& m) {
    for (double v : m.entries())
        if (!std::isfinite(v)) return false;
    return true;
}

/// Column-stacking stretch operator: M (r x c) -> vector of length r*c.
inline std::vector<double> vec(const DenseMat& m) {
    std::vector<double> v(m.rows() * m.cols());
    std::size_t idx = 0;
    for (std::size_t j = 0; j < m.cols(); ++j)
        for (std::size_t i = 0; i < m.rows(); ++i) v[idx++] = m(i, j);
    return v;
}

inline DenseMat unvec(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    if (v.size() != rows * cols) throw std::invalid_argument("unvec size mismatch");
    DenseMat m(rows, cols);
    std::size_t idx = 0;
    for (std::size_t j = 0; j < cols; ++j)
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[idx++];
    return m;
}

/// Kronecker product, guarded to desk scale (result at most 4096 x 4096).
inline DenseMat kron_small(const DenseMat& p, const DenseMat& q) {
    const std::size_t r = p.rows() * q.rows();
    const std::size_t c = p.cols() * q.cols();
    if (r > 4096 || c > 4096)
        throw std::invalid_argument("kron_small: result exceeds 4096 x 4096 guard");
    DenseMat k(r, c);
    for (std::size_t pi = 0; pi < p.rows(); ++pi)
        for (std::size_t pj = 0; pj < p.cols(); ++pj) {
            const double w = p(pi, pj);
            if (w == 0.0) continue;
            for (std::size_t qi = 0; qi < q.rows(); ++qi)
                for (std::size_t qj = 0; qj < q.cols(); ++qj)
                    k(pi * q.rows() + qi, pj * q.cols() + qj) = w * q(qi, qj);
        }
    return k;
}

}  // namespace kaczmarz
