#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"

namespace kaczmarz {

/// Compressed sparse row storage for the row-action coefficient matrix A
/// and blur operators. Within each row the column indices are strictly
/// increasing and no explicit zeros are stored.
class SparseRowMat {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseRowMat() = default;

    static SparseRowMat from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> ts) {
        for (const auto& t : ts)
            if (t.row >= rows || t.col >= cols)
                throw std::invalid_argument("triplet index out of range");
        std::sort(ts.begin(), ts.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        SparseRowMat m;
        m.rows_ = rows;
        m.cols_ = cols;
        m.row_starts_.assign(rows + 1, 0);
        m.col_indices_.reserve(ts.size());
        m.values_.reserve(ts.size());
        std::size_t i = 0;
        for (std::size_t r = 0; r < rows; ++r) {
            while (i < ts.size() && ts[i].row == r) {
                double v = ts[i].value;
                const std::size_t c = ts[i].col;
                ++i;
                while (i < ts.size() && ts[i].row == r && ts[i].col == c) {
                    v += ts[i].value;  // duplicates are summed
                    ++i;
                }
                if (v != 0.0) {
                    m.col_indices_.push_back(c);
                    m.values_.push_back(v);
                }
            }
            m.row_starts_[r + 1] = m.col_indices_.size();
        }
        return m;
    }

    static SparseRowMat from_dense(const DenseMat& d) {
        SparseRowMat m;
        m.rows_ = d.rows();
        m.cols_ = d.cols();
        m.row_starts_.assign(d.rows() + 1, 0);
        for (std::size_t i = 0; i < d.rows(); ++i) {
            for (std::size_t j = 0; j < d.cols(); ++j) {
                if (d(i, j) != 0.0) {
                    m.col_indices_.push_back(j);
                    m.values_.push_back(d(i, j));
                }
            }
            m.row_starts_[i + 1] = m.col_indices_.size();
        }
        return m;
    }

    static SparseRowMat identity(std::size_t n) {
        return from_dense(DenseMat::identity(n));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::size_t row_begin(std::size_t i) const { return row_starts_[i]; }
    std::size_t row_end(std::size_t i) const { return row_starts_[i + 1]; }
    std::size_t col_index(std::size_t k) const { return col_indices_[k]; }
    double value(std::size_t k) const { return values_[k]; }

    const std::vector<std::size_t>& row_starts() const noexcept { return row_starts_; }
    const std::vector<std::size_t>& col_indices() const noexcept { return col_indices_; }
    const std::vector<double>& values() const noexcept { return values_; }

    DenseMat to_dense() const {
        DenseMat d(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = row_begin(i); k < row_end(i); ++k)
                d(i, col_indices_[k]) = values_[k];
        return d;
    }

    /// y = A * x
    std::vector<double> times_vec(const std::vector<double>& x) const {
        if (x.size() != cols_) throw std::invalid_argument("matvec size mismatch");
        std::vector<double> y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t k = row_begin(i); k < row_end(i); ++k)
                s += values_[k] * x[col_indices_[k]];
            y[i] = s;
        }
        return y;
    }

    /// y = A^T * x
    std::vector<double> transpose_times_vec(const std::vector<double>& x) const {
        if (x.size() != rows_) throw std::invalid_argument("matvec size mismatch");
        std::vector<double> y(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double xi = x[i];
            if (xi == 0.0) continue;
            for (std::size_t k = row_begin(i); k < row_end(i); ++k)
                y[col_indices_[k]] += values_[k] * xi;
        }
        return y;
    }

    /// Y = A * X (X dense)
    DenseMat times_dense(const DenseMat& x) const {
        if (x.rows() != cols_) throw std::invalid_argument("product shape mismatch");
        DenseMat y(rows_, x.cols());
        for (std::size_t i = 0; i < rows_; ++i) {
            double* yi = y.row_ptr(i);
            for (std::size_t k = row_begin(i); k < row_end(i); ++k) {
                const double v = values_[k];
                const double* xr = x.row_ptr(col_indices_[k]);
                for (std::size_t j = 0; j < x.cols(); ++j) yi[j] += v * xr[j];
            }
        }
        return y;
    }

    /// Y = A^T * X (X dense with rows() == this->rows())
    DenseMat transpose_times_dense(const DenseMat& x) const {
        if (x.rows() != rows_) throw std::invalid_argument("product shape mismatch");
        DenseMat y(cols_, x.cols());
        for (std::size_t i = 0; i < rows_; ++i) {
            const double* xi = x.row_ptr(i);
            for (std::size_t k = row_begin(i); k < row_end(i); ++k) {
                const double v = values_[k];
                double* yr = y.row_ptr(col_indices_[k]);
                for (std::size_t j = 0; j < x.cols(); ++j) yr[j] += v * xi[j];
            }
        }
        return y;
    }

    /// Row i of A times dense X: a 1 x X.cols() vector.
    std::vector<double> row_times_dense(std::size_t i, const DenseMat& x) const {
        if (x.rows() != cols_) throw std::invalid_argument("product shape mismatch");
        std::vector<double> y(x.cols(), 0.0);
        for (std::size_t k = row_begin(i); k < row_end(i); ++k) {
            const double v = values_[k];
            const double* xr = x.row_ptr(col_indices_[k]);
            for (std::size_t j = 0; j < x.cols(); ++j) y[j] += v * xr[j];
        }
        return y;
    }

    /// s = A * A_{i,:}^T, the column of A A^T selected by a row index.
    std::vector<double> times_own_row_transposed(std::size_t i) const {
        std::vector<double> ai(cols_, 0.0);
        for (std::size_t k = row_begin(i); k < row_end(i); ++k)
            ai[col_indices_[k]] = values_[k];
        return times_vec(ai);
    }

    double row_norm_squared(std::size_t i) const {
        double s = 0.0;
        for (std::size_t k = row_begin(i); k < row_end(i); ++k)
            s += values_[k] * values_[k];
        return s;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_starts_;
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// Component i is ||A_{i,:}||^2; the RBK sampling weights.
inline std::vector<double> row_norms_squared(const SparseRowMat& a) {
    std::vector<double> w(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) w[i] = a.row_norm_squared(i);
    return w;
}

inline double frobenius_norm(const SparseRowMat& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

/// Stored-nonzero count over rows * cols.
inline double density(const SparseRowMat& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    return static_cast<double>(a.nnz()) /
           (static_cast<double>(a.rows()) * static_cast<double>(a.cols()));
}

}  // namespace kaczmarz
