#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "kaczmarz/image.hpp"
#include "kaczmarz/problem.hpp"
#include "kaczmarz/solve.hpp"
#include "kaczmarz/sparse_matrix.hpp"

namespace kaczmarz {

enum class Boundary { Zero, Reflexive };

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "zero") return Boundary::Zero;
    if (s == "reflexive") return Boundary::Reflexive;
    throw std::invalid_argument("unknown boundary: " + s);
}

/// Within-channel blurring operator: row r of A gathers the kernel weights
/// from the neighborhood of pixel r (column-stacked order), so that
/// A vec(channel) is the 2-D convolution of the channel. Zero boundary drops
/// out-of-range taps; reflexive mirrors them back in (edge repeated), which
/// keeps constant images constant.
inline SparseRowMat blur_matrix(const PsfKernel& kernel, std::size_t height,
                                std::size_t width, Boundary boundary) {
    if (height * width > 1000000)
        throw std::invalid_argument("blur_matrix: image exceeds 1e6 pixel guard");
    const long h = static_cast<long>(height);
    const long w = static_cast<long>(width);
    const long c = static_cast<long>(kernel.size) / 2;
    std::vector<SparseRowMat::Triplet> ts;
    ts.reserve(height * width * kernel.size * kernel.size);

    const auto reflect = [](long idx, long extent) {
        if (idx < 0) idx = -idx - 1;
        if (idx >= extent) idx = 2 * extent - idx - 1;
        return idx;
    };

    for (long j = 0; j < w; ++j) {
        for (long i = 0; i < h; ++i) {
            const std::size_t row = static_cast<std::size_t>(j * h + i);  // vec order
            for (long di = -c; di <= c; ++di) {
                for (long dj = -c; dj <= c; ++dj) {
                    long si = i + di;
                    long sj = j + dj;
                    if (boundary == Boundary::Zero) {
                        if (si < 0 || si >= h || sj < 0 || sj >= w) continue;
                    } else {
                        si = reflect(si, h);
                        sj = reflect(sj, w);
                    }
                    const std::size_t col = static_cast<std::size_t>(sj * h + si);
                    ts.push_back({row, col, kernel.weights(static_cast<std::size_t>(di + c),
                                                           static_cast<std::size_t>(dj + c))});
                }
            }
        }
    }
    return SparseRowMat::from_triplets(height * width, height * width, std::move(ts));
}

/// Forward model C = A X A_c^T with X = channels_to_columns(img); noise-free.
inline DenseMat forward_blur(const RgbImage& img, const SparseRowMat& a,
                             const CrossChannelMatrix& a_c) {
    if (a.rows() != img.height * img.width || a.cols() != a.rows())
        throw std::invalid_argument("forward_blur: blur matrix shape mismatch");
    return a.times_dense(channels_to_columns(img)) * transpose(a_c.m);
}

/// Restores an image from the blurred observation C by solving
/// A X A_c^T = C with the chosen method. Intensities stay unclamped inside
/// the iteration; the returned image is clamped for export. An optional
/// reference image supplies x_star for RSE-based stopping and traces.
inline std::pair<RgbImage, SolveReport> deblur(const DenseMat& c_blurred,
                                               const SparseRowMat& a,
                                               const CrossChannelMatrix& a_c, Method method,
                                               const SolverConfig& config,
                                               std::size_t height, std::size_t width,
                                               const std::optional<RgbImage>& reference = {}) {
    if (c_blurred.rows() != height * width || c_blurred.cols() != 3)
        throw std::invalid_argument("deblur: observation must be hw x 3");
    std::optional<DenseMat> x_star;
    if (reference) x_star = channels_to_columns(*reference);
    const Problem pr(a, transpose(a_c.m), c_blurred, std::move(x_star));
    SolveReport report = solve(pr, method, config);
    RgbImage restored = columns_to_channels(report.x, height, width).clamped();
    return {std::move(restored), std::move(report)};
}

}  // namespace kaczmarz
