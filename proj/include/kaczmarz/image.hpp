#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"

namespace kaczmarz {

/// Unit-range RGB image; each channel plane is an h x w matrix of
/// intensities. Values loaded from files are in [0,1]; restored iterates may
/// leave the range slightly and are clamped only at export time.
struct RgbImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::array<DenseMat, 3> planes;  // R, G, B

    RgbImage() = default;
    RgbImage(std::size_t h, std::size_t w)
        : height(h), width(w), planes{DenseMat(h, w), DenseMat(h, w), DenseMat(h, w)} {}

    RgbImage clamped() const {
        RgbImage out = *this;
        for (auto& plane : out.planes)
            for (double& v : plane.entries()) v = std::min(1.0, std::max(0.0, v));
        return out;
    }
};

/// 3x3 cross-channel mixing matrix; rows sum to one and the diagonal
/// dominates, so total intensity is preserved.
struct CrossChannelMatrix {
    DenseMat m;  // 3 x 3

    explicit CrossChannelMatrix(DenseMat m_in) : m(std::move(m_in)) {
        if (m.rows() != 3 || m.cols() != 3)
            throw std::invalid_argument("cross-channel matrix must be 3x3");
        for (std::size_t i = 0; i < 3; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                s += m(i, j);
                if (j != i && !(m(i, i) > m(i, j)))
                    throw std::invalid_argument("cross-channel matrix must be diagonally dominant");
            }
            if (std::abs(s - 1.0) > 1.0e-12)
                throw std::invalid_argument("cross-channel rows must sum to 1");
        }
    }
};

/// The paper's typical cross-channel blur.
inline CrossChannelMatrix cross_channel_default() {
    return CrossChannelMatrix(DenseMat::from_rows({{0.90, 0.05, 0.05},
                                                   {0.00, 0.90, 0.10},
                                                   {0.05, 0.10, 0.85}}));
}

/// Rotationally symmetric Gaussian point-spread function, normalized to
/// sum one.
struct PsfKernel {
    std::size_t size = 1;  // odd
    double sigma = 1.0;
    DenseMat weights;  // size x size
};

inline PsfKernel gaussian_kernel(std::size_t size, double sigma) {
    if (size % 2 == 0 || size == 0)
        throw std::invalid_argument("gaussian_kernel: size must be odd and positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    const long c = static_cast<long>(size) / 2;
    DenseMat w(size, size);
    double total = 0.0;
    for (long i = 0; i < static_cast<long>(size); ++i)
        for (long j = 0; j < static_cast<long>(size); ++j) {
            const double dx = static_cast<double>(i - c);
            const double dy = static_cast<double>(j - c);
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            w(i, j) = v;
            total += v;
        }
    w *= 1.0 / total;
    return PsfKernel{size, sigma, std::move(w)};
}

/// X = (vec(R) | vec(G) | vec(B)), an hw x 3 matrix.
inline DenseMat channels_to_columns(const RgbImage& img) {
    const std::size_t hw = img.height * img.width;
    DenseMat x(hw, 3);
    for (std::size_t c = 0; c < 3; ++c) {
        const std::vector<double> v = vec(img.planes[c]);
        for (std::size_t i = 0; i < hw; ++i) x(i, c) = v[i];
    }
    return x;
}

inline RgbImage columns_to_channels(const DenseMat& x, std::size_t h, std::size_t w) {
    if (x.rows() != h * w || x.cols() != 3)
        throw std::invalid_argument("columns_to_channels: shape mismatch");
    RgbImage img(h, w);
    for (std::size_t c = 0; c < 3; ++c) {
        std::vector<double> v(h * w);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = x(i, c);
        img.planes[c] = unvec(v, h, w);
    }
    return img;
}

/// Peak signal-to-noise ratio in dB over all three channels jointly, with
/// peak 1.0. Identical images report +infinity.
inline double psnr(const RgbImage& reference, const RgbImage& test) {
    if (reference.height != test.height || reference.width != test.width)
        throw std::invalid_argument("psnr: dimension mismatch");
    double mse = 0.0;
    const double count = 3.0 * static_cast<double>(reference.height * reference.width);
    for (std::size_t c = 0; c < 3; ++c) {
        const auto& a = reference.planes[c].entries();
        const auto& b = test.planes[c].entries();
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            mse += d * d;
        }
    }
    mse /= count;
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

/// Deterministic synthetic test image: smooth gradients, solid rectangles,
/// and per-channel phase shifts, so blurring costs several dB.
inline RgbImage synthetic_test_image(std::size_t h, std::size_t w) {
    RgbImage img(h, w);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            const double y = static_cast<double>(i) / static_cast<double>(h - 1);
            const double x = static_cast<double>(j) / static_cast<double>(w - 1);
            img.planes[0](i, j) = 0.25 + 0.5 * x;
            img.planes[1](i, j) = 0.25 + 0.5 * y;
            img.planes[2](i, j) =
                0.5 + 0.35 * std::sin(2.0 * pi * (x + 0.13)) * std::sin(2.0 * pi * (y + 0.31));
        }
    }
    const auto rect = [&](std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1,
                          double rr, double gg, double bb) {
        for (std::size_t i = r0; i < r1 && i < h; ++i)
            for (std::size_t j = c0; j < c1 && j < w; ++j) {
                img.planes[0](i, j) = rr;
                img.planes[1](i, j) = gg;
                img.planes[2](i, j) = bb;
            }
    };
    rect(h / 8, 3 * h / 8, w / 8, 3 * w / 8, 0.95, 0.10, 0.15);
    rect(h / 2, 7 * h / 8, w / 2, 13 * w / 16, 0.05, 0.90, 0.85);
    rect(3 * h / 4, 13 * h / 16, w / 8, 7 * w / 16, 0.90, 0.90, 0.05);
    rect(h / 16, 3 * h / 16, 5 * w / 8, 15 * w / 16, 0.10, 0.15, 0.95);
    return img;
}

}  // namespace kaczmarz
