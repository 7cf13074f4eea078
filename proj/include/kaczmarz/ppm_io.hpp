#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaczmarz/dense_matrix.hpp"
#include "kaczmarz/image.hpp"

namespace kaczmarz {

namespace detail {

inline int next_pnm_token(std::istream& in) {
    // skips whitespace and '#' comment lines, returns the next integer
    while (true) {
        const int c = in.peek();
        if (c == EOF) throw std::runtime_error("pnm: unexpected end of header");
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        int value = 0;
        in >> value;
        if (!in) throw std::runtime_error("pnm: malformed header");
        return value;
    }
}

inline std::uint8_t quantize_unit(double v) {
    v = std::min(1.0, std::max(0.0, v));
    // round half away from zero; v is nonnegative here
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

}  // namespace detail

/// Binary PPM (P6, 8-bit, maxval 255).
inline RgbImage read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error("not a binary PPM (P6): " + path);
    const int w = detail::next_pnm_token(in);
    const int h = detail::next_pnm_token(in);
    const int maxval = detail::next_pnm_token(in);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("unsupported PPM geometry or maxval in " + path);
    in.get();  // single whitespace after header
    std::vector<char> raw(static_cast<std::size_t>(w) * h * 3);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("truncated PPM payload in " + path);
    RgbImage img(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
    std::size_t idx = 0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            for (int c = 0; c < 3; ++c)
                img.planes[static_cast<std::size_t>(c)](static_cast<std::size_t>(i),
                                                        static_cast<std::size_t>(j)) =
                    static_cast<double>(static_cast<std::uint8_t>(raw[idx++])) / 255.0;
    return img;
}

inline void write_ppm(const RgbImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    std::vector<char> raw;
    raw.reserve(img.height * img.width * 3);
    for (std::size_t i = 0; i < img.height; ++i)
        for (std::size_t j = 0; j < img.width; ++j)
            for (std::size_t c = 0; c < 3; ++c)
                raw.push_back(static_cast<char>(detail::quantize_unit(img.planes[c](i, j))));
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

/// Binary PGM (P5, 8-bit) for single channels.
inline DenseMat read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5") throw std::runtime_error("not a binary PGM (P5): " + path);
    const int w = detail::next_pnm_token(in);
    const int h = detail::next_pnm_token(in);
    const int maxval = detail::next_pnm_token(in);
    if (w <= 0 || h <= 0 || maxval != 255)
        throw std::runtime_error("unsupported PGM geometry or maxval in " + path);
    in.get();
    std::vector<char> raw(static_cast<std::size_t>(w) * h);
    in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size()))
        throw std::runtime_error("truncated PGM payload in " + path);
    DenseMat m(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
    std::size_t idx = 0;
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                static_cast<double>(static_cast<std::uint8_t>(raw[idx++])) / 255.0;
    return m;
}

inline void write_pgm(const DenseMat& gray, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "P5\n" << gray.cols() << " " << gray.rows() << "\n255\n";
    std::vector<char> raw;
    raw.reserve(gray.rows() * gray.cols());
    for (std::size_t i = 0; i < gray.rows(); ++i)
        for (std::size_t j = 0; j < gray.cols(); ++j)
            raw.push_back(static_cast<char>(detail::quantize_unit(gray(i, j))));
    out.write(raw.data(), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace kaczmarz
