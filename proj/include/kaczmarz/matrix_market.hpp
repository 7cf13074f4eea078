#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaczmarz/sparse_matrix.hpp"

namespace kaczmarz {

/// Matrix Market coordinate reader. Accepts real | integer | pattern entries
/// and general | symmetric storage; 1-based indices become 0-based, pattern
/// entries become 1.0, symmetric entries are mirrored, duplicates summed.
inline SparseRowMat read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);

    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty file: " + path);
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    std::transform(object.begin(), object.end(), object.begin(), ::tolower);
    std::transform(format.begin(), format.end(), format.begin(), ::tolower);
    std::transform(field.begin(), field.end(), field.begin(), ::tolower);
    std::transform(symmetry.begin(), symmetry.end(), symmetry.begin(), ::tolower);
    if (banner != "%%MatrixMarket" || object != "matrix" || format != "coordinate")
        throw std::runtime_error("not a MatrixMarket coordinate file: " + path);
    const bool pattern = field == "pattern";
    if (field != "real" && field != "integer" && !pattern)
        throw std::runtime_error("unsupported MatrixMarket field: " + field);
    const bool symmetric = symmetry == "symmetric";
    if (symmetry != "general" && !symmetric)
        throw std::runtime_error("unsupported MatrixMarket symmetry: " + symmetry);

    std::string line;
    std::size_t rows = 0, cols = 0, nnz = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        if (!(ss >> rows >> cols >> nnz))
            throw std::runtime_error("malformed size line in " + path);
        break;
    }
    if (rows == 0 || cols == 0) throw std::runtime_error("missing size line in " + path);

    std::vector<SparseRowMat::Triplet> ts;
    ts.reserve(symmetric ? 2 * nnz : nnz);
    std::size_t seen = 0;
    while (seen < nnz && std::getline(in, line)) {
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ss(line);
        long i = 0, j = 0;
        double v = 1.0;
        if (!(ss >> i >> j)) throw std::runtime_error("malformed entry in " + path);
        if (!pattern && !(ss >> v)) throw std::runtime_error("missing value in " + path);
        if (i < 1 || j < 1 || static_cast<std::size_t>(i) > rows ||
            static_cast<std::size_t>(j) > cols)
            throw std::runtime_error("index out of range in " + path);
        const std::size_t r = static_cast<std::size_t>(i - 1);
        const std::size_t c = static_cast<std::size_t>(j - 1);
        ts.push_back({r, c, v});
        if (symmetric && r != c) ts.push_back({c, r, v});
        ++seen;
    }
    if (seen != nnz) throw std::runtime_error("entry count mismatch in " + path);
    return SparseRowMat::from_triplets(rows, cols, std::move(ts));
}

}  // namespace kaczmarz
