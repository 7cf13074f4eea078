#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace kaczmarz {

/// SplitMix64 counter generator. One instance per solve; the same seed gives
/// bit-identical draws on every platform, which keeps traces reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; second deviate is cached.
    double next_normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    /// Independent child stream.
    Rng split() { return Rng(next_u64() ^ 0x55C5B5A1D4D3D2D1ULL); }

private:
    std::uint64_t state_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

/// Inverse-CDF sampling over fixed nonnegative weights via prefix sums.
class CdfSampler {
public:
    explicit CdfSampler(const std::vector<double>& weights) {
        prefix_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("negative sampling weight");
            acc += w;
            prefix_.push_back(acc);
        }
        if (prefix_.empty() || acc <= 0.0)
            throw std::invalid_argument("sampling weights must have positive total");
        total_ = acc;
    }

    std::size_t sample(Rng& rng) const {
        const double x = rng.next_double() * total_;
        std::size_t lo = 0, hi = prefix_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (prefix_[mid] > x)
                hi = mid;
            else
                lo = mid + 1;
        }
        return lo;
    }

    double total() const noexcept { return total_; }

private:
    std::vector<double> prefix_;
    double total_ = 0.0;
};

}  // namespace kaczmarz
