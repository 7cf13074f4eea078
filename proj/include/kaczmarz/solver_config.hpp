#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "kaczmarz/dense_matrix.hpp"

namespace kaczmarz {

enum class StopRule { UpdateNormBelow, RseBelow, ResidualFroBelow };

struct StopSpec {
    StopRule rule = StopRule::UpdateNormBelow;
    /// Threshold; <= 0 selects the default 1e-8 ||C||_F / ||A||_F for the
    /// update-norm rule (the other rules require an explicit tolerance).
    double tol = -1.0;
};

inline StopSpec parse_stop_spec(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("stop spec must look like rule:tol");
    const std::string rule = text.substr(0, colon);
    const double tol = std::stod(text.substr(colon + 1));
    StopSpec s;
    s.tol = tol;
    if (rule == "update_norm_below")
        s.rule = StopRule::UpdateNormBelow;
    else if (rule == "rse_below")
        s.rule = StopRule::RseBelow;
    else if (rule == "residual_fro_below")
        s.rule = StopRule::ResidualFroBelow;
    else
        throw std::invalid_argument("unknown stop rule: " + rule);
    return s;
}

/// Per-solve options. `alpha` empty means the per-method default:
/// ||B||^{-2} for row-action methods, ||A||^{-2} ||B||^{-2} for GI.
/// The admissible range is enforced when a solve starts.
struct SolverConfig {
    std::optional<double> alpha;
    double theta = 0.75;  // RGRBK relaxation, in [0, 1]
    long max_iters = 500000;
    std::uint64_t seed = 1;
    StopSpec stop;
    long residual_refresh_every = 10000;
    long trace_stride = 0;  // 0 -> max(1, max_iters / 10000)
    std::optional<DenseMat> x0;
    bool track_error_monotonicity = false;
    bool record_wall = true;
    bool record_selection = false;

    long effective_trace_stride() const {
        if (trace_stride > 0) return trace_stride;
        return std::max<long>(1, max_iters / 10000);
    }
};

}  // namespace kaczmarz
