#pragma once

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "kaczmarz/blur.hpp"
#include "kaczmarz/matrix_market.hpp"
#include "kaczmarz/ppm_io.hpp"
#include "kaczmarz/random_problem.hpp"
#include "kaczmarz/solve.hpp"

namespace kaczmarz {

/// Problem sources an experiment can draw from.
struct MatrixMarketSource {
    std::string a_path;
    std::string b_path;
    std::string c_path;          // empty: synthesize C = A X B from a seeded X
    std::uint64_t synth_seed = 7;
};

struct RandomSource {
    RandomProblemSpec spec;
};

struct ImageSource {
    std::string image_path;  // empty: built-in synthetic image
    std::size_t height = 32;
    std::size_t width = 32;
    Boundary boundary = Boundary::Reflexive;
    std::size_t kernel_size = 5;
    double kernel_sigma = 6.0;
};

using ProblemSource = std::variant<MatrixMarketSource, RandomSource, ImageSource>;

struct ExperimentSpec {
    ProblemSource source;
    std::vector<Method> methods;
    SolverConfig config;
    int trials = 20;
};

/// Spread of iteration counts or wall times across trials; sd is absent for
/// deterministic methods (single run, printed as "--").
struct TrialStats {
    double mean = 0.0;
    std::optional<double> sd;
    double min = 0.0;
    double max = 0.0;
};

inline TrialStats make_trial_stats(const std::vector<double>& xs, bool deterministic) {
    TrialStats s;
    if (xs.empty()) return s;
    double sum = 0.0;
    s.min = xs[0];
    s.max = xs[0];
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    s.mean = sum / static_cast<double>(xs.size());
    if (!deterministic) {
        double acc = 0.0;
        for (double x : xs) acc += (x - s.mean) * (x - s.mean);
        s.sd = xs.size() > 1 ? std::sqrt(acc / static_cast<double>(xs.size() - 1)) : 0.0;
    }
    return s;
}

struct MethodTrialResult {
    Method method = Method::BK;
    TrialStats iterations;
    TrialStats cpu_seconds;
    double cpu_per_iteration = 0.0;
    std::vector<double> raw_iterations;
    std::vector<double> raw_cpu;
    SolveReport last_report;  // trace of the final trial
    std::string error;        // nonempty if every trial failed
};

inline Problem build_problem(const ProblemSource& source) {
    if (const auto* mm = std::get_if<MatrixMarketSource>(&source)) {
        const SparseRowMat a = read_matrix_market(mm->a_path);
        const DenseMat b = read_matrix_market(mm->b_path).to_dense();
        DenseMat c;
        if (!mm->c_path.empty()) {
            c = read_matrix_market(mm->c_path).to_dense();
            return Problem(a, b, c);
        }
        Rng rng(mm->synth_seed);
        const DenseMat x = detail::randn_mat(rng, a.cols(), b.rows());
        c = a.times_dense(x) * b;
        return Problem(a, b, c);
    }
    if (const auto* rs = std::get_if<RandomSource>(&source)) return random_problem(rs->spec);

    const auto& is = std::get<ImageSource>(source);
    const RgbImage img = is.image_path.empty()
                             ? synthetic_test_image(is.height, is.width)
                             : read_ppm(is.image_path);
    const PsfKernel kernel = gaussian_kernel(is.kernel_size, is.kernel_sigma);
    const SparseRowMat a = blur_matrix(kernel, img.height, img.width, is.boundary);
    const CrossChannelMatrix a_c = cross_channel_default();
    const DenseMat c = forward_blur(img, a, a_c);
    return Problem(a, transpose(a_c.m), c, channels_to_columns(img));
}

/// Runs every method of the spec for `trials` seeded trials (seed = base
/// seed + trial index). Deterministic methods run once and report no SD.
/// Individual trial failures are recorded, not fatal to the batch.
inline std::vector<MethodTrialResult> run_trials(const ExperimentSpec& spec) {
    if (spec.trials < 1) throw std::invalid_argument("run_trials: trials must be >= 1");
    const Problem pr = build_problem(spec.source);

    std::vector<MethodTrialResult> results;
    for (Method method : spec.methods) {
        MethodTrialResult res;
        res.method = method;
        const bool deterministic = method_is_deterministic(method);
        const int trials = deterministic ? 1 : spec.trials;
        std::string last_error;
        for (int t = 0; t < trials; ++t) {
            SolverConfig cfg = spec.config;
            cfg.seed = spec.config.seed + static_cast<std::uint64_t>(t);
            try {
                SolveReport rep = solve(pr, method, cfg);
                res.raw_iterations.push_back(static_cast<double>(rep.iterations));
                res.raw_cpu.push_back(rep.wall_s);
                res.last_report = std::move(rep);
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (res.raw_iterations.empty()) {
            res.error = last_error.empty() ? "all trials failed" : last_error;
        } else {
            res.iterations = make_trial_stats(res.raw_iterations, deterministic);
            res.cpu_seconds = make_trial_stats(res.raw_cpu, deterministic);
            if (res.iterations.mean > 0.0)
                res.cpu_per_iteration = res.cpu_seconds.mean / res.iterations.mean;
        }
        results.push_back(std::move(res));
    }
    return results;
}

/// Summary table in the paper's reporting scheme: IT, CPU, SD, Range, CPU/IT.
inline void print_bench_table(std::ostream& os, const std::vector<MethodTrialResult>& rs) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-12s %12s %10s %10s %22s %12s", "Method", "IT", "CPU",
                  "SD", "Range", "CPU/IT");
    os << buf << "\n";
    for (const auto& r : rs) {
        if (!r.error.empty()) {
            std::snprintf(buf, sizeof(buf), "%-12s failed: %s", method_name(r.method),
                          r.error.c_str());
            os << buf << "\n";
            continue;
        }
        std::string sd = "--", range = "--";
        if (r.cpu_seconds.sd) {
            char tmp[64];
            std::snprintf(tmp, sizeof(tmp), "%.3g", *r.cpu_seconds.sd);
            sd = tmp;
            std::snprintf(tmp, sizeof(tmp), "[%.3g, %.3g]", r.cpu_seconds.min,
                          r.cpu_seconds.max);
            range = tmp;
        }
        std::snprintf(buf, sizeof(buf), "%-12s %12.1f %10.3f %10s %22s %12.3g",
                      method_name(r.method), r.iterations.mean, r.cpu_seconds.mean,
                      sd.c_str(), range.c_str(), r.cpu_per_iteration);
        os << buf << "\n";
    }
}

}  // namespace kaczmarz
