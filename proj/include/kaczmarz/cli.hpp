#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "kaczmarz/experiment.hpp"
#include "kaczmarz/ppm_io.hpp"
#include "kaczmarz/trace_csv.hpp"
#include "kaczmarz/verification.hpp"

namespace kaczmarz {

namespace cli_detail {

struct SolverOpts {
    std::string method = "MWRBK";
    std::string alpha = "auto";
    double theta = 0.75;
    std::uint64_t seed = 1;
    long max_iters = 500000;
    std::string stop;
    bool no_timing = false;
};

inline void add_solver_flags(CLI::App* cmd, SolverOpts& o) {
    cmd->add_option("--method", o.method,
                    "BK|BK_FULLCOL|BK_FULLROW|RBK|GRBK|RGRBK|MWRBK|GI");
    cmd->add_option("--alpha", o.alpha,
                    "stepsize; 'auto' picks ||B||^-2 (GI: ||A||^-2 ||B||^-2)");
    cmd->add_option("--theta", o.theta, "RGRBK relaxation in [0,1]");
    cmd->add_option("--seed", o.seed, "base RNG seed");
    cmd->add_option("--max-iters", o.max_iters, "iteration cap");
    cmd->add_option("--stop", o.stop,
                    "rule:tol with rule in "
                    "{update_norm_below, rse_below, residual_fro_below}");
    cmd->add_flag("--no-timing", o.no_timing,
                  "omit wall-clock fields so emitted CSVs are byte-reproducible");
}

inline SolverConfig make_config(const SolverOpts& o) {
    SolverConfig cfg;
    if (o.alpha != "auto") cfg.alpha = std::stod(o.alpha);
    cfg.theta = o.theta;
    cfg.seed = o.seed;
    cfg.max_iters = o.max_iters;
    if (!o.stop.empty()) cfg.stop = parse_stop_spec(o.stop);
    cfg.record_wall = !o.no_timing;
    return cfg;
}

struct SourceOpts {
    std::string random_dims;  // "m,p,q,n"
    std::string rank_a = "full";
    std::string rank_b = "full";
    std::string mm_a, mm_b, mm_c;
    std::uint64_t problem_seed = 7;
};

inline void add_source_flags(CLI::App* cmd, SourceOpts& o) {
    cmd->add_option("--random", o.random_dims, "random consistent problem, dims m,p,q,n");
    cmd->add_option("--rank-a", o.rank_a, "full|dup_rows|dup_cols (random source)");
    cmd->add_option("--rank-b", o.rank_b, "full|dup_rows|dup_cols (random source)");
    cmd->add_option("--mm-a", o.mm_a, "MatrixMarket file for A");
    cmd->add_option("--mm-b", o.mm_b, "MatrixMarket file for B");
    cmd->add_option("--mm-c", o.mm_c,
                    "MatrixMarket file for C (omit to synthesize C = A X B)");
    cmd->add_option("--problem-seed", o.problem_seed, "seed for generated problem data");
}

inline RankMode rank_mode_from_string(const std::string& s) {
    if (s == "full") return RankMode::Full;
    if (s == "dup_rows") return RankMode::DeficientDupRows;
    if (s == "dup_cols") return RankMode::DeficientDupCols;
    throw std::invalid_argument("unknown rank mode: " + s);
}

inline ProblemSource make_source(const SourceOpts& o) {
    if (!o.random_dims.empty()) {
        RandomProblemSpec spec;
        std::istringstream ss(o.random_dims);
        char comma = ',';
        if (!(ss >> spec.m >> comma >> spec.p >> comma >> spec.q >> comma >> spec.n))
            throw std::invalid_argument("--random expects m,p,q,n");
        spec.rank_a = rank_mode_from_string(o.rank_a);
        spec.rank_b = rank_mode_from_string(o.rank_b);
        spec.seed = o.problem_seed;
        return RandomSource{spec};
    }
    if (!o.mm_a.empty()) {
        if (o.mm_b.empty())
            throw std::invalid_argument("--mm-a requires --mm-b (and optionally --mm-c)");
        return MatrixMarketSource{o.mm_a, o.mm_b, o.mm_c, o.problem_seed};
    }
    throw std::invalid_argument("no problem source: pass --random or --mm-a/--mm-b");
}

inline std::vector<Method> parse_method_list(const std::string& csv) {
    std::vector<Method> out;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(method_from_string(tok));
    }
    if (out.empty()) throw std::invalid_argument("empty method list");
    return out;
}

inline void write_bench_csv(const std::string& path,
                            const std::vector<MethodTrialResult>& results) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,it_mean,it_min,it_max,cpu_mean,cpu_sd,cpu_min,cpu_max,cpu_per_it\n";
    for (const auto& r : results) {
        if (!r.error.empty()) continue;
        char line[320];
        std::snprintf(line, sizeof(line), "%s,%.17g,%.17g,%.17g,%.17g,%s,%.17g,%.17g,%.17g\n",
                      method_name(r.method), r.iterations.mean, r.iterations.min,
                      r.iterations.max, r.cpu_seconds.mean,
                      r.cpu_seconds.sd ? detail::format_g17(*r.cpu_seconds.sd).c_str()
                                       : "",
                      r.cpu_seconds.min, r.cpu_seconds.max, r.cpu_per_iteration);
        out << line;
    }
}

}  // namespace cli_detail

/// Entry point behind the `kaczmarz` binary. Exit codes: 0 success,
/// 1 runtime failure or violated invariant in `verify`, 2 usage error.
inline int cli(int argc, const char* const* argv) {
    using namespace cli_detail;
    CLI::App app{"Row-action Kaczmarz solvers for the matrix equation A X B = C"};
    app.require_subcommand(1);
    app.set_config("--config", "", "plain key=value options file (flags win)");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "run one method on one problem");
    SolverOpts solve_opts;
    SourceOpts solve_src;
    std::string solve_trace_out;
    add_solver_flags(solve_cmd, solve_opts);
    add_source_flags(solve_cmd, solve_src);
    solve_cmd->add_option("--out", solve_trace_out, "write the iteration trace CSV here");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "trial statistics across methods");
    SolverOpts bench_opts;
    SourceOpts bench_src;
    std::string bench_methods = "RBK,GRBK,RGRBK,MWRBK";
    std::string bench_out;
    int bench_trials = 20;
    add_solver_flags(bench_cmd, bench_opts);
    add_source_flags(bench_cmd, bench_src);
    bench_cmd->add_option("--methods", bench_methods, "comma-separated method list");
    bench_cmd->add_option("--trials", bench_trials, "independent trials per randomized method");
    bench_cmd->add_option("--out", bench_out, "write the summary CSV here");

    // verify
    auto* verify_cmd =
        app.add_subcommand("verify", "run the full invariant and acceptance suite");
    std::string verify_out;
    verify_cmd->add_option("--out", verify_out, "write a BoundReport sweep CSV here");

    // deblur
    auto* deblur_cmd = app.add_subcommand("deblur", "blur + restore an RGB image");
    SolverOpts deblur_opts;
    deblur_opts.stop = "rse_below:8e-2";
    std::string deblur_in, deblur_out = "restored.ppm", deblur_blurred, deblur_trace;
    std::string deblur_boundary = "reflexive";
    std::size_t deblur_size = 32, deblur_kernel = 5;
    double deblur_sigma = 6.0;
    add_solver_flags(deblur_cmd, deblur_opts);
    deblur_cmd->add_option("--in", deblur_in, "input PPM (default: built-in synthetic image)");
    deblur_cmd->add_option("--size", deblur_size, "synthetic image side length");
    deblur_cmd->add_option("--boundary", deblur_boundary, "zero|reflexive");
    deblur_cmd->add_option("--kernel-size", deblur_kernel, "odd PSF size");
    deblur_cmd->add_option("--sigma", deblur_sigma, "PSF standard deviation");
    deblur_cmd->add_option("--out", deblur_out, "restored image path");
    deblur_cmd->add_option("--save-blurred", deblur_blurred, "also write the blurred image");
    deblur_cmd->add_option("--trace", deblur_trace, "write the iteration trace CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve_cmd->parsed()) {
            const Problem pr = build_problem(make_source(solve_src));
            const SolveReport rep =
                solve(pr, method_from_string(solve_opts.method), make_config(solve_opts));
            std::cout << method_name(rep.method) << ": " << rep.iterations
                      << " iterations, " << rep.wall_s << " s, stop: " << rep.detail
                      << "\n";
            if (!rep.trace.empty() && rep.trace.back().rse)
                std::cout << "final RSE " << *rep.trace.back().rse << "\n";
            if (!solve_trace_out.empty()) write_trace_csv(rep, solve_trace_out);
            return 0;
        }
        if (bench_cmd->parsed()) {
            ExperimentSpec spec;
            spec.source = make_source(bench_src);
            spec.methods = parse_method_list(bench_methods);
            spec.config = make_config(bench_opts);
            spec.trials = bench_trials;
            const auto results = run_trials(spec);
            print_bench_table(std::cout, results);
            if (!bench_out.empty()) write_bench_csv(bench_out, results);
            for (const auto& r : results)
                if (!r.error.empty()) return 1;
            return 0;
        }
        if (verify_cmd->parsed()) {
            std::vector<CheckResult> checks = run_acceptance_checks();
            for (CheckResult& c : extra_invariant_checks()) checks.push_back(std::move(c));
            const bool ok = print_check_results(std::cout, checks);
            if (!verify_out.empty()) write_bound_sweep_csv(verify_out);
            return ok ? 0 : 1;
        }
        if (deblur_cmd->parsed()) {
            const RgbImage original = deblur_in.empty()
                                          ? synthetic_test_image(deblur_size, deblur_size)
                                          : read_ppm(deblur_in);
            const PsfKernel kernel = gaussian_kernel(deblur_kernel, deblur_sigma);
            const SparseRowMat a = blur_matrix(kernel, original.height, original.width,
                                               boundary_from_string(deblur_boundary));
            const CrossChannelMatrix a_c = cross_channel_default();
            const DenseMat c_obs = forward_blur(original, a, a_c);
            const RgbImage blurred =
                columns_to_channels(c_obs, original.height, original.width);
            if (!deblur_blurred.empty()) write_ppm(blurred, deblur_blurred);

            const auto [restored, rep] =
                deblur(c_obs, a, a_c, method_from_string(deblur_opts.method),
                       make_config(deblur_opts), original.height, original.width,
                       original);
            write_ppm(restored, deblur_out);
            if (!deblur_trace.empty()) write_trace_csv(rep, deblur_trace);
            std::cout << method_name(rep.method) << ": " << rep.iterations
                      << " iterations, " << rep.wall_s << " s, stop: " << rep.detail
                      << "\n";
            std::cout << "PSNR blurred  " << psnr(original, blurred) << " dB\n";
            std::cout << "PSNR restored " << psnr(original, restored) << " dB\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace kaczmarz
