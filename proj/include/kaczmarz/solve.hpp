#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kaczmarz/problem.hpp"
#include "kaczmarz/rng.hpp"
#include "kaczmarz/row_action.hpp"
#include "kaczmarz/selection.hpp"
#include "kaczmarz/solver_config.hpp"
#include "kaczmarz/svd.hpp"
#include "kaczmarz/transforms.hpp"

namespace kaczmarz {

enum class Method { BK, BkFullCol, BkFullRow, RBK, GRBK, RGRBK, MWRBK, GI };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::BK: return "BK";
        case Method::BkFullCol: return "BK_FULLCOL";
        case Method::BkFullRow: return "BK_FULLROW";
        case Method::RBK: return "RBK";
        case Method::GRBK: return "GRBK";
        case Method::RGRBK: return "RGRBK";
        case Method::MWRBK: return "MWRBK";
        case Method::GI: return "GI";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "BK") return Method::BK;
    if (s == "BK_FULLCOL") return Method::BkFullCol;
    if (s == "BK_FULLROW") return Method::BkFullRow;
    if (s == "RBK") return Method::RBK;
    if (s == "GRBK") return Method::GRBK;
    if (s == "RGRBK") return Method::RGRBK;
    if (s == "MWRBK") return Method::MWRBK;
    if (s == "GI") return Method::GI;
    throw std::invalid_argument("unknown method: " + s);
}

inline bool method_is_deterministic(Method m) {
    return m == Method::BK || m == Method::BkFullCol || m == Method::BkFullRow ||
           m == Method::MWRBK || m == Method::GI;
}

struct TraceRecord {
    long k = 0;    // steps completed when the record was taken
    long row = -1; // selected row of that step (-1 for GI)
    std::optional<double> rse;
    std::optional<double> res_fro;
    std::optional<double> wall_s;
};

enum class StopReason { Converged, MaxIters };

struct SolveReport {
    Method method = Method::BK;
    DenseMat x;
    long iterations = 0;
    StopReason reason = StopReason::MaxIters;
    std::string detail;
    std::vector<TraceRecord> trace;
    double wall_s = 0.0;      // solve loop only
    double alpha_used = 0.0;
    double theta_used = 0.0;
    std::optional<double> max_error_increase;  // set when monotonicity tracking is on
    std::vector<long> selected_rows;           // filled when record_selection is on
};

namespace detail {

struct StopState {
    StopRule rule;
    double tol;
};

inline StopState resolve_stop(const Problem& pr, const SolverConfig& cfg) {
    StopState s{cfg.stop.rule, cfg.stop.tol};
    if (s.rule == StopRule::UpdateNormBelow && s.tol <= 0.0)
        s.tol = 1.0e-8 * frobenius_norm(pr.c) / std::sqrt(pr.a_fro_sq);
    if (s.rule != StopRule::UpdateNormBelow && s.tol <= 0.0)
        throw std::invalid_argument("this stop rule needs an explicit positive tolerance");
    if (s.rule == StopRule::RseBelow && !pr.x_star)
        throw std::invalid_argument("rse stop rule requires a problem with x_star");
    return s;
}

inline SolveReport run_row_action(const Problem& pr, Method method, const SolverConfig& cfg) {
    double theta = cfg.theta;
    if (method == Method::GRBK) theta = 0.5;
    if (method == Method::MWRBK) theta = 1.0;
    if (theta < 0.0 || theta > 1.0) throw std::invalid_argument("theta must be in [0,1]");

    const double b_norm = spectral_norm(pr.b);
    const double alpha = cfg.alpha.value_or(1.0 / (b_norm * b_norm));
    if (!(alpha > 0.0) || !(alpha * b_norm * b_norm < 2.0))
        throw std::invalid_argument("alpha outside (0, 2 ||B||^-2)");

    const StopState stop = resolve_stop(pr, cfg);

    DenseMat x = cfg.x0 ? *cfg.x0 : DenseMat(pr.p(), pr.q());
    if (x.rows() != pr.p() || x.cols() != pr.q())
        throw std::invalid_argument("x0 must be p x q");

    const bool greedy =
        method == Method::GRBK || method == Method::RGRBK || method == Method::MWRBK;
    const bool cyclic = method == Method::BK;

    Rng rng(cfg.seed);
    std::optional<CdfSampler> sampler;
    if (method == Method::RBK) sampler.emplace(pr.a_row_norms_sq);

    DenseMat r;
    if (greedy) r = pr.residual(x);

    SolveReport rep;
    rep.method = method;
    rep.alpha_used = alpha;
    rep.theta_used = greedy ? theta : 0.0;
    rep.x = std::move(x);

    const DenseMat* xs = pr.x_star ? &*pr.x_star : nullptr;
    const double xs_norm = xs ? frobenius_norm(*xs) : 0.0;
    const bool need_err = (stop.rule == StopRule::RseBelow) ||
                          (cfg.track_error_monotonicity && xs != nullptr);
    double err_prev = (need_err && xs) ? frobenius_distance(rep.x, *xs) : 0.0;
    double max_inc = 0.0;

    const long stride = cfg.effective_trace_stride();
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&t0]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    long done = 0;
    StopReason reason = StopReason::MaxIters;
    std::string why = "max_iters reached";

    while (done < cfg.max_iters) {
        std::size_t i = 0;
        double upd = 0.0;
        if (greedy) {
            const std::vector<double> res_rows = detail::residual_row_norms_sq(r);
            double res_sq = 0.0;
            for (double v : res_rows) res_sq += v;
            if (stop.rule == StopRule::ResidualFroBelow && std::sqrt(res_sq) <= stop.tol) {
                reason = StopReason::Converged;
                why = "residual norm below tolerance";
                break;
            }
            if (res_sq == 0.0) {
                reason = StopReason::Converged;
                why = "residual exactly zero";
                break;
            }
            if (method == Method::MWRBK) {
                i = detail::argmax_ratio_row(res_rows, pr.a_row_norms_sq);
            } else {
                const SelectionDiagnostics diag = detail::greedy_threshold_rows(
                    res_rows, pr.a_row_norms_sq, pr.a_fro_sq, theta);
                i = greedy_sample(rng, diag);
            }
            upd = residual_row_step(rep.x, r, pr, i, alpha);
            if (cfg.residual_refresh_every > 0 &&
                (done + 1) % cfg.residual_refresh_every == 0)
                r = pr.residual(rep.x);
        } else {
            i = cyclic ? cyclic_index(done, pr.m()) : rbk_sample(rng, *sampler);
            upd = row_step(rep.x, pr, i, alpha);
        }
        ++done;
        if (cfg.record_selection) rep.selected_rows.push_back(static_cast<long>(i));

        std::optional<double> rse_now;
        if (need_err) {
            const double err = frobenius_distance(rep.x, *xs);
            if (cfg.track_error_monotonicity) {
                max_inc = std::max(max_inc, err - err_prev);
                err_prev = err;
            }
            rse_now = xs_norm > 0.0 ? err / xs_norm : err;
        }

        std::optional<double> res_fro_now;
        if (stop.rule == StopRule::ResidualFroBelow && !greedy &&
            done % static_cast<long>(pr.m()) == 0)
            res_fro_now = frobenius_norm(pr.residual(rep.x));

        bool stop_now = false;
        switch (stop.rule) {
            case StopRule::UpdateNormBelow:
                stop_now = upd <= stop.tol;
                if (stop_now) why = "rank-one update norm below tolerance";
                break;
            case StopRule::RseBelow:
                stop_now = rse_now && *rse_now <= stop.tol;
                if (stop_now) why = "relative solution error below tolerance";
                break;
            case StopRule::ResidualFroBelow:
                if (greedy) res_fro_now = frobenius_norm(r);
                stop_now = res_fro_now && *res_fro_now <= stop.tol;
                if (stop_now) why = "residual norm below tolerance";
                break;
        }

        if (done % stride == 0 || stop_now || done == cfg.max_iters) {
            TraceRecord tr;
            tr.k = done;
            tr.row = static_cast<long>(i);
            if (xs) tr.rse = rse_now ? rse_now
                                     : std::optional<double>(
                                           xs_norm > 0.0
                                               ? frobenius_distance(rep.x, *xs) / xs_norm
                                               : frobenius_distance(rep.x, *xs));
            if (greedy)
                tr.res_fro = frobenius_norm(r);
            else if (res_fro_now)
                tr.res_fro = res_fro_now;
            if (cfg.record_wall) tr.wall_s = elapsed();
            rep.trace.push_back(tr);
        }
        if (stop_now) {
            reason = StopReason::Converged;
            break;
        }
    }

    rep.iterations = done;
    rep.reason = reason;
    rep.detail = why;
    rep.wall_s = elapsed();
    if (cfg.track_error_monotonicity && xs) rep.max_error_increase = max_inc;
    return rep;
}

inline SolveReport run_gi(const Problem& pr, const SolverConfig& cfg) {
    const double b_norm = spectral_norm(pr.b);
    const double a_norm = spectral_norm_estimate(pr.a);
    const double cap = a_norm * a_norm * b_norm * b_norm;
    const double alpha = cfg.alpha.value_or(1.0 / cap);
    if (!(alpha > 0.0) || !(alpha * cap < 2.0))
        throw std::invalid_argument("GI alpha outside (0, 2 ||A||^-2 ||B||^-2)");

    const StopState stop = resolve_stop(pr, cfg);

    SolveReport rep;
    rep.method = Method::GI;
    rep.alpha_used = alpha;
    rep.x = cfg.x0 ? *cfg.x0 : DenseMat(pr.p(), pr.q());
    if (rep.x.rows() != pr.p() || rep.x.cols() != pr.q())
        throw std::invalid_argument("x0 must be p x q");

    const DenseMat* xs = pr.x_star ? &*pr.x_star : nullptr;
    const double xs_norm = xs ? frobenius_norm(*xs) : 0.0;
    const bool need_err = stop.rule == StopRule::RseBelow;

    const long stride = cfg.effective_trace_stride();
    const auto t0 = std::chrono::steady_clock::now();
    const auto elapsed = [&t0]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    long done = 0;
    StopReason reason = StopReason::MaxIters;
    std::string why = "max_iters reached";
    double last_res_fro = 0.0;

    while (done < cfg.max_iters) {
        if (stop.rule == StopRule::ResidualFroBelow) {
            last_res_fro = frobenius_norm(pr.residual(rep.x));
            if (last_res_fro <= stop.tol) {
                reason = StopReason::Converged;
                why = "residual norm below tolerance";
                break;
            }
        }
        const double upd = gi_step(rep.x, pr, alpha);
        ++done;

        std::optional<double> rse_now;
        if (need_err && xs)
            rse_now = xs_norm > 0.0 ? frobenius_distance(rep.x, *xs) / xs_norm
                                    : frobenius_distance(rep.x, *xs);

        bool stop_now = false;
        if (stop.rule == StopRule::UpdateNormBelow) {
            stop_now = upd <= stop.tol;
            if (stop_now) why = "update norm below tolerance";
        } else if (stop.rule == StopRule::RseBelow) {
            stop_now = rse_now && *rse_now <= stop.tol;
            if (stop_now) why = "relative solution error below tolerance";
        }

        if (done % stride == 0 || stop_now || done == cfg.max_iters) {
            TraceRecord tr;
            tr.k = done;
            tr.row = -1;
            if (xs) tr.rse = rse_now ? rse_now
                                     : std::optional<double>(
                                           xs_norm > 0.0
                                               ? frobenius_distance(rep.x, *xs) / xs_norm
                                               : frobenius_distance(rep.x, *xs));
            if (stop.rule == StopRule::ResidualFroBelow) tr.res_fro = last_res_fro;
            if (cfg.record_wall) tr.wall_s = elapsed();
            rep.trace.push_back(tr);
        }
        if (stop_now) {
            reason = StopReason::Converged;
            break;
        }
    }

    rep.iterations = done;
    rep.reason = reason;
    rep.detail = why;
    rep.wall_s = elapsed();
    return rep;
}

}  // namespace detail

/// Runs one of the seven row-action schemes or the GI baseline on a
/// consistent problem. The full-rank variants first rewrite the equation
/// (B <- Q or B <- I); the returned X solves the original problem.
/// Hitting max_iters is reported as a stop reason, not thrown.
inline SolveReport solve(const Problem& pr, Method method, const SolverConfig& cfg) {
    switch (method) {
        case Method::BkFullCol: {
            const TransformedProblem t = transform_fullcol(pr);
            SolveReport rep = detail::run_row_action(t.problem, Method::BK, cfg);
            rep.method = Method::BkFullCol;
            return rep;
        }
        case Method::BkFullRow: {
            const TransformedProblem t = transform_fullrow(pr);
            SolveReport rep = detail::run_row_action(t.problem, Method::BK, cfg);
            rep.method = Method::BkFullRow;
            return rep;
        }
        case Method::GI:
            return detail::run_gi(pr, cfg);
        default:
            return detail::run_row_action(pr, method, cfg);
    }
}

}  // namespace kaczmarz
