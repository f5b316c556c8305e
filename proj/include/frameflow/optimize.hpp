#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <deque>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frameflow/energy.hpp"
#include "frameflow/graph.hpp"

namespace frameflow
{

/**
 * @brief L-BFGS settings.
 *
 * Defaults are common practice for this method: m = 10, an infinity-norm
 * gradient threshold of 1e-6 and strong-Wolfe constants (1e-4, 0.9).
 */
struct SolverConfig {
    int memory{10};
    double grad_tol{1e-6};
    int max_iters{2000};
    double wolfe_c1{1e-4};
    double wolfe_c2{0.9};
    int max_line_search_steps{40};

    void validate() const
    {
        if (memory < 1) {
            throw std::invalid_argument("SolverConfig: memory must be >= 1");
        }
        if (!(grad_tol > 0)) {
            throw std::invalid_argument("SolverConfig: grad_tol must be > 0");
        }
        if (!(0 < wolfe_c1 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1)) {
            throw std::invalid_argument("SolverConfig: need 0 < c1 < c2 < 1");
        }
        if (max_iters < 0 || max_line_search_steps < 1) {
            throw std::invalid_argument("SolverConfig: iteration caps must be positive");
        }
    }
};

enum class SolveStatus { Converged, MaxIters, LineSearchFailed, NonFinite };

inline std::string_view to_string(SolveStatus s)
{
    switch (s) {
        case SolveStatus::Converged:
            return "converged";
        case SolveStatus::MaxIters:
            return "max_iters";
        case SolveStatus::LineSearchFailed:
            return "line_search_failed";
        case SolveStatus::NonFinite:
            return "non_finite";
    }
    return "unknown";
}

struct TracePoint {
    double f;
    double grad_norm;
};

struct SolveResult {
    std::vector<double> x;
    double f{0};
    double grad_norm{0};
    int iterations{0};
    SolveStatus status{SolveStatus::Converged};
    /// (f, grad_norm) at the start point and after every accepted step
    std::vector<TracePoint> trace;
};

/// Anything callable as f(x, grad_out) -> value.
template <class F>
concept Objective = requires(const F& f, std::span<const double> x, std::span<double> g) {
    { f(x, g) } -> std::convertible_to<double>;
};

namespace detail
{
inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

inline double inf_norm(std::span<const double> a)
{
    double m = 0;
    for (double v : a) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

/// Minimizer of the cubic interpolating f and f' at two points, clamped to [lo, hi].
inline double cubic_min(double a, double fa, double da, double b, double fb, double db, double lo, double hi)
{
    double d1 = da + db - 3 * (fa - fb) / (a - b);
    double disc = d1 * d1 - da * db;
    double t;
    if (disc >= 0) {
        double d2 = std::copysign(std::sqrt(disc), b - a);
        t = b - (b - a) * (db + d2 - d1) / (db - da + 2 * d2);
    }
    else {
        t = 0.5 * (a + b);
    }
    if (!std::isfinite(t)) {
        t = 0.5 * (a + b);
    }
    return std::clamp(t, lo, hi);
}
}  // namespace detail

/// One stored curvature pair.
struct CurvaturePair {
    std::vector<double> s;
    std::vector<double> y;
    double sy{0};
};

/**
 * @brief Two-loop recursion: returns -H g, with H the limited-memory inverse
 * Hessian seeded by gamma = s'y / y'y of the newest pair (history ordered
 * oldest first). With no history this is steepest descent.
 */
inline std::vector<double> two_loop_direction(std::span<const CurvaturePair> history,
                                              std::span<const double> grad)
{
    std::vector<double> q(grad.begin(), grad.end());
    std::vector<double> alpha(history.size());
    for (std::size_t k = history.size(); k-- > 0;) {
        const auto& p = history[k];
        if (p.s.size() != q.size() || p.y.size() != q.size()) {
            throw std::invalid_argument("two_loop_direction: dimension mismatch");
        }
        alpha[k] = detail::dot(p.s, q) / p.sy;
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] -= alpha[k] * p.y[i];
        }
    }
    if (!history.empty()) {
        const auto& last = history.back();
        double gamma = last.sy / detail::dot(last.y, last.y);
        for (double& v : q) {
            v *= gamma;
        }
    }
    for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& p = history[k];
        double beta = detail::dot(p.y, q) / p.sy;
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] += (alpha[k] - beta) * p.s[i];
        }
    }
    for (double& v : q) {
        v = -v;
    }
    return q;
}

/// Outcome of a line search; x, g and f describe the last trial point.
struct LineSearchResult {
    bool ok{false};
    double alpha{0};
    double f{0};
    std::vector<double> x;
    std::vector<double> g;
    int evaluations{0};
};

/**
 * @brief Strong-Wolfe line search (bracketing + zoom with cubic
 * interpolation), starting from alpha = 1.
 *
 * Non-finite trial values are treated as overshooting and shrink the
 * bracket. Fails after max_line_search_steps evaluations.
 */
template <Objective F>
LineSearchResult line_search_wolfe(const F& fn, std::span<const double> x, std::span<const double> dir,
                                   double f0, double g0dotdir, const SolverConfig& cfg)
{
    if (!(g0dotdir < 0)) {
        throw std::invalid_argument("line_search_wolfe: direction is not a descent direction");
    }
    if (x.size() != dir.size()) {
        throw std::invalid_argument("line_search_wolfe: dimension mismatch");
    }
    const std::size_t n = x.size();
    LineSearchResult res;
    res.x.resize(n);
    res.g.resize(n);

    // evaluates at a, leaving the trial point in res
    auto eval = [&](double a, double& fa, double& da) {
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] = x[i] + a * dir[i];
        }
        fa = fn(std::span<const double>(res.x), std::span<double>(res.g));
        da = detail::dot(res.g, dir);
        res.alpha = a;
        res.f = fa;
        ++res.evaluations;
        return std::isfinite(fa) && std::isfinite(da);
    };
    // near a minimum the predicted decrease drops below the rounding error of f
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(f0);
    auto sufficient = [&](double a, double fa) { return fa <= f0 + cfg.wolfe_c1 * a * g0dotdir + slack; };
    auto curvature = [&](double da) { return std::abs(da) <= cfg.wolfe_c2 * std::abs(g0dotdir); };

    // lo satisfies sufficient decrease and has the lowest value seen so far
    auto zoom = [&](double lo, double flo, double dlo, double hi, double fhi, double dhi, bool hi_valid) {
        while (res.evaluations < cfg.max_line_search_steps) {
            double left = std::min(lo, hi);
            double right = std::max(lo, hi);
            double width = right - left;
            if (width <= 1e-16 * std::max(1.0, right)) {
                return false;
            }
            double a = hi_valid ? detail::cubic_min(lo, flo, dlo, hi, fhi, dhi, left + 0.1 * width,
                                                    right - 0.1 * width)
                                : 0.5 * (lo + hi);
            double fa, da;
            bool finite = eval(a, fa, da);
            if (!finite || !sufficient(a, fa) || fa >= flo) {
                hi = a;
                fhi = fa;
                dhi = da;
                hi_valid = finite;
                continue;
            }
            if (curvature(da)) {
                return true;
            }
            if (da * (hi - lo) >= 0) {
                hi = lo;
                fhi = flo;
                dhi = dlo;
                hi_valid = true;
            }
            lo = a;
            flo = fa;
            dlo = da;
        }
        return false;
    };

    double prev = 0, fprev = f0, dprev = g0dotdir;
    double a = 1.0;
    while (res.evaluations < cfg.max_line_search_steps) {
        double fa, da;
        bool finite = eval(a, fa, da);
        if (!finite || !sufficient(a, fa) || (res.evaluations > 1 && fa >= fprev)) {
            res.ok = zoom(prev, fprev, dprev, a, fa, da, finite);
            return res;
        }
        if (curvature(da)) {
            res.ok = true;
            return res;
        }
        if (da >= 0) {
            res.ok = zoom(a, fa, da, prev, fprev, dprev, true);
            return res;
        }
        prev = a;
        fprev = fa;
        dprev = da;
        a = std::min(2.0 * a, 1e20);
    }
    return res;
}

/**
 * @brief Limited-memory BFGS.
 *
 * Iterates until the gradient infinity norm drops to grad_tol, max_iters is
 * reached, or the line search fails. Curvature pairs with
 * s'y <= 1e-10 |s| |y| are not stored. After a line-search failure with a
 * non-empty history the history is cleared and one steepest-descent step is
 * attempted before giving up. Steepest-descent steps are scaled so the first
 * trial step is at most unit length.
 */
template <Objective F>
SolveResult minimize(const F& fn, std::vector<double> x0, const SolverConfig& cfg = {})
{
    cfg.validate();
    const std::size_t n = x0.size();
    for (double v : x0) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("minimize: non-finite start point");
        }
    }
    SolveResult res;
    res.x = std::move(x0);
    std::vector<double> g(n);
    res.f = fn(std::span<const double>(res.x), std::span<double>(g));
    res.grad_norm = detail::inf_norm(g);
    if (!std::isfinite(res.f) || !std::isfinite(res.grad_norm)) {
        res.status = SolveStatus::NonFinite;
        return res;
    }
    res.trace.push_back({res.f, res.grad_norm});

    std::deque<CurvaturePair> history;
    std::vector<CurvaturePair> window;
    // without curvature information the first trial step has unit length
    auto steepest = [](std::span<const double> grad) {
        auto d = two_loop_direction({}, grad);
        double len = std::sqrt(detail::dot(d, d));
        if (len > 1.0) {
            for (double& v : d) {
                v /= len;
            }
        }
        return d;
    };
    while (true) {
        if (res.grad_norm <= cfg.grad_tol) {
            res.status = SolveStatus::Converged;
            return res;
        }
        if (res.iterations >= cfg.max_iters) {
            res.status = SolveStatus::MaxIters;
            return res;
        }
        window.assign(history.begin(), history.end());
        auto dir = two_loop_direction(window, g);
        double slope = detail::dot(g, dir);
        if (!(slope < 0)) {
            history.clear();
            dir = steepest(g);
            slope = detail::dot(g, dir);
        }
        else if (history.empty()) {
            dir = steepest(g);
            slope = detail::dot(g, dir);
        }
        auto ls = line_search_wolfe(fn, res.x, dir, res.f, slope, cfg);
        if (!ls.ok && !history.empty()) {
            history.clear();
            dir = steepest(g);
            slope = detail::dot(g, dir);
            ls = line_search_wolfe(fn, res.x, dir, res.f, slope, cfg);
        }
        if (!ls.ok) {
            res.status = SolveStatus::LineSearchFailed;
            return res;
        }

        CurvaturePair pair;
        pair.s.resize(n);
        pair.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pair.s[i] = ls.x[i] - res.x[i];
            pair.y[i] = ls.g[i] - g[i];
        }
        pair.sy = detail::dot(pair.s, pair.y);
        double ss = std::sqrt(detail::dot(pair.s, pair.s));
        double yy = std::sqrt(detail::dot(pair.y, pair.y));
        if (pair.sy > 1e-10 * ss * yy && pair.sy > 0) {
            history.push_back(std::move(pair));
            if (history.size() > static_cast<std::size_t>(cfg.memory)) {
                history.pop_front();
            }
        }

        res.x = std::move(ls.x);
        g = std::move(ls.g);
        res.f = ls.f;
        res.grad_norm = detail::inf_norm(g);
        ++res.iterations;
        res.trace.push_back({res.f, res.grad_norm});
    }
}

/**
 * @brief Minimize the frame energy over the free nodes starting from theta0.
 *
 * Constrained entries of the result are copied from the graph, never
 * touched by the solver. The full SolveResult (status, trace) is written to
 * result_out when given.
 */
inline FrameField solve_field_lbfgs(const FieldGraph& graph, std::span<const double> theta0,
                                    const SolverConfig& cfg, Provenance prov = {"lbfgs", "none", {}},
                                    SolveResult* result_out = nullptr)
{
    detail::check_length(graph, theta0.size(), "solve_field_lbfgs");
    for (std::size_t i = 0; i < theta0.size(); ++i) {
        const auto& c = graph.constraints()[i];
        if (c && theta0[i] != *c) {
            throw std::invalid_argument("solve_field_lbfgs: theta0 violates constraint at node " +
                                        std::to_string(i));
        }
    }
    EnergyModel model(graph);
    auto result = minimize(model, model.restrict(theta0), cfg);
    auto field = make_field(graph, model.assemble(result.x), std::move(prov));
    if (result_out) {
        *result_out = std::move(result);
    }
    return field;
}

}  // namespace frameflow
