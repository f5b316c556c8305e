#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "frameflow/angles.hpp"
#include "frameflow/graph.hpp"

namespace frameflow
{

/**
 * @brief Representation vectors (cos 4 theta, sin 4 theta) per node, with
 * the unit-norm constraint relaxed on free nodes.
 */
struct RepresentationField {
    std::vector<Vec2> v;
};

enum class LinearMethod { Auto, ConjugateGradient, Dense };

struct RelaxOptions {
    LinearMethod method{LinearMethod::Auto};
    /// Auto switches to the dense factorization below this many unknowns.
    std::size_t dense_below{200};
    double rel_tol{1e-10};
};

struct RelaxReport {
    LinearMethod used{LinearMethod::Dense};
    int iterations{0};
    double relative_residual{0};
};

/** @brief Raised when the Dirichlet problem has no unique solution. */
class SingularSystemError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

namespace detail
{

/// Reduced graph Laplacian L_ff acting on free-node vectors.
class ReducedLaplacian
{
public:
    explicit ReducedLaplacian(const FieldGraph& g) : graph_{g}, free_{g.free_nodes()}, slot_(g.node_count(), -1)
    {
        for (std::size_t k = 0; k < free_.size(); ++k) {
            slot_[free_[k]] = static_cast<int>(k);
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return free_.size(); }
    [[nodiscard]] const std::vector<int>& free_nodes() const noexcept { return free_; }
    [[nodiscard]] int slot(int node) const { return slot_[node]; }
    [[nodiscard]] const FieldGraph& graph() const noexcept { return graph_; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const
    {
        y.assign(x.size(), 0.0);
        for (std::size_t k = 0; k < free_.size(); ++k) {
            const auto& nb = graph_.neighbors(free_[k]);
            double acc = static_cast<double>(nb.size()) * x[k];
            for (int j : nb) {
                if (slot_[j] >= 0) {
                    acc -= x[slot_[j]];
                }
            }
            y[k] = acc;
        }
    }

    [[nodiscard]] std::vector<double> dense() const
    {
        const auto n = free_.size();
        std::vector<double> a(n * n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& nb = graph_.neighbors(free_[k]);
            a[k * n + k] = static_cast<double>(nb.size());
            for (int j : nb) {
                if (slot_[j] >= 0) {
                    a[k * n + static_cast<std::size_t>(slot_[j])] -= 1.0;
                }
            }
        }
        return a;
    }

private:
    const FieldGraph& graph_;
    std::vector<int> free_;
    std::vector<int> slot_;
};

inline double norm2(const std::vector<double>& v)
{
    double s = 0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

/// Conjugate gradients from x; returns iterations used.
inline int conjugate_gradient(const ReducedLaplacian& lap, const std::vector<double>& b, std::vector<double>& x,
                              double rel_tol, int max_iter, double& rel_res)
{
    const auto n = b.size();
    const double bnorm = norm2(b);
    if (bnorm == 0) {
        x.assign(n, 0.0);
        rel_res = 0;
        return 0;
    }
    std::vector<double> r(n), p(n), ap(n);
    int it = 0;
    // restart on the true residual in case the recursive one drifted
    for (int restart = 0; restart < 4; ++restart) {
        lap.apply(x, ap);
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = b[i] - ap[i];
        }
        double rr = 0;
        for (double v : r) {
            rr += v * v;
        }
        rel_res = std::sqrt(rr) / bnorm;
        if (rel_res <= rel_tol) {
            return it;
        }
        p = r;
        while (it < max_iter) {
            lap.apply(p, ap);
            double pap = 0;
            for (std::size_t i = 0; i < n; ++i) {
                pap += p[i] * ap[i];
            }
            double alpha = rr / pap;
            double rr_new = 0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
                rr_new += r[i] * r[i];
            }
            ++it;
            if (std::sqrt(rr_new) / bnorm <= rel_tol) {
                break;
            }
            double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = r[i] + beta * p[i];
            }
        }
        if (it >= max_iter) {
            break;
        }
    }
    lap.apply(x, ap);
    double res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        res += (b[i] - ap[i]) * (b[i] - ap[i]);
    }
    rel_res = std::sqrt(res) / bnorm;
    return it;
}

/// In-place Cholesky of a dense SPD matrix (row-major, lower factor kept).
inline void cholesky(std::vector<double>& a, std::size_t n)
{
    for (std::size_t j = 0; j < n; ++j) {
        double d = a[j * n + j];
        for (std::size_t k = 0; k < j; ++k) {
            d -= a[j * n + k] * a[j * n + k];
        }
        if (!(d > 0)) {
            throw SingularSystemError("relax_linear: reduced Laplacian is not positive definite");
        }
        d = std::sqrt(d);
        a[j * n + j] = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
}

inline std::vector<double> cholesky_solve(const std::vector<double>& l, std::size_t n, std::vector<double> b)
{
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            b[i] -= l[i * n + k] * b[k];
        }
        b[i] /= l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k) {
            b[i] -= l[k * n + i] * b[k];
        }
        b[i] /= l[i * n + i];
    }
    return b;
}

inline void require_anchored(const FieldGraph& g)
{
    std::vector<char> seen(g.node_count(), 0);
    std::vector<int> stack;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (g.is_constrained(static_cast<int>(i))) {
            seen[i] = 1;
            stack.push_back(static_cast<int>(i));
        }
    }
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            throw SingularSystemError("relax_linear: node " + std::to_string(i) +
                                      " lies in a component without constrained nodes");
        }
    }
}

}  // namespace detail

/// Unit representation vector of a frame angle.
inline Vec2 representation_vector(double theta) { return {std::cos(4.0 * theta), std::sin(4.0 * theta)}; }

/**
 * @brief Harmonic extension of the boundary representation vectors.
 *
 * Each coordinate of the free-node vectors solves the graph Laplace
 * equation sum_{j~i} (v_i - v_j) = 0 with Dirichlet data on constrained
 * nodes, the minimizer of sum_{ij} |v_i - v_j|^2 once |v_i| = 1 is dropped.
 */
inline RepresentationField relax_linear(const FieldGraph& graph, const RelaxOptions& opts = {},
                                        RelaxReport* report = nullptr)
{
    detail::require_anchored(graph);
    RepresentationField field;
    field.v.assign(graph.node_count(), Vec2{});
    for (std::size_t i = 0; i < graph.node_count(); ++i) {
        if (const auto& c = graph.constraints()[i]) {
            field.v[i] = representation_vector(*c);
        }
    }

    detail::ReducedLaplacian lap(graph);
    const auto n = lap.size();
    RelaxReport rep;
    if (n == 0) {
        if (report) {
            *report = rep;
        }
        return field;
    }

    // right-hand sides: constrained neighbor sums per coordinate
    std::vector<double> bx(n, 0.0), by(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        for (int j : graph.neighbors(lap.free_nodes()[k])) {
            if (lap.slot(j) < 0) {
                bx[k] += field.v[j].x;
                by[k] += field.v[j].y;
            }
        }
    }

    bool dense = opts.method == LinearMethod::Dense ||
                 (opts.method == LinearMethod::Auto && n < opts.dense_below);
    std::vector<double> sx, sy;
    if (dense) {
        auto l = lap.dense();
        detail::cholesky(l, n);
        sx = detail::cholesky_solve(l, n, bx);
        sy = detail::cholesky_solve(l, n, by);
        rep.used = LinearMethod::Dense;
    }
    else {
        sx.assign(n, 0.0);
        sy.assign(n, 0.0);
        double rx = 0, ry = 0;
        int cap = static_cast<int>(10 * n);
        rep.iterations = detail::conjugate_gradient(lap, bx, sx, opts.rel_tol, cap, rx);
        rep.iterations = std::max(rep.iterations, detail::conjugate_gradient(lap, by, sy, opts.rel_tol, cap, ry));
        rep.relative_residual = std::max(rx, ry);
        rep.used = LinearMethod::ConjugateGradient;
    }
    for (std::size_t k = 0; k < n; ++k) {
        field.v[lap.free_nodes()[k]] = {sx[k], sy[k]};
    }
    if (report) {
        *report = rep;
    }
    return field;
}

/// Angles recovered from representation vectors.
struct RecoveredAngles {
    std::vector<double> theta;
    std::vector<int> degenerate;
};

/**
 * @brief theta = atan2(v_y, v_x) / 4 canonicalized into [0, pi/2).
 *
 * Nodes with |v| < 1e-9 get theta = 0 and are reported as degenerate.
 * Constrained nodes receive their exact constraint angle.
 */
inline RecoveredAngles normalize_recover(const FieldGraph& graph, const RepresentationField& field)
{
    if (field.v.size() != graph.node_count()) {
        throw std::invalid_argument("normalize_recover: field size differs from node count");
    }
    RecoveredAngles out;
    out.theta.resize(field.v.size());
    for (std::size_t i = 0; i < field.v.size(); ++i) {
        if (const auto& c = graph.constraints()[i]) {
            out.theta[i] = *c;
            continue;
        }
        const Vec2& v = field.v[i];
        if (norm(v) < 1e-9) {
            out.theta[i] = 0.0;
            out.degenerate.push_back(static_cast<int>(i));
            continue;
        }
        out.theta[i] = canonicalize(std::atan2(v.y, v.x) / 4.0);
    }
    return out;
}

/** @brief Relax, normalize and recover: the linear-relaxation frame field. */
inline FrameField solve_field_dedicated(const FieldGraph& graph, const RelaxOptions& opts = {})
{
    auto rec = normalize_recover(graph, relax_linear(graph, opts));
    auto field = make_field(graph, std::move(rec.theta), {"dedicated", "none", {}});
    field.degenerate_nodes = std::move(rec.degenerate);
    return field;
}

}  // namespace frameflow
