#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "frameflow/meshgen.hpp"
#include "frameflow/optimize.hpp"

using namespace frameflow;

namespace
{

constexpr double kPi = std::numbers::pi;

struct Quadratic {
    std::vector<double> d;
    std::vector<double> c;

    double operator()(std::span<const double> x, std::span<double> g) const
    {
        double f = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double r = x[i] - c[i];
            f += 0.5 * d[i] * r * r;
            g[i] = d[i] * r;
        }
        return f;
    }
};

double rosenbrock(std::span<const double> x, std::span<double> g)
{
    double a = 1 - x[0];
    double b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
}

FieldGraph path3()
{
    return {Sampling::Primal, {{0, 0}, {1, 0}, {2, 0}}, {{0, 1}, {1, 2}},
            {std::optional<double>{0.0}, std::nullopt, std::optional<double>{kPi / 8}}, {}};
}

}  // namespace

TEST(TwoLoop, OneDimensionalPair)
{
    std::vector<CurvaturePair> h{{{1.0}, {2.0}, 2.0}};
    std::vector<double> g{4.0};
    auto d = two_loop_direction(h, g);
    ASSERT_EQ(d.size(), 1u);
    EXPECT_DOUBLE_EQ(d[0], -2.0);
}

TEST(TwoLoop, EmptyHistoryIsSteepestDescent)
{
    std::vector<double> g{1.0, -2.0, 3.0};
    EXPECT_EQ(two_loop_direction({}, g), (std::vector<double>{-1.0, 2.0, -3.0}));
}

TEST(TwoLoop, RecoversNewtonStepOnDiagonalQuadratic)
{
    // pairs along each axis of H = diag(1, 4, 9) carry the full curvature
    std::vector<double> diag{1, 4, 9};
    std::vector<CurvaturePair> h;
    for (std::size_t i = 0; i < 3; ++i) {
        CurvaturePair p;
        p.s.assign(3, 0.0);
        p.y.assign(3, 0.0);
        p.s[i] = 1.0;
        p.y[i] = diag[i];
        p.sy = diag[i];
        h.push_back(p);
    }
    std::vector<double> g{2.0, -8.0, 9.0};
    auto d = two_loop_direction(h, g);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(d[i], -g[i] / diag[i], 1e-14);
    }
}

TEST(TwoLoop, DimensionMismatchThrows)
{
    std::vector<CurvaturePair> h{{{1.0, 0.0}, {2.0, 0.0}, 2.0}};
    std::vector<double> g{4.0};
    EXPECT_THROW(two_loop_direction(h, g), std::invalid_argument);
}

TEST(LineSearch, UnitStepOnParabolaSatisfiesStrongWolfe)
{
    auto f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * (x[0] - 3);
        return (x[0] - 3) * (x[0] - 3);
    };
    std::vector<double> x{0.0};
    std::vector<double> dir{3.0};
    SolverConfig cfg;
    // f(0) = 9, f'(0) dir = -6 * 3
    auto r = line_search_wolfe(f, x, dir, 9.0, -18.0, cfg);
    ASSERT_TRUE(r.ok);
    EXPECT_DOUBLE_EQ(r.alpha, 1.0);
    EXPECT_LE(r.f, 9.0 + cfg.wolfe_c1 * r.alpha * -18.0);
    EXPECT_LE(std::abs(r.g[0] * dir[0]), cfg.wolfe_c2 * 18.0);
}

TEST(LineSearch, LongDirectionIsShortened)
{
    auto f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * (x[0] - 3);
        return (x[0] - 3) * (x[0] - 3);
    };
    std::vector<double> x{0.0};
    std::vector<double> dir{100.0};
    SolverConfig cfg;
    auto r = line_search_wolfe(f, x, dir, 9.0, -600.0, cfg);
    ASSERT_TRUE(r.ok);
    EXPECT_LT(r.alpha, 1.0);
    EXPECT_LE(r.f, 9.0 + cfg.wolfe_c1 * r.alpha * -600.0);
    EXPECT_LE(std::abs(r.g[0] * dir[0]), cfg.wolfe_c2 * 600.0);
}

TEST(LineSearch, ShortDirectionIsExtended)
{
    auto f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * (x[0] - 3);
        return (x[0] - 3) * (x[0] - 3);
    };
    std::vector<double> x{0.0};
    std::vector<double> dir{0.01};
    SolverConfig cfg;
    cfg.wolfe_c2 = 0.1;
    auto r = line_search_wolfe(f, x, dir, 9.0, -0.06, cfg);
    ASSERT_TRUE(r.ok);
    EXPECT_GT(r.alpha, 1.0);
    EXPECT_LE(std::abs(r.g[0] * dir[0]), cfg.wolfe_c2 * 0.06);
}

TEST(LineSearch, RejectsAscentDirection)
{
    auto f = [](std::span<const double> x, std::span<double> g) {
        g[0] = 2 * x[0];
        return x[0] * x[0];
    };
    std::vector<double> x{1.0};
    std::vector<double> dir{1.0};
    EXPECT_THROW(line_search_wolfe(f, x, dir, 1.0, 2.0, SolverConfig{}), std::invalid_argument);
    EXPECT_THROW(line_search_wolfe(f, x, dir, 1.0, 0.0, SolverConfig{}), std::invalid_argument);
}

TEST(Minimize, ConvexQuadratic50)
{
    Quadratic q;
    for (int i = 0; i < 50; ++i) {
        q.d.push_back(1.0 + 0.5 * i);
        q.c.push_back(std::sin(1.0 + i));
    }
    SolverConfig cfg;
    cfg.grad_tol = 1e-8;
    auto r = minimize(q, std::vector<double>(50, 0.0), cfg);
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_LE(r.grad_norm, 1e-8);
    EXPECT_LE(r.iterations, 80);
    for (int i = 0; i < 50; ++i) {
        EXPECT_NEAR(r.x[i], q.c[i], 1e-8);
    }
}

TEST(Minimize, Rosenbrock)
{
    SolverConfig cfg;
    cfg.grad_tol = 1e-10;
    auto r = minimize(rosenbrock, {-1.2, 1.0}, cfg);
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
    EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(Minimize, TraceIsMonotone)
{
    auto r = minimize(rosenbrock, {-1.2, 1.0}, SolverConfig{});
    ASSERT_EQ(r.trace.size(), static_cast<std::size_t>(r.iterations) + 1);
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
        EXPECT_LE(r.trace[k].f, r.trace[k - 1].f);
    }
}

TEST(Minimize, IterationCap)
{
    SolverConfig cfg;
    cfg.max_iters = 3;
    auto r = minimize(rosenbrock, {-1.2, 1.0}, cfg);
    EXPECT_EQ(r.status, SolveStatus::MaxIters);
    EXPECT_EQ(r.iterations, 3);
}

TEST(Minimize, StartAtMinimumConvergesImmediately)
{
    auto r = minimize(rosenbrock, {1.0, 1.0}, SolverConfig{});
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_EQ(r.iterations, 0);
}

TEST(Minimize, NonFiniteStartValue)
{
    auto f = [](std::span<const double>, std::span<double> g) {
        g[0] = 0;
        return std::numeric_limits<double>::quiet_NaN();
    };
    auto r = minimize(f, {0.0}, SolverConfig{});
    EXPECT_EQ(r.status, SolveStatus::NonFinite);
    EXPECT_THROW(minimize(rosenbrock, {std::numeric_limits<double>::infinity(), 0.0}, SolverConfig{}),
                 std::invalid_argument);
}

TEST(Minimize, ZeroDimensional)
{
    auto f = [](std::span<const double>, std::span<double>) { return 1.5; };
    auto r = minimize(f, {}, SolverConfig{});
    EXPECT_EQ(r.status, SolveStatus::Converged);
    EXPECT_EQ(r.f, 1.5);
}

TEST(SolverConfig, Validation)
{
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.wolfe_c1 = 0.95;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.memory = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.grad_tol = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = {};
    c.max_line_search_steps = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(SolveField, PathInstanceReachesAnalyticMinimum)
{
    auto g = path3();
    std::vector<double> theta0{0.0, 0.0, *g.constraints()[2]};
    SolverConfig cfg;
    cfg.grad_tol = 1e-10;
    SolveResult sr;
    auto field = solve_field_lbfgs(g, theta0, cfg, {"lbfgs", "zero", {}}, &sr);
    EXPECT_EQ(sr.status, SolveStatus::Converged);
    EXPECT_NEAR(std::remainder(field.theta[1] - kPi / 16, kPi / 2), 0.0, 1e-9);
    EXPECT_NEAR(energy(g, field.theta), 4.0 - 2.0 * std::numbers::sqrt2, 1e-9);
    EXPECT_EQ(field.theta[0], 0.0);
    EXPECT_EQ(field.theta[2], *g.constraints()[2]);
    EXPECT_EQ(field.provenance.solver, "lbfgs");
}

TEST(SolveField, ConstraintsUntouchedAndEnergyDecreases)
{
    auto g = build_primal(make_disk(5));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0, kPi / 2);
    std::vector<double> theta0(g.node_count());
    for (std::size_t i = 0; i < theta0.size(); ++i) {
        theta0[i] = g.constraints()[i] ? *g.constraints()[i] : u(rng);
    }
    SolveResult sr;
    auto field = solve_field_lbfgs(g, theta0, SolverConfig{}, {}, &sr);
    EXPECT_LT(energy(g, field.theta), energy(g, theta0));
    for (std::size_t i = 0; i < theta0.size(); ++i) {
        if (g.constraints()[i]) {
            EXPECT_EQ(field.theta[i], *g.constraints()[i]);
        }
    }
    EXPECT_EQ(field.graph_id, g.fingerprint());
}

TEST(SolveField, RejectsConstraintViolation)
{
    auto g = path3();
    std::vector<double> theta0{0.1, 0.0, *g.constraints()[2]};
    EXPECT_THROW(solve_field_lbfgs(g, theta0, SolverConfig{}), std::invalid_argument);
    std::vector<double> short_theta{0.0};
    EXPECT_THROW(solve_field_lbfgs(g, short_theta, SolverConfig{}), std::invalid_argument);
}
