#pragma once

#include <algorithm>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/Dense>

#include "frameflow/dedicated.hpp"
#include "frameflow/graph.hpp"

namespace frameflow::testing
{

/**
 * Connected random graph: a random spanning tree plus extra edges, with a
 * random nonempty subset of nodes constrained to random angles.
 */
inline FieldGraph random_graph(std::mt19937_64& rng, int nodes, int extra_edges, int constrained)
{
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Vec2> pos(static_cast<std::size_t>(nodes));
    for (auto& p : pos) {
        p = {unit(rng), unit(rng)};
    }
    std::set<FieldGraph::Edge> edges;
    for (int i = 1; i < nodes; ++i) {
        int j = std::uniform_int_distribution<int>(0, i - 1)(rng);
        edges.insert({j, i});
    }
    std::uniform_int_distribution<int> pick(0, nodes - 1);
    for (int k = 0; k < extra_edges; ++k) {
        int a = pick(rng);
        int b = pick(rng);
        if (a != b) {
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    std::vector<int> order(static_cast<std::size_t>(nodes));
    for (int i = 0; i < nodes; ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::optional<double>> cons(static_cast<std::size_t>(nodes));
    for (int k = 0; k < constrained; ++k) {
        cons[order[k]] = unit(rng) * std::numbers::pi / 2;
    }
    return {Sampling::Primal, std::move(pos), {edges.begin(), edges.end()}, std::move(cons), {}};
}

/**
 * Least-squares reference for the relaxed problem: minimize
 * sum over edges |v_i - v_j|^2 over free nodes by a dense QR solve of the
 * edge-difference system B v_free = -B_c v_c.
 */
inline std::vector<Vec2> least_squares_reference(const FieldGraph& g)
{
    auto free = g.free_nodes();
    std::vector<int> slot(g.node_count(), -1);
    for (std::size_t k = 0; k < free.size(); ++k) {
        slot[free[k]] = static_cast<int>(k);
    }
    const auto m = static_cast<Eigen::Index>(g.edges().size());
    const auto n = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, n);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 2);
    for (Eigen::Index e = 0; e < m; ++e) {
        const auto& [i, j] = g.edges()[static_cast<std::size_t>(e)];
        auto term = [&](int node, double sign) {
            if (slot[node] >= 0) {
                b(e, slot[node]) += sign;
            }
            else {
                auto r = representation_vector(*g.constraints()[node]);
                rhs(e, 0) -= sign * r.x;
                rhs(e, 1) -= sign * r.y;
            }
        };
        term(i, 1.0);
        term(j, -1.0);
    }
    Eigen::MatrixXd sol = b.colPivHouseholderQr().solve(rhs);
    std::vector<Vec2> out(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (slot[i] >= 0) {
            out[i] = {sol(slot[i], 0), sol(slot[i], 1)};
        }
        else {
            out[i] = representation_vector(*g.constraints()[i]);
        }
    }
    return out;
}

/// max over free nodes of |sum_{j~i} (v_i - v_j)|
inline double harmonic_residual(const FieldGraph& g, const std::vector<Vec2>& v)
{
    double worst = 0;
    for (int i : g.free_nodes()) {
        Vec2 acc;
        for (int j : g.neighbors(i)) {
            acc += v[i] - v[j];
        }
        worst = std::max(worst, norm(acc));
    }
    return worst;
}

inline double dirichlet(const FieldGraph& g, const std::vector<Vec2>& v)
{
    double e = 0;
    for (const auto& [i, j] : g.edges()) {
        Vec2 d = v[i] - v[j];
        e += dot(d, d);
    }
    return e;
}

}  // namespace frameflow::testing
