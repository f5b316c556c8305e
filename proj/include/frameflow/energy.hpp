#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "frameflow/graph.hpp"

namespace frameflow
{

namespace detail
{
inline void check_length(const FieldGraph& graph, std::size_t n, const char* who)
{
    if (n != graph.node_count()) {
        throw std::invalid_argument(std::string(who) + ": theta length " + std::to_string(n) +
                                    " differs from node count " + std::to_string(graph.node_count()));
    }
}
}  // namespace detail

/**
 * @brief Frame smoothness energy 2 * sum_{ij} (1 - cos(4 theta_i - 4 theta_j)),
 * each undirected edge counted once.
 */
inline double energy(const FieldGraph& graph, std::span<const double> theta)
{
    detail::check_length(graph, theta.size(), "energy");
    double e = 0;
    for (const auto& [i, j] : graph.edges()) {
        e += 2.0 * (1.0 - std::cos(4.0 * theta[i] - 4.0 * theta[j]));
    }
    return e;
}

/**
 * @brief dE/dtheta_i = sum_{j~i} 8 sin(4 theta_i - 4 theta_j) for free
 * nodes, exactly 0 for constrained nodes.
 */
inline std::vector<double> gradient(const FieldGraph& graph, std::span<const double> theta)
{
    detail::check_length(graph, theta.size(), "gradient");
    std::vector<double> g(theta.size(), 0.0);
    for (const auto& [i, j] : graph.edges()) {
        double s = 8.0 * std::sin(4.0 * theta[i] - 4.0 * theta[j]);
        g[i] += s;
        g[j] -= s;
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (graph.is_constrained(static_cast<int>(i))) {
            g[i] = 0.0;
        }
    }
    return g;
}

/**
 * @brief Energy restricted to the free nodes of a graph.
 *
 * The reduced variable x holds the angles of free_nodes() in order; the
 * constrained angles are fixed. Evaluation is pure and thread-safe.
 */
class EnergyModel
{
public:
    explicit EnergyModel(const FieldGraph& graph)
        : graph_{&graph}, free_{graph.free_nodes()}, slot_(graph.node_count(), -1), base_(graph.node_count(), 0.0)
    {
        for (std::size_t k = 0; k < free_.size(); ++k) {
            slot_[free_[k]] = static_cast<int>(k);
        }
        for (std::size_t i = 0; i < base_.size(); ++i) {
            if (const auto& c = graph.constraints()[i]) {
                base_[i] = *c;
            }
        }
        for (const auto& [i, j] : graph.edges()) {
            if (slot_[i] >= 0 || slot_[j] >= 0) {
                active_edges_.push_back({i, j});
            }
            else {
                fixed_energy_ += 2.0 * (1.0 - std::cos(4.0 * base_[i] - 4.0 * base_[j]));
            }
        }
    }

    [[nodiscard]] const FieldGraph& graph() const noexcept { return *graph_; }
    [[nodiscard]] const std::vector<int>& free_nodes() const noexcept { return free_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return free_.size(); }

    /// Full angle vector from the reduced one.
    [[nodiscard]] std::vector<double> assemble(std::span<const double> x) const
    {
        check(x.size());
        std::vector<double> theta = base_;
        for (std::size_t k = 0; k < free_.size(); ++k) {
            theta[free_[k]] = x[k];
        }
        return theta;
    }

    /// Reduced vector extracted from a full angle vector.
    [[nodiscard]] std::vector<double> restrict(std::span<const double> theta) const
    {
        detail::check_length(*graph_, theta.size(), "EnergyModel::restrict");
        std::vector<double> x(free_.size());
        for (std::size_t k = 0; k < free_.size(); ++k) {
            x[k] = theta[free_[k]];
        }
        return x;
    }

    /// Energy at x; writes the gradient over free nodes into grad.
    double operator()(std::span<const double> x, std::span<double> grad) const
    {
        check(x.size());
        if (grad.size() != x.size()) {
            throw std::invalid_argument("EnergyModel: gradient buffer size mismatch");
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        double e = fixed_energy_;
        auto angle = [&](int node) { return slot_[node] >= 0 ? x[slot_[node]] : base_[node]; };
        for (const auto& [i, j] : active_edges_) {
            double d = 4.0 * angle(i) - 4.0 * angle(j);
            e += 2.0 * (1.0 - std::cos(d));
            double s = 8.0 * std::sin(d);
            if (slot_[i] >= 0) {
                grad[slot_[i]] += s;
            }
            if (slot_[j] >= 0) {
                grad[slot_[j]] -= s;
            }
        }
        return e;
    }

private:
    void check(std::size_t n) const
    {
        if (n != free_.size()) {
            throw std::invalid_argument("EnergyModel: reduced vector length " + std::to_string(n) +
                                        " differs from free node count " + std::to_string(free_.size()));
        }
    }

    const FieldGraph* graph_;
    std::vector<int> free_;
    std::vector<int> slot_;
    std::vector<double> base_;
    std::vector<std::array<int, 2>> active_edges_;
    double fixed_energy_{0};
};

/** @brief (energy, gradient over free nodes) at reduced vector x. */
inline std::pair<double, std::vector<double>> reduced_objective(const EnergyModel& model,
                                                                std::span<const double> x)
{
    std::vector<double> g(x.size());
    double f = model(x, g);
    return {f, std::move(g)};
}

}  // namespace frameflow
