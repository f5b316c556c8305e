#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frameflow/angles.hpp"
#include "frameflow/graph.hpp"

namespace frameflow
{

enum class InitKind { Random, Zero, Front };

inline std::string_view to_string(InitKind k)
{
    switch (k) {
        case InitKind::Random:
            return "random";
        case InitKind::Zero:
            return "zero";
        case InitKind::Front:
            return "front";
    }
    return "unknown";
}

inline InitKind parse_init(std::string_view s)
{
    if (s == "random") {
        return InitKind::Random;
    }
    if (s == "zero") {
        return InitKind::Zero;
    }
    if (s == "front") {
        return InitKind::Front;
    }
    throw std::invalid_argument("unknown init '" + std::string(s) + "'");
}

/** @brief Initializer choice; a seed is carried iff the kind is random. */
struct InitSpec {
    InitKind kind{InitKind::Front};
    std::optional<std::uint64_t> seed;

    static InitSpec random(std::uint64_t seed) { return {InitKind::Random, seed}; }
    static InitSpec zero() { return {InitKind::Zero, std::nullopt}; }
    static InitSpec front() { return {InitKind::Front, std::nullopt}; }

    void validate() const
    {
        if ((kind == InitKind::Random) != seed.has_value()) {
            throw std::invalid_argument("InitSpec: seed must be given exactly for random init");
        }
    }
};

namespace detail
{
inline std::vector<double> constrained_or(const FieldGraph& graph, double fill)
{
    std::vector<double> theta(graph.node_count(), fill);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (const auto& c = graph.constraints()[i]) {
            theta[i] = *c;
        }
    }
    return theta;
}
}  // namespace detail

/**
 * Free nodes uniform in [0, pi/2) from a seeded mt19937_64; the bits-to-double
 * mapping is explicit so the stream is identical across standard libraries.
 */
inline std::vector<double> init_random(const FieldGraph& graph, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    auto theta = detail::constrained_or(graph, 0.0);
    for (std::size_t i = 0; i < theta.size(); ++i) {
        // draw for every node so free-node values do not depend on constraint layout
        double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (!graph.is_constrained(static_cast<int>(i))) {
            theta[i] = std::min(u * kQuarterTurn, std::nextafter(kQuarterTurn, 0.0));
        }
    }
    return theta;
}

inline std::vector<double> init_zero(const FieldGraph& graph) { return detail::constrained_or(graph, 0.0); }

/**
 * @brief Advancing front: multi-source BFS from all constrained nodes; each
 * free node copies the angle of its BFS parent, the lowest-index neighbor
 * in the previous layer.
 */
inline std::vector<double> init_front(const FieldGraph& graph)
{
    auto theta = detail::constrained_or(graph, 0.0);
    std::vector<char> reached(graph.node_count(), 0);
    std::vector<int> layer;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (graph.is_constrained(static_cast<int>(i))) {
            reached[i] = 1;
            layer.push_back(static_cast<int>(i));
        }
    }
    std::vector<int> next;
    while (!layer.empty()) {
        next.clear();
        // layer is sorted, so the first visitor of a node is its lowest-index parent
        for (int v : layer) {
            for (int w : graph.neighbors(v)) {
                if (!reached[w]) {
                    reached[w] = 1;
                    theta[w] = theta[v];
                    next.push_back(w);
                }
            }
        }
        std::sort(next.begin(), next.end());
        layer.swap(next);
    }
    for (std::size_t i = 0; i < reached.size(); ++i) {
        if (!reached[i]) {
            throw std::invalid_argument("init_front: node " + std::to_string(i) +
                                        " is not connected to any constrained node");
        }
    }
    return theta;
}

inline std::vector<double> initialize(const FieldGraph& graph, const InitSpec& spec)
{
    spec.validate();
    switch (spec.kind) {
        case InitKind::Random:
            return init_random(graph, *spec.seed);
        case InitKind::Zero:
            return init_zero(graph);
        case InitKind::Front:
            return init_front(graph);
    }
    throw std::invalid_argument("initialize: unknown kind");
}

}  // namespace frameflow
