#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "frameflow/angles.hpp"
#include "frameflow/graph.hpp"

namespace frameflow
{

/// Wrapped differences within this distance of +/-pi/4 count as ties.
inline constexpr double kTieTolerance = 1e-12;

/** @brief Curvature of one oriented cycle. */
struct CycleCurvature {
    double kappa{0};
    /// nearest multiple of pi/2, in quarter turns
    long quarter_turns{0};
    /// |kappa - quarter_turns * pi/2|
    double residual{0};
    /// number of wrapped differences at the +/-pi/4 discontinuity
    int ties{0};
};

/**
 * @brief Sum of wrap_quarter(theta_j - theta_i) over consecutive oriented
 * pairs of a closed node walk (the last node connects back to the first).
 */
inline CycleCurvature measure_cycle(std::span<const int> cycle, std::span<const double> theta)
{
    CycleCurvature out;
    const auto m = cycle.size();
    for (std::size_t k = 0; k < m; ++k) {
        int i = cycle[k];
        int j = cycle[(k + 1) % m];
        if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= theta.size() ||
            static_cast<std::size_t>(j) >= theta.size()) {
            throw std::out_of_range("cycle visits node outside theta");
        }
        double w = wrap_quarter(theta[j] - theta[i]);
        if (std::abs(w) >= kQuarterTurn / 2 - kTieTolerance) {
            ++out.ties;
        }
        out.kappa += w;
    }
    out.quarter_turns = std::lround(out.kappa / kQuarterTurn);
    out.residual = std::abs(out.kappa - static_cast<double>(out.quarter_turns) * kQuarterTurn);
    return out;
}

inline double cycle_curvature(std::span<const int> cycle, std::span<const double> theta)
{
    return measure_cycle(cycle, theta).kappa;
}

/** @brief Thrown when a cycle curvature is not a multiple of a quarter turn. */
class TopologyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Singularity {
    int cycle{0};
    /// index in quarter turns
    int index{0};
    Vec2 position;

    friend bool operator==(const Singularity&, const Singularity&) = default;
};

struct HoleTurning {
    /// ordinal among the boundary-loop cycles
    int loop{0};
    int turning{0};
    /// true for the loop enclosing the largest area
    bool outer{false};

    friend bool operator==(const HoleTurning&, const HoleTurning&) = default;
};

namespace detail
{
inline long quantize(const CycleCurvature& c, std::size_t cycle_id)
{
    if (c.residual > 1e-6) {
        throw TopologyError("cycle " + std::to_string(cycle_id) + " curvature " + std::to_string(c.kappa) +
                            " is not a multiple of pi/2");
    }
    return c.quarter_turns;
}

inline Vec2 centroid(const FieldGraph& graph, const std::vector<int>& nodes)
{
    Vec2 c;
    for (int v : nodes) {
        c += graph.positions()[v];
    }
    return (1.0 / static_cast<double>(std::max<std::size_t>(1, nodes.size()))) * c;
}

inline double enclosed_area(const FieldGraph& graph, const std::vector<int>& nodes)
{
    double a = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        a += cross(graph.positions()[nodes[k]], graph.positions()[nodes[(k + 1) % nodes.size()]]);
    }
    return std::abs(0.5 * a);
}
}  // namespace detail

/**
 * @brief Interior cycles with nonzero curvature, index in quarter turns.
 *
 * A primal triangle has three wrapped terms in (-pi/4, pi/4], so |index|
 * <= 1; a dual fan of valence n has |index| <= n/2. Dual boundary fans
 * count as well, so singularities sitting at boundary vertices are seen.
 */
inline std::vector<Singularity> singularities(const FieldGraph& graph, std::span<const double> theta)
{
    if (theta.size() != graph.node_count()) {
        throw std::invalid_argument("singularities: theta length differs from node count");
    }
    std::vector<Singularity> out;
    const auto& cycles = graph.cycles();
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        if (!cycles[c].singular_kind()) {
            continue;
        }
        auto k = detail::quantize(measure_cycle(cycles[c].nodes, theta), c);
        if (2 * std::abs(k) > static_cast<long>(cycles[c].nodes.size())) {
            throw TopologyError("cycle " + std::to_string(c) + " index exceeds its valence bound");
        }
        if (k != 0) {
            out.push_back({static_cast<int>(c), static_cast<int>(k), detail::centroid(graph, cycles[c].nodes)});
        }
    }
    return out;
}

/** @brief Quarter turns of the frame accumulated along a boundary-loop cycle. */
inline int hole_turning(const FieldGraph& graph, std::span<const double> theta, const Cycle& loop)
{
    if (loop.kind != Cycle::Kind::BoundaryLoop) {
        throw std::invalid_argument("hole_turning: cycle is not a boundary loop");
    }
    if (theta.size() != graph.node_count()) {
        throw std::invalid_argument("hole_turning: theta length differs from node count");
    }
    return static_cast<int>(detail::quantize(measure_cycle(loop.nodes, theta), 0));
}

/** @brief Per-cycle audit used for the quantization and conservation checks. */
struct CycleAudit {
    double max_residual{0};
    long total_quarter_turns{0};
    int ties{0};
};

inline CycleAudit audit_cycles(const FieldGraph& graph, std::span<const double> theta)
{
    CycleAudit a;
    for (const auto& c : graph.cycles()) {
        auto m = measure_cycle(c.nodes, theta);
        a.max_residual = std::max(a.max_residual, m.residual);
        a.total_quarter_turns += m.quarter_turns;
        a.ties += m.ties;
    }
    return a;
}

/** @brief Field topology: singularities and boundary-loop turnings. */
struct TopologySignature {
    Sampling sampling{Sampling::Primal};
    std::uint64_t graph_id{0};
    std::vector<Singularity> singularities;
    std::vector<HoleTurning> holes;
    int total_index{0};
    std::vector<int> degenerate_nodes;
    /// wrapped differences sitting on the +/-pi/4 discontinuity
    int ties{0};
};

inline TopologySignature signature(const FieldGraph& graph, std::span<const double> theta,
                                   std::vector<int> degenerate_nodes = {})
{
    TopologySignature sig;
    sig.sampling = graph.sampling();
    sig.graph_id = graph.fingerprint();
    sig.singularities = singularities(graph, theta);
    for (const auto& s : sig.singularities) {
        sig.total_index += s.index;
    }
    double best_area = -1;
    int outer = -1;
    for (const auto& c : graph.cycles()) {
        if (c.kind == Cycle::Kind::BoundaryLoop) {
            auto id = static_cast<int>(sig.holes.size());
            sig.holes.push_back({id, hole_turning(graph, theta, c), false});
            double area = detail::enclosed_area(graph, c.nodes);
            if (area > best_area) {
                best_area = area;
                outer = id;
            }
        }
    }
    if (outer >= 0) {
        sig.holes[outer].outer = true;
    }
    sig.ties = audit_cycles(graph, theta).ties;
    sig.degenerate_nodes = std::move(degenerate_nodes);
    return sig;
}

inline TopologySignature signature(const FieldGraph& graph, const FrameField& field)
{
    if (field.graph_id != graph.fingerprint()) {
        throw std::invalid_argument("signature: field belongs to a different graph");
    }
    return signature(graph, field.theta, field.degenerate_nodes);
}

/// Sorted singularity indices.
inline std::vector<int> index_multiset(const TopologySignature& s)
{
    std::vector<int> out;
    for (const auto& x : s.singularities) {
        out.push_back(x.index);
    }
    std::sort(out.begin(), out.end());
    return out;
}

struct TopologyDiff {
    bool same_indices{false};
    bool same_holes{false};
    /// |b| - |a| singularity counts
    int count_difference{0};
    std::string verdict;

    [[nodiscard]] bool same() const { return same_indices && same_holes; }
};

/** @brief Compare two signatures over the same graph. */
inline TopologyDiff compare(const TopologySignature& a, const TopologySignature& b)
{
    if (a.graph_id != b.graph_id || a.sampling != b.sampling) {
        throw std::invalid_argument("compare: signatures are over different graphs");
    }
    TopologyDiff d;
    d.same_indices = index_multiset(a) == index_multiset(b);
    d.same_holes = a.holes.size() == b.holes.size();
    for (std::size_t i = 0; d.same_holes && i < a.holes.size(); ++i) {
        d.same_holes = a.holes[i].turning == b.holes[i].turning;
    }
    d.count_difference = static_cast<int>(b.singularities.size()) - static_cast<int>(a.singularities.size());
    d.verdict = d.same() ? "same topology" : "different topology";
    return d;
}

inline nlohmann::json to_json(const TopologySignature& s)
{
    nlohmann::json j;
    j["sampling"] = std::string(to_string(s.sampling));
    j["graph"] = s.graph_id;
    j["singularities"] = nlohmann::json::array();
    for (const auto& x : s.singularities) {
        j["singularities"].push_back({{"cycle", x.cycle}, {"k", x.index}, {"x", x.position.x}, {"y", x.position.y}});
    }
    j["holes"] = nlohmann::json::array();
    for (const auto& h : s.holes) {
        j["holes"].push_back({{"loop", h.loop}, {"turning", h.turning}, {"outer", h.outer}});
    }
    j["total_index"] = s.total_index;
    j["degenerate_nodes"] = s.degenerate_nodes;
    j["ties"] = s.ties;
    return j;
}

inline TopologySignature signature_from_json(const nlohmann::json& j)
{
    TopologySignature s;
    s.sampling = parse_sampling(j.at("sampling").get<std::string>());
    s.graph_id = j.value("graph", std::uint64_t{0});
    for (const auto& x : j.at("singularities")) {
        s.singularities.push_back(
            {x.at("cycle").get<int>(), x.at("k").get<int>(), {x.at("x").get<double>(), x.at("y").get<double>()}});
    }
    for (const auto& h : j.at("holes")) {
        s.holes.push_back({h.at("loop").get<int>(), h.at("turning").get<int>(), h.value("outer", false)});
    }
    s.total_index = j.at("total_index").get<int>();
    s.degenerate_nodes = j.value("degenerate_nodes", std::vector<int>{});
    s.ties = j.value("ties", 0);
    return s;
}

}  // namespace frameflow
