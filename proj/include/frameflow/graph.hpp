#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frameflow/angles.hpp"
#include "frameflow/mesh.hpp"

namespace frameflow
{

enum class Sampling { Primal, Dual };

inline std::string_view to_string(Sampling s) { return s == Sampling::Primal ? "primal" : "dual"; }

inline Sampling parse_sampling(std::string_view s)
{
    if (s == "primal") {
        return Sampling::Primal;
    }
    if (s == "dual") {
        return Sampling::Dual;
    }
    throw std::invalid_argument("unknown sampling '" + std::string(s) + "'");
}

/**
 * @brief Oriented closed walk of graph nodes.
 *
 * Interior cycles are triangles (primal) or vertex fans (dual), traversed
 * CCW. Boundary loops are traversed with the interior on the right, i.e. as
 * the boundary of the exterior face, so that every graph edge is walked
 * exactly once in each direction over the whole cycle set.
 *
 * Dual graphs also get one BoundaryFan cycle per boundary vertex: its CCW
 * triangle fan, closed by a step between the two boundary triangles at its
 * ends. The dual boundary loop is the sequence of triangles owning a
 * boundary edge, which walks those closing steps backwards.
 */
struct Cycle {
    enum class Kind { InteriorFace, BoundaryFan, BoundaryLoop };

    /// Cycles whose curvature is reported as a singularity.
    [[nodiscard]] bool singular_kind() const noexcept { return kind != Kind::BoundaryLoop; }

    Kind kind{Kind::InteriorFace};
    std::vector<int> nodes;
};

/**
 * @brief Graph on which a frame field is sampled and optimized.
 *
 * Immutable after construction. Constrained nodes carry a canonical angle in
 * [0, pi/2).
 */
class FieldGraph
{
public:
    using Edge = std::array<int, 2>;

    FieldGraph() = default;

    /**
     * Assemble a graph from raw parts. Edges are normalized to i < j, sorted
     * and deduplicated; constraint angles are canonicalized.
     */
    FieldGraph(Sampling sampling, std::vector<Vec2> positions, std::vector<Edge> edges,
               std::vector<std::optional<double>> constraints, std::vector<Cycle> cycles)
        : sampling_{sampling},
          positions_{std::move(positions)},
          edges_{std::move(edges)},
          constraints_{std::move(constraints)},
          cycles_{std::move(cycles)}
    {
        const auto n = positions_.size();
        if (constraints_.size() != n) {
            throw std::invalid_argument("FieldGraph: constraint count differs from node count");
        }
        for (auto& e : edges_) {
            if (e[0] == e[1] || e[0] < 0 || e[1] < 0 || static_cast<std::size_t>(e[0]) >= n ||
                static_cast<std::size_t>(e[1]) >= n) {
                throw std::invalid_argument("FieldGraph: invalid edge");
            }
            if (e[0] > e[1]) {
                std::swap(e[0], e[1]);
            }
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
        for (auto& c : constraints_) {
            if (c) {
                c = canonicalize(*c);
            }
        }
        for (const auto& cyc : cycles_) {
            for (int v : cyc.nodes) {
                if (v < 0 || static_cast<std::size_t>(v) >= n) {
                    throw std::invalid_argument("FieldGraph: cycle node out of range");
                }
            }
        }
        adjacency_.assign(n, {});
        for (const auto& e : edges_) {
            adjacency_[e[0]].push_back(e[1]);
            adjacency_[e[1]].push_back(e[0]);
        }
        for (auto& nb : adjacency_) {
            std::sort(nb.begin(), nb.end());
        }
        count_components();
    }

    [[nodiscard]] Sampling sampling() const noexcept { return sampling_; }
    [[nodiscard]] std::size_t node_count() const noexcept { return positions_.size(); }
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<Vec2>& positions() const noexcept { return positions_; }
    [[nodiscard]] const std::vector<std::optional<double>>& constraints() const noexcept
    {
        return constraints_;
    }
    [[nodiscard]] const std::vector<Cycle>& cycles() const noexcept { return cycles_; }
    [[nodiscard]] const std::vector<int>& neighbors(int i) const
    {
        return adjacency_.at(static_cast<std::size_t>(i));
    }
    [[nodiscard]] bool is_constrained(int i) const
    {
        return constraints_.at(static_cast<std::size_t>(i)).has_value();
    }
    [[nodiscard]] std::size_t constrained_count() const noexcept
    {
        return static_cast<std::size_t>(
            std::count_if(constraints_.begin(), constraints_.end(), [](auto& c) { return c.has_value(); }));
    }
    [[nodiscard]] std::size_t component_count() const noexcept { return components_; }
    [[nodiscard]] bool connected() const noexcept { return components_ <= 1; }

    /// Nodes in index order that are unconstrained.
    [[nodiscard]] std::vector<int> free_nodes() const
    {
        std::vector<int> out;
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            if (!constraints_[i]) {
                out.push_back(static_cast<int>(i));
            }
        }
        return out;
    }

    /// Stable content hash identifying this graph (nodes, edges, constraints).
    [[nodiscard]] std::uint64_t fingerprint() const noexcept
    {
        std::uint64_t h = 14695981039346656037ull;
        auto mix = [&h](std::uint64_t v) {
            for (int b = 0; b < 8; ++b) {
                h ^= (v >> (8 * b)) & 0xff;
                h *= 1099511628211ull;
            }
        };
        mix(sampling_ == Sampling::Primal ? 1 : 2);
        mix(positions_.size());
        for (const auto& e : edges_) {
            mix(static_cast<std::uint64_t>(e[0]) << 32 | static_cast<std::uint32_t>(e[1]));
        }
        for (const auto& c : constraints_) {
            mix(c ? std::bit_cast<std::uint64_t>(*c) : ~0ull);
        }
        return h;
    }

private:
    void count_components()
    {
        std::vector<int> label(positions_.size(), -1);
        components_ = 0;
        std::vector<int> stack;
        for (std::size_t s = 0; s < label.size(); ++s) {
            if (label[s] >= 0) {
                continue;
            }
            stack.push_back(static_cast<int>(s));
            label[s] = static_cast<int>(components_);
            while (!stack.empty()) {
                int v = stack.back();
                stack.pop_back();
                for (int w : adjacency_[v]) {
                    if (label[w] < 0) {
                        label[w] = static_cast<int>(components_);
                        stack.push_back(w);
                    }
                }
            }
            ++components_;
        }
    }

    Sampling sampling_{Sampling::Primal};
    std::vector<Vec2> positions_;
    std::vector<Edge> edges_;
    std::vector<std::optional<double>> constraints_;
    std::vector<Cycle> cycles_;
    std::vector<std::vector<int>> adjacency_;
    std::size_t components_{0};
};

/** @brief Field graph sampled on mesh vertices, connected by mesh edges. */
inline FieldGraph build_primal(const Mesh& mesh)
{
    const auto nv = mesh.vertex_count();
    std::vector<std::optional<double>> constraints(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        if (mesh.is_boundary_vertex(static_cast<int>(v))) {
            constraints[v] = canonical_angle(boundary_vertex_normal(mesh, static_cast<int>(v)));
        }
    }
    std::vector<Cycle> cycles;
    cycles.reserve(mesh.triangle_count() + mesh.boundary_loops().size());
    for (const auto& t : mesh.triangles()) {
        cycles.push_back({Cycle::Kind::InteriorFace, {t[0], t[1], t[2]}});
    }
    for (const auto& loop : mesh.boundary_loops()) {
        cycles.push_back({Cycle::Kind::BoundaryLoop, {loop.rbegin(), loop.rend()}});
    }
    std::vector<FieldGraph::Edge> edges(mesh.edges().begin(), mesh.edges().end());
    return {Sampling::Primal, mesh.vertices(), std::move(edges), std::move(constraints), std::move(cycles)};
}

namespace detail
{

/**
 * Triangles around vertex v in CCW order. For a boundary vertex the fan
 * starts at the triangle owning the outgoing boundary edge and ends at the
 * one owning the incoming boundary edge.
 */
inline std::vector<int> vertex_fan(const Mesh& mesh, int v, int start_tri)
{
    std::vector<int> fan;
    int t = start_tri;
    while (true) {
        fan.push_back(t);
        const auto& tri = mesh.triangles()[t];
        int k = tri[0] == v ? 0 : (tri[1] == v ? 1 : 2);
        int prev = tri[(k + 2) % 3];
        auto next = mesh.triangle_with_directed_edge(v, prev);
        if (!next || *next == start_tri) {
            break;
        }
        t = *next;
        if (fan.size() > mesh.triangle_count()) {
            throw MeshError(MeshError::Kind::NonManifold, "vertex fan does not close");
        }
    }
    return fan;
}

inline int triangle_containing(const Mesh& mesh, int v, int w)
{
    auto t = mesh.triangle_with_directed_edge(v, w);
    if (!t) {
        throw MeshError(MeshError::Kind::NonManifold, "missing half-edge");
    }
    return *t;
}

}  // namespace detail

/**
 * @brief Field graph sampled on triangles, connected across interior edges.
 *
 * Cycles: the CCW triangle fan around each interior vertex, the closed fan
 * of each boundary vertex with at least two triangles, and one loop per
 * mesh boundary loop through the triangles owning its edges (walked with
 * the interior on the right). All boundary-loop nodes are constrained.
 */
inline FieldGraph build_dual(const Mesh& mesh)
{
    const auto nt = mesh.triangle_count();
    std::vector<Vec2> centroids(nt);
    std::vector<std::optional<double>> constraints(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles()[t];
        const auto& p = mesh.vertices();
        centroids[t] = (1.0 / 3.0) * (p[tri[0]] + p[tri[1]] + p[tri[2]]);
        if (!mesh.triangle_boundary_edges(static_cast<int>(t)).empty()) {
            constraints[t] = canonical_angle(boundary_triangle_normal(mesh, static_cast<int>(t)));
        }
    }
    std::vector<FieldGraph::Edge> edges;
    for (const auto& et : mesh.edge_triangles()) {
        if (et[1] >= 0) {
            edges.push_back({et[0], et[1]});
        }
    }

    // Any triangle incident to v starts the fan of an interior vertex.
    std::vector<int> some_triangle(mesh.vertex_count(), -1);
    for (std::size_t t = 0; t < nt; ++t) {
        for (int v : mesh.triangles()[t]) {
            if (some_triangle[v] < 0) {
                some_triangle[v] = static_cast<int>(t);
            }
        }
    }

    std::vector<Cycle> cycles;
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        if (some_triangle[v] < 0 || mesh.is_boundary_vertex(static_cast<int>(v))) {
            continue;
        }
        cycles.push_back({Cycle::Kind::InteriorFace,
                          detail::vertex_fan(mesh, static_cast<int>(v), some_triangle[v])});
    }

    for (const auto& loop : mesh.boundary_loops()) {
        const auto m = loop.size();
        std::vector<int> walk;
        // reversed boundary order: loop[m-1], loop[m-2], ..., loop[0]
        for (std::size_t r = 0; r < m; ++r) {
            std::size_t i = m - 1 - r;
            int v = loop[i];
            int t = detail::triangle_containing(mesh, v, loop[(i + 1) % m]);
            if (walk.empty() || walk.back() != t) {
                walk.push_back(t);
            }
            // the fan of v runs from the triangle owning v->next to the one owning prev->v
            auto fan = detail::vertex_fan(mesh, v, t);
            if (fan.size() >= 2) {
                cycles.push_back({Cycle::Kind::BoundaryFan, std::move(fan)});
            }
        }
        while (walk.size() > 1 && walk.back() == walk.front()) {
            walk.pop_back();
        }
        cycles.push_back({Cycle::Kind::BoundaryLoop, std::move(walk)});
    }
    return {Sampling::Dual, std::move(centroids), std::move(edges), std::move(constraints),
            std::move(cycles)};
}

/** @brief Who produced a field and how. */
struct Provenance {
    std::string solver{"none"};
    std::string init{"none"};
    std::optional<std::uint64_t> seed;
};

/**
 * @brief One frame angle per graph node (radians, unbounded).
 *
 * Constrained entries equal the graph constraints exactly.
 */
struct FrameField {
    std::vector<double> theta;
    Sampling sampling{Sampling::Primal};
    std::uint64_t graph_id{0};
    Provenance provenance;
    /// nodes whose angle could not be recovered (zero representation vector)
    std::vector<int> degenerate_nodes;
};

inline FrameField make_field(const FieldGraph& graph, std::vector<double> theta, Provenance prov = {})
{
    if (theta.size() != graph.node_count()) {
        throw std::invalid_argument("make_field: theta length differs from node count");
    }
    return {std::move(theta), graph.sampling(), graph.fingerprint(), std::move(prov), {}};
}

/**
 * @brief Text serialization: a "#" header with sampling/solver/init/seed,
 * then one "node_index theta" line per node (shortest round-trip format).
 */
inline std::string write_field(const FrameField& field)
{
    std::string out;
    out += "# sampling " + std::string(to_string(field.sampling)) + '\n';
    out += "# solver " + field.provenance.solver + '\n';
    out += "# init " + field.provenance.init + '\n';
    out += "# seed " + (field.provenance.seed ? std::to_string(*field.provenance.seed) : "none") + '\n';
    for (std::size_t i = 0; i < field.theta.size(); ++i) {
        out += std::to_string(i) + ' ' + detail::format_double(field.theta[i]) + '\n';
    }
    return out;
}

inline FrameField read_field(std::string_view text)
{
    FrameField f;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        auto tok = detail::split_ws(line);
        if (tok.empty()) {
            continue;
        }
        if (tok[0] == "#") {
            if (tok.size() != 3) {
                throw std::invalid_argument("read_field: bad header line '" + line + "'");
            }
            if (tok[1] == "sampling") {
                f.sampling = parse_sampling(tok[2]);
            }
            else if (tok[1] == "solver") {
                f.provenance.solver = std::string(tok[2]);
            }
            else if (tok[1] == "init") {
                f.provenance.init = std::string(tok[2]);
            }
            else if (tok[1] == "seed" && tok[2] != "none") {
                f.provenance.seed = std::stoull(std::string(tok[2]));
            }
            continue;
        }
        if (tok.size() != 2 || std::stoul(std::string(tok[0])) != f.theta.size()) {
            throw std::invalid_argument("read_field: bad node line '" + line + "'");
        }
        f.theta.push_back(detail::parse_double(tok[1], f.theta.size() + 1));
    }
    return f;
}

}  // namespace frameflow
