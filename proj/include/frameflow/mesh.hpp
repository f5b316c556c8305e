#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "frameflow/geometry.hpp"

namespace frameflow
{

/** @brief Raised when mesh text cannot be parsed or violates a mesh invariant */
class MeshError : public std::runtime_error
{
public:
    enum class Kind {
        Parse,
        IndexOutOfRange,
        NonManifold,
        NonzeroZ,
        Degenerate,
        Folded,
        NotOnBoundary,
        ZeroNormal
    };

    MeshError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_{kind} {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/**
 * @brief Planar, manifold, CCW-oriented triangle mesh.
 *
 * Construction validates the triangles, flips clockwise ones, and derives
 * the undirected edge set, the directed boundary edges (oriented as in their
 * owning triangle, so the interior lies on the left) and the boundary loops.
 * The object is immutable afterwards.
 */
class Mesh
{
public:
    using Triangle = std::array<int, 3>;
    using Edge = std::array<int, 2>;

    Mesh() = default;

    Mesh(std::vector<Vec2> vertices, std::vector<Triangle> triangles)
        : vertices_{std::move(vertices)}, triangles_{std::move(triangles)}
    {
        validate_and_orient();
        build_edges();
        build_boundary_loops();
    }

    [[nodiscard]] const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
    [[nodiscard]] const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return vertices_.size(); }
    [[nodiscard]] std::size_t triangle_count() const noexcept { return triangles_.size(); }

    /// Undirected edges (i < j), sorted lexicographically.
    [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }

    /// Triangles incident to edges()[e]; the second entry is -1 on the boundary.
    [[nodiscard]] const std::vector<std::array<int, 2>>& edge_triangles() const noexcept
    {
        return edge_triangles_;
    }

    /// Directed boundary edges, interior on the left.
    [[nodiscard]] const std::vector<Edge>& boundary_edges() const noexcept { return boundary_edges_; }

    /// Boundary loops as vertex sequences, interior on the left (outer loop CCW, holes CW).
    [[nodiscard]] const std::vector<std::vector<int>>& boundary_loops() const noexcept
    {
        return boundary_loops_;
    }

    [[nodiscard]] std::size_t interior_edge_count() const noexcept
    {
        return edges_.size() - boundary_edges_.size();
    }

    [[nodiscard]] bool is_boundary_vertex(int v) const
    {
        return !vertex_boundary_edges_.at(static_cast<std::size_t>(v)).empty();
    }

    /// Indices into boundary_edges() of the edges touching vertex v.
    [[nodiscard]] const std::vector<int>& vertex_boundary_edges(int v) const
    {
        return vertex_boundary_edges_.at(static_cast<std::size_t>(v));
    }

    /// Indices into boundary_edges() of the edges owned by triangle t.
    [[nodiscard]] const std::vector<int>& triangle_boundary_edges(int t) const
    {
        return triangle_boundary_edges_.at(static_cast<std::size_t>(t));
    }

    /// The triangle containing the directed edge a->b, if any.
    [[nodiscard]] std::optional<int> triangle_with_directed_edge(int a, int b) const
    {
        auto it = halfedge_triangle_.find(key(a, b));
        if (it == halfedge_triangle_.end()) {
            return std::nullopt;
        }
        return it->second;
    }

    /// Outward unit normal of boundary_edges()[e].
    [[nodiscard]] Vec2 boundary_edge_normal(int e) const
    {
        const auto& be = boundary_edges_.at(static_cast<std::size_t>(e));
        Vec2 d = vertices_[be[1]] - vertices_[be[0]];
        return (1.0 / norm(d)) * rotate_cw(d);
    }

    friend bool operator==(const Mesh& a, const Mesh& b)
    {
        return a.vertices_ == b.vertices_ && a.triangles_ == b.triangles_;
    }

private:
    [[nodiscard]] std::uint64_t key(int a, int b) const
    {
        return static_cast<std::uint64_t>(a) * vertices_.size() + static_cast<std::uint64_t>(b);
    }

    void validate_and_orient()
    {
        const auto n = static_cast<int>(vertices_.size());
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            auto& tri = triangles_[t];
            for (int v : tri) {
                if (v < 0 || v >= n) {
                    throw MeshError(MeshError::Kind::IndexOutOfRange,
                                    "triangle " + std::to_string(t) + " references vertex " +
                                        std::to_string(v) + " of " + std::to_string(n));
                }
            }
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
                throw MeshError(MeshError::Kind::Degenerate,
                                "triangle " + std::to_string(t) + " repeats a vertex");
            }
            double a2 = signed_area2(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
            if (a2 == 0) {
                throw MeshError(MeshError::Kind::Degenerate,
                                "triangle " + std::to_string(t) + " has zero area");
            }
            if (a2 < 0) {
                std::swap(tri[1], tri[2]);
            }
        }
    }

    void build_edges()
    {
        struct Incidence {
            int lo, hi, tri, from;
        };
        std::vector<Incidence> inc;
        inc.reserve(triangles_.size() * 3);
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto& tri = triangles_[t];
            for (int k = 0; k < 3; ++k) {
                int a = tri[k];
                int b = tri[(k + 1) % 3];
                inc.push_back({std::min(a, b), std::max(a, b), static_cast<int>(t), a});
                auto [it, inserted] = halfedge_triangle_.emplace(key(a, b), static_cast<int>(t));
                if (!inserted) {
                    throw MeshError(MeshError::Kind::Folded,
                                    "edge " + std::to_string(a) + "->" + std::to_string(b) +
                                        " is traversed in the same direction by two triangles");
                }
            }
        }
        std::sort(inc.begin(), inc.end(), [](const Incidence& l, const Incidence& r) {
            return std::tie(l.lo, l.hi, l.tri) < std::tie(r.lo, r.hi, r.tri);
        });

        vertex_boundary_edges_.assign(vertices_.size(), {});
        triangle_boundary_edges_.assign(triangles_.size(), {});
        for (std::size_t i = 0; i < inc.size();) {
            std::size_t j = i;
            while (j < inc.size() && inc[j].lo == inc[i].lo && inc[j].hi == inc[i].hi) {
                ++j;
            }
            if (j - i > 2) {
                throw MeshError(MeshError::Kind::NonManifold,
                                "edge (" + std::to_string(inc[i].lo + 1) + ", " +
                                    std::to_string(inc[i].hi + 1) + ") belongs to " +
                                    std::to_string(j - i) + " triangles");
            }
            edges_.push_back({inc[i].lo, inc[i].hi});
            if (j - i == 2) {
                edge_triangles_.push_back({inc[i].tri, inc[i + 1].tri});
            }
            else {
                edge_triangles_.push_back({inc[i].tri, -1});
                int from = inc[i].from;
                int to = from == inc[i].lo ? inc[i].hi : inc[i].lo;
                auto id = static_cast<int>(boundary_edges_.size());
                boundary_edges_.push_back({from, to});
                vertex_boundary_edges_[from].push_back(id);
                vertex_boundary_edges_[to].push_back(id);
                triangle_boundary_edges_[inc[i].tri].push_back(id);
            }
            i = j;
        }
        for (std::size_t v = 0; v < vertices_.size(); ++v) {
            const auto k = vertex_boundary_edges_[v].size();
            if (k != 0 && k != 2) {
                throw MeshError(MeshError::Kind::NonManifold, "vertex " + std::to_string(v + 1) + " touches " +
                                                                  std::to_string(k) + " boundary edges");
            }
        }
    }

    void build_boundary_loops()
    {
        std::vector<char> used(boundary_edges_.size(), 0);
        for (std::size_t start = 0; start < boundary_edges_.size(); ++start) {
            if (used[start]) {
                continue;
            }
            std::vector<int> loop;
            auto e = static_cast<int>(start);
            while (e >= 0 && !used[e]) {
                used[e] = 1;
                loop.push_back(boundary_edges_[e][0]);
                int tip = boundary_edges_[e][1];
                int next = -1;
                for (int cand : vertex_boundary_edges_[tip]) {
                    if (!used[cand] && boundary_edges_[cand][0] == tip) {
                        next = cand;
                        break;
                    }
                }
                e = next;
            }
            boundary_loops_.push_back(std::move(loop));
        }
    }

    std::vector<Vec2> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<Edge> boundary_edges_;
    std::vector<std::vector<int>> boundary_loops_;
    std::vector<std::vector<int>> vertex_boundary_edges_;
    std::vector<std::vector<int>> triangle_boundary_edges_;
    std::unordered_map<std::uint64_t, int> halfedge_triangle_;
};

namespace detail
{

inline std::vector<std::string_view> split_ws(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t') {
            ++j;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

inline MeshError parse_error(std::size_t line_no, const std::string& what)
{
    return {MeshError::Kind::Parse, "line " + std::to_string(line_no) + ": " + what};
}

inline double parse_double(std::string_view tok, std::size_t line_no)
{
    double v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
        throw parse_error(line_no, "bad number '" + std::string(tok) + "'");
    }
    return v;
}

inline int parse_face_index(std::string_view tok, std::size_t line_no)
{
    // "i", "i/t", "i//n", "i/t/n": only the vertex index matters
    auto slash = tok.find('/');
    auto head = tok.substr(0, slash);
    long v{};
    auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), v);
    if (ec != std::errc{} || ptr != head.data() + head.size() || head.empty()) {
        throw parse_error(line_no, "bad face index '" + std::string(tok) + "'");
    }
    if (v < 1) {
        throw parse_error(line_no, "face indices are 1-based and positive");
    }
    return static_cast<int>(v - 1);
}

inline std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, ptr};
}

}  // namespace detail

/**
 * @brief Parse an OBJ-subset document into a Mesh.
 *
 * Accepted lines: "v x y [z]" with z == 0, "f i j k" with 1-based indices
 * (texture/normal references after '/' are ignored), "vt", "vn", comments
 * and blank lines. Anything else is a parse error.
 */
inline Mesh load_mesh(std::string_view text)
{
    std::vector<Vec2> vertices;
    std::vector<Mesh::Triangle> triangles;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        auto tok = detail::split_ws(line);
        if (tok.empty() || tok[0].front() == '#' || tok[0] == "vt" || tok[0] == "vn") {
            continue;
        }
        if (tok[0] == "v") {
            if (tok.size() != 3 && tok.size() != 4) {
                throw detail::parse_error(line_no, "vertex needs 2 or 3 coordinates");
            }
            Vec2 p{detail::parse_double(tok[1], line_no), detail::parse_double(tok[2], line_no)};
            if (tok.size() == 4 && detail::parse_double(tok[3], line_no) != 0) {
                throw MeshError(MeshError::Kind::NonzeroZ,
                                "line " + std::to_string(line_no) + ": nonzero z coordinate");
            }
            vertices.push_back(p);
        }
        else if (tok[0] == "f") {
            if (tok.size() != 4) {
                throw detail::parse_error(line_no, "only triangular faces are supported");
            }
            triangles.push_back({detail::parse_face_index(tok[1], line_no),
                                 detail::parse_face_index(tok[2], line_no),
                                 detail::parse_face_index(tok[3], line_no)});
        }
        else {
            throw detail::parse_error(line_no, "unsupported statement '" + std::string(tok[0]) + "'");
        }
    }
    return {std::move(vertices), std::move(triangles)};
}

/** @brief Serialize to the OBJ subset; load_mesh(write_obj(m)) == m. */
inline std::string write_obj(const Mesh& mesh)
{
    std::string out;
    for (const auto& p : mesh.vertices()) {
        out += "v " + detail::format_double(p.x) + ' ' + detail::format_double(p.y) + '\n';
    }
    for (const auto& t : mesh.triangles()) {
        out += "f " + std::to_string(t[0] + 1) + ' ' + std::to_string(t[1] + 1) + ' ' +
               std::to_string(t[2] + 1) + '\n';
    }
    return out;
}

namespace detail
{
inline Vec2 average_normal(const Mesh& mesh, const std::vector<int>& edges, const char* what)
{
    Vec2 sum;
    for (int e : edges) {
        sum += mesh.boundary_edge_normal(e);
    }
    double len = norm(sum);
    if (len < 1e-14) {
        throw MeshError(MeshError::Kind::ZeroNormal,
                        std::string(what) + ": boundary edge normals cancel");
    }
    return (1.0 / len) * sum;
}
}  // namespace detail

/** @brief Normalized average of the outward normals of the boundary edges at v. */
inline Vec2 boundary_vertex_normal(const Mesh& mesh, int v)
{
    if (v < 0 || static_cast<std::size_t>(v) >= mesh.vertex_count() || !mesh.is_boundary_vertex(v)) {
        throw MeshError(MeshError::Kind::NotOnBoundary,
                        "vertex " + std::to_string(v) + " is not on boundary");
    }
    return detail::average_normal(mesh, mesh.vertex_boundary_edges(v), "boundary_vertex_normal");
}

/** @brief Outward normal of a triangle's boundary edge(s), averaged when it owns several. */
inline Vec2 boundary_triangle_normal(const Mesh& mesh, int t)
{
    if (t < 0 || static_cast<std::size_t>(t) >= mesh.triangle_count() ||
        mesh.triangle_boundary_edges(t).empty()) {
        throw MeshError(MeshError::Kind::NotOnBoundary,
                        "triangle " + std::to_string(t) + " is not on boundary");
    }
    return detail::average_normal(mesh, mesh.triangle_boundary_edges(t), "boundary_triangle_normal");
}

}  // namespace frameflow
