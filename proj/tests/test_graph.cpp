#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numbers>

#include "frameflow/graph.hpp"
#include "frameflow/meshgen.hpp"

using namespace frameflow;

namespace
{

Mesh two_triangles()
{
    return Mesh({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{{0, 1, 2}}, {{0, 2, 3}}});
}

std::size_t count_kind(const FieldGraph& g, Cycle::Kind k)
{
    return static_cast<std::size_t>(
        std::count_if(g.cycles().begin(), g.cycles().end(), [k](const Cycle& c) { return c.kind == k; }));
}

bool has_edge(const FieldGraph& g, int a, int b)
{
    const auto& nb = g.neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

// Every directed step must be walked exactly as often as its reverse.
void expect_balanced_steps(const FieldGraph& g)
{
    std::map<std::pair<int, int>, int> steps;
    for (const auto& c : g.cycles()) {
        for (std::size_t k = 0; k < c.nodes.size(); ++k) {
            ++steps[{c.nodes[k], c.nodes[(k + 1) % c.nodes.size()]}];
        }
    }
    for (const auto& [e, n] : steps) {
        auto it = steps.find({e.second, e.first});
        ASSERT_NE(it, steps.end()) << e.first << "->" << e.second << " has no reverse";
        EXPECT_EQ(it->second, n);
    }
}

}  // namespace

TEST(Graph, PrimalOfTwoTriangles)
{
    auto g = build_primal(two_triangles());
    EXPECT_EQ(g.sampling(), Sampling::Primal);
    EXPECT_EQ(g.node_count(), 4u);
    EXPECT_EQ(g.edges().size(), 5u);
    EXPECT_EQ(g.constrained_count(), 4u);
    EXPECT_EQ(g.cycles().size(), 3u);
    EXPECT_EQ(count_kind(g, Cycle::Kind::BoundaryLoop), 1u);
    EXPECT_TRUE(g.connected());
}

TEST(Graph, DualOfTwoTriangles)
{
    auto g = build_dual(two_triangles());
    EXPECT_EQ(g.sampling(), Sampling::Dual);
    EXPECT_EQ(g.node_count(), 2u);
    ASSERT_EQ(g.edges().size(), 1u);
    EXPECT_EQ(g.constrained_count(), 2u);
    EXPECT_EQ(count_kind(g, Cycle::Kind::InteriorFace), 0u);
    // vertices 0 and 2 touch both triangles
    EXPECT_EQ(count_kind(g, Cycle::Kind::BoundaryFan), 2u);
    EXPECT_EQ(count_kind(g, Cycle::Kind::BoundaryLoop), 1u);
}

TEST(Graph, PrimalCountsMatchMesh)
{
    for (auto kind : {TestMeshKind::Disk, TestMeshKind::Annulus, TestMeshKind::Square}) {
        auto m = generate_test_mesh(kind, 6);
        auto g = build_primal(m);
        EXPECT_EQ(g.node_count(), m.vertex_count());
        EXPECT_EQ(g.edges().size(), m.edges().size());
        EXPECT_EQ(g.cycles().size(), m.triangle_count() + m.boundary_loops().size());
        std::size_t boundary_vertices = 0;
        for (const auto& l : m.boundary_loops()) {
            boundary_vertices += l.size();
        }
        EXPECT_EQ(g.constrained_count(), boundary_vertices);
        EXPECT_TRUE(g.connected());
    }
}

TEST(Graph, DualCountsMatchMesh)
{
    for (auto kind : {TestMeshKind::Disk, TestMeshKind::Annulus, TestMeshKind::Square}) {
        auto m = generate_test_mesh(kind, 6);
        auto g = build_dual(m);
        EXPECT_EQ(g.node_count(), m.triangle_count());
        EXPECT_EQ(g.edges().size(), m.interior_edge_count());
        std::size_t interior_vertices = 0;
        std::size_t boundary_vertices = 0;
        for (int v = 0; v < static_cast<int>(m.vertex_count()); ++v) {
            (m.is_boundary_vertex(v) ? boundary_vertices : interior_vertices) += 1;
        }
        EXPECT_EQ(count_kind(g, Cycle::Kind::InteriorFace), interior_vertices);
        EXPECT_LE(count_kind(g, Cycle::Kind::BoundaryFan), boundary_vertices);
        EXPECT_EQ(count_kind(g, Cycle::Kind::BoundaryLoop), m.boundary_loops().size());
        EXPECT_TRUE(g.connected());
    }
}

TEST(Graph, PrimalStepsAreGraphEdgesAndBalanced)
{
    auto g = build_primal(make_annulus(4));
    for (const auto& c : g.cycles()) {
        for (std::size_t k = 0; k < c.nodes.size(); ++k) {
            EXPECT_TRUE(has_edge(g, c.nodes[k], c.nodes[(k + 1) % c.nodes.size()]));
        }
    }
    expect_balanced_steps(g);
}

TEST(Graph, DualVirtualStepsJoinConstrainedNodes)
{
    auto g = build_dual(make_disk(6));
    for (const auto& c : g.cycles()) {
        for (std::size_t k = 0; k < c.nodes.size(); ++k) {
            int a = c.nodes[k];
            int b = c.nodes[(k + 1) % c.nodes.size()];
            if (!has_edge(g, a, b)) {
                EXPECT_NE(c.kind, Cycle::Kind::InteriorFace);
                EXPECT_TRUE(g.is_constrained(a) && g.is_constrained(b));
            }
        }
    }
    expect_balanced_steps(g);
    expect_balanced_steps(build_dual(make_annulus(5)));
}

TEST(Graph, InteriorCyclesAreCounterClockwise)
{
    for (const auto& g : {build_primal(make_disk(5)), build_dual(make_disk(5))}) {
        for (const auto& c : g.cycles()) {
            if (c.kind != Cycle::Kind::InteriorFace) {
                continue;
            }
            double a = 0;
            for (std::size_t k = 0; k < c.nodes.size(); ++k) {
                a += cross(g.positions()[c.nodes[k]], g.positions()[c.nodes[(k + 1) % c.nodes.size()]]);
            }
            EXPECT_GT(a, 0.0);
        }
    }
}

TEST(Graph, SquareBoundaryConstraintsFollowNormals)
{
    auto g = build_primal(make_square(4));
    // edge midpoints on the sides have axis-aligned normals: canonical angle 0
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!g.is_constrained(static_cast<int>(i))) {
            continue;
        }
        double c = *g.constraints()[i];
        EXPECT_GE(c, 0.0);
        EXPECT_LT(c, std::numbers::pi / 2);
        bool corner = (g.positions()[i].x == 0 || g.positions()[i].x == 1) &&
                      (g.positions()[i].y == 0 || g.positions()[i].y == 1);
        EXPECT_NEAR(c, corner ? std::numbers::pi / 4 : 0.0, 1e-12);
    }
}

TEST(Graph, ConstructorNormalizesAndValidates)
{
    FieldGraph g(Sampling::Primal, {{0, 0}, {1, 0}, {0, 1}}, {{1, 0}, {0, 1}, {2, 1}},
                 {std::optional<double>{-0.25}, std::nullopt, std::nullopt}, {});
    EXPECT_EQ(g.edges().size(), 2u);
    EXPECT_EQ(g.edges()[0], (FieldGraph::Edge{0, 1}));
    EXPECT_NEAR(*g.constraints()[0], std::numbers::pi / 2 - 0.25, 1e-15);
    EXPECT_EQ(g.free_nodes(), (std::vector<int>{1, 2}));

    EXPECT_THROW(FieldGraph(Sampling::Primal, {{0, 0}}, {{0, 0}}, {std::nullopt}, {}), std::invalid_argument);
    EXPECT_THROW(FieldGraph(Sampling::Primal, {{0, 0}}, {}, {}, {}), std::invalid_argument);
    EXPECT_THROW(FieldGraph(Sampling::Primal, {{0, 0}}, {}, {std::nullopt}, {{Cycle::Kind::InteriorFace, {3}}}),
                 std::invalid_argument);
}

TEST(Graph, ComponentCount)
{
    FieldGraph g(Sampling::Primal, {{0, 0}, {1, 0}, {2, 0}, {3, 0}}, {{0, 1}, {2, 3}},
                 std::vector<std::optional<double>>(4), {});
    EXPECT_EQ(g.component_count(), 2u);
    EXPECT_FALSE(g.connected());
}

TEST(Graph, FingerprintDistinguishesGraphs)
{
    auto m = make_disk(4);
    EXPECT_EQ(build_primal(m).fingerprint(), build_primal(m).fingerprint());
    EXPECT_NE(build_primal(m).fingerprint(), build_dual(m).fingerprint());
    EXPECT_NE(build_primal(m).fingerprint(), build_primal(make_disk(5)).fingerprint());
}

TEST(Graph, SamplingNames)
{
    EXPECT_EQ(parse_sampling("primal"), Sampling::Primal);
    EXPECT_EQ(parse_sampling("dual"), Sampling::Dual);
    EXPECT_THROW(parse_sampling("mixed"), std::invalid_argument);
}

TEST(FieldText, RoundTripIsExact)
{
    auto g = build_primal(make_disk(4));
    std::vector<double> theta(g.node_count());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = g.constraints()[i].value_or(0.1 * static_cast<double>(i) + 1.0 / 3.0);
    }
    auto f = make_field(g, theta, {"lbfgs", "random", 7});
    auto text = write_field(f);
    auto back = read_field(text);
    EXPECT_EQ(back.theta, f.theta);
    EXPECT_EQ(back.sampling, Sampling::Primal);
    EXPECT_EQ(back.provenance.solver, "lbfgs");
    EXPECT_EQ(back.provenance.init, "random");
    EXPECT_EQ(back.provenance.seed, std::optional<std::uint64_t>{7});
    EXPECT_EQ(write_field(back), text);
}

TEST(FieldText, RejectsBadInput)
{
    EXPECT_THROW(read_field("# sampling\n"), std::invalid_argument);
    EXPECT_THROW(make_field(build_primal(make_disk(3)), {0.0}), std::invalid_argument);
}
