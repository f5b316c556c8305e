#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "frameflow/mesh.hpp"

namespace frameflow
{

enum class TestMeshKind { Disk, Annulus, Square };

inline TestMeshKind parse_test_mesh_kind(std::string_view s)
{
    if (s == "disk") {
        return TestMeshKind::Disk;
    }
    if (s == "annulus") {
        return TestMeshKind::Annulus;
    }
    if (s == "square") {
        return TestMeshKind::Square;
    }
    throw std::invalid_argument("unknown mesh kind '" + std::string(s) + "'");
}

namespace detail
{

/**
 * Stitch two concentric rings. Vertex k of a ring sits at angular position
 * (step * k + offset) / (step * n) of a full turn; positions are compared
 * exactly with integer cross-multiplication.
 */
inline void stitch_rings(std::vector<Mesh::Triangle>& tris, int inner_first, long inner_n, long inner_step,
                         long inner_off, int outer_first, long outer_n, long outer_step, long outer_off)
{
    auto inner = [&](long k) { return inner_first + static_cast<int>(k % inner_n); };
    auto outer = [&](long k) { return outer_first + static_cast<int>(k % outer_n); };
    long ia = 0;
    long ib = 0;
    while (ia < inner_n || ib < outer_n) {
        // compare positions of the next inner and next outer vertices
        long lhs = (inner_step * (ia + 1) + inner_off) * (outer_step * outer_n);
        long rhs = (outer_step * (ib + 1) + outer_off) * (inner_step * inner_n);
        bool advance_inner = ib == outer_n || (ia < inner_n && lhs < rhs);
        if (advance_inner) {
            tris.push_back({inner(ia), outer(ib), inner(ia + 1)});
            ++ia;
        }
        else {
            tris.push_back({inner(ia), outer(ib), outer(ib + 1)});
            ++ib;
        }
    }
}

}  // namespace detail

/**
 * Unit disk: a center vertex plus `resolution` rings, ring i holding
 * round(2 pi i) vertices. Ring sizes are not all multiples of a common
 * factor, so the mesh has no rotational symmetry (a symmetric disk forces
 * the harmonic representation field to vanish at the center).
 */
inline Mesh make_disk(int resolution)
{
    std::vector<Vec2> verts{{0.0, 0.0}};
    std::vector<int> first{0};
    std::vector<long> count{1};
    for (int i = 1; i <= resolution; ++i) {
        first.push_back(static_cast<int>(verts.size()));
        const long n = std::lround(2.0 * std::numbers::pi * i);
        count.push_back(n);
        double r = static_cast<double>(i) / resolution;
        for (long k = 0; k < n; ++k) {
            double a = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            verts.push_back({r * std::cos(a), r * std::sin(a)});
        }
    }
    std::vector<Mesh::Triangle> tris;
    for (int k = 0; k < count[1]; ++k) {
        tris.push_back({0, first[1] + k, first[1] + static_cast<int>((k + 1) % count[1])});
    }
    for (int i = 2; i <= resolution; ++i) {
        detail::stitch_rings(tris, first[i - 1], count[i - 1], 1, 0, first[i], count[i], 1, 0);
    }
    return {std::move(verts), std::move(tris)};
}

/// Annulus with radii 0.5 and 1: resolution + 1 staggered rings of 6 * resolution vertices.
inline Mesh make_annulus(int resolution)
{
    const int n = 6 * resolution;
    std::vector<Vec2> verts;
    for (int i = 0; i <= resolution; ++i) {
        double r = 0.5 + 0.5 * static_cast<double>(i) / resolution;
        double off = (i % 2) * 0.5;
        for (int k = 0; k < n; ++k) {
            double a = 2.0 * std::numbers::pi * (k + off) / n;
            verts.push_back({r * std::cos(a), r * std::sin(a)});
        }
    }
    std::vector<Mesh::Triangle> tris;
    for (int i = 1; i <= resolution; ++i) {
        detail::stitch_rings(tris, (i - 1) * n, n, 2, (i - 1) % 2, i * n, n, 2, i % 2);
    }
    return {std::move(verts), std::move(tris)};
}

/// Unit square sampled by a resolution x resolution vertex grid, 2 (resolution-1)^2 triangles.
inline Mesh make_square(int resolution)
{
    const int n = resolution;
    std::vector<Vec2> verts;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            verts.push_back({static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1)});
        }
    }
    std::vector<Mesh::Triangle> tris;
    for (int j = 0; j + 1 < n; ++j) {
        for (int i = 0; i + 1 < n; ++i) {
            int v00 = j * n + i;
            int v10 = v00 + 1;
            int v01 = v00 + n;
            int v11 = v01 + 1;
            tris.push_back({v00, v10, v11});
            tris.push_back({v00, v11, v01});
        }
    }
    return {std::move(verts), std::move(tris)};
}

inline Mesh generate_test_mesh(TestMeshKind kind, int resolution)
{
    if (resolution < 3) {
        throw std::invalid_argument("generate_test_mesh: resolution must be >= 3");
    }
    switch (kind) {
        case TestMeshKind::Disk:
            return make_disk(resolution);
        case TestMeshKind::Annulus:
            return make_annulus(resolution);
        case TestMeshKind::Square:
            return make_square(resolution);
    }
    throw std::invalid_argument("generate_test_mesh: unknown kind");
}

}  // namespace frameflow
