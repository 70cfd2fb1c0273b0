// Indexed triangle mesh: the geometry carrier for every stage of the
// toolchain. Triangles are counter-clockwise when viewed from outside.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "shellforge/geom.hpp"

namespace shellforge {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::string name;

    bool empty() const { return triangles.empty(); }
    Vec3 triangle_normal(std::size_t t) const {
        const auto& tri = triangles[t];
        return cross(vertices[tri[1]] - vertices[tri[0]], vertices[tri[2]] - vertices[tri[0]]);
    }
    double triangle_area(std::size_t t) const { return 0.5 * norm(triangle_normal(t)); }
    Aabb bounds() const {
        Aabb box;
        for (const auto& v : vertices) box.expand(v);
        return box;
    }
};

struct MeshDiagnostics {
    bool watertight = false;
    bool manifold = false;
    std::size_t boundary_edge_count = 0;
    std::size_t inverted_adjacent_pairs = 0;
    std::size_t degenerate_triangle_count = 0;
    std::size_t connected_components = 0;
};

struct MeshMetrics {
    double signed_volume = 0.0;  // mm^3, divergence theorem over origin tetrahedra
    double surface_area = 0.0;   // mm^2
    Aabb bbox;
};

// Exact edge pairing over index pairs. Throws Error(IndexOutOfRange) on
// invalid triangle indices. `degenerate_area` is the area threshold in mm^2.
MeshDiagnostics validate(const TriangleMesh& mesh, double degenerate_area = 1e-8);

// Weld duplicate vertices within `weld_epsilon`, drop degenerate triangles,
// unify winding per connected component (propagated from its largest
// triangle) and flip components whose signed volume is negative. Best-effort:
// remaining defects show up in a later validate().
TriangleMesh repair_basic(const TriangleMesh& mesh, double weld_epsilon = 1e-4,
                          double degenerate_area = 1e-8);

MeshMetrics metrics(const TriangleMesh& mesh);

// Applies v -> R v + t to every vertex. Throws Error(InvalidTransform) if the
// rotation is not orthonormal with det +1.
TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t);

// Appends `extra` (concatenating vertex pools; no welding).
void append_mesh(TriangleMesh& base, const TriangleMesh& extra);

}  // namespace shellforge
