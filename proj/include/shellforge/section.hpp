// Planar cross-sections of a triangle mesh: the closed loops where a plane
// cuts the surface. Shared by exact splitting (cap boundaries), split-plane
// planning (rim perimeter) and fastener placement checks.
#pragma once

#include <cstdint>
#include <vector>

#include "shellforge/geom.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/polygon.hpp"

namespace shellforge {

// A cut point is either an original mesh vertex (a == b) or the canonical
// interpolation on mesh edge (a, b) with a < b. The packed key makes welding
// across triangles and halves exact.
inline std::uint64_t cut_key_vertex(std::uint32_t i) {
    return (static_cast<std::uint64_t>(i) << 32) | i;
}
inline std::uint64_t cut_key_edge(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Canonical position of a cut on edge (a, b): evaluated with a < b so every
// consumer reproduces the same bits.
inline Vec3 cut_point_position(const TriangleMesh& mesh, std::uint32_t a, std::uint32_t b,
                               const std::vector<double>& plane_distance) {
    if (a > b) std::swap(a, b);
    double da = plane_distance[a], db = plane_distance[b];
    double t = da / (da - db);
    return mesh.vertices[a] + (mesh.vertices[b] - mesh.vertices[a]) * t;
}

struct CrossSection {
    Plane plane;
    Vec3 basis_u, basis_v;                          // u x v = plane normal
    std::vector<Vec3> points;                       // unique cut points
    std::vector<std::uint64_t> keys;                // identity per point
    std::vector<std::vector<std::uint32_t>> loops;  // closed loops over points
    std::vector<int> loop_depth;                    // containment depth per loop

    Vec2 to_plane(const Vec3& p) const {
        Vec3 rel = p - plane.normal * plane.offset;
        return {dot(rel, basis_u), dot(rel, basis_v)};
    }
    std::vector<Vec2> loop_2d(std::size_t l) const {
        std::vector<Vec2> out;
        out.reserve(loops[l].size());
        for (std::uint32_t i : loops[l]) out.push_back(to_plane(points[i]));
        return out;
    }
    double loop_length(std::size_t l) const {
        double len = 0.0;
        const auto& loop = loops[l];
        for (std::size_t i = 0; i < loop.size(); ++i)
            len += norm(points[loop[(i + 1) % loop.size()]] - points[loop[i]]);
        return len;
    }
};

// Vertex classification against the plane: +1 / -1 / 0 (within snap_eps).
void classify_vertices(const TriangleMesh& mesh, const Plane& plane, double snap_eps,
                       std::vector<double>& distance, std::vector<int>& side);

// Cross-section with precomputed classification (shared with split).
CrossSection cross_section(const TriangleMesh& mesh, const Plane& plane,
                           const std::vector<double>& distance, const std::vector<int>& side);

CrossSection cross_section(const TriangleMesh& mesh, const Plane& plane,
                           double snap_eps = 1e-9);

}  // namespace shellforge
