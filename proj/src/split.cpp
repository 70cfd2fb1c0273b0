#include "shellforge/split.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "shellforge/error.hpp"
#include "shellforge/polygon.hpp"

namespace shellforge {

namespace {

struct HalfBuilder {
    const TriangleMesh& src;
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> index_of_key;

    explicit HalfBuilder(const TriangleMesh& s) : src(s) {}

    std::uint32_t vertex(std::uint64_t key, const Vec3& pos) {
        auto it = index_of_key.find(key);
        if (it != index_of_key.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(pos);
        index_of_key.emplace(key, id);
        return id;
    }
    std::uint32_t original(std::uint32_t i) { return vertex(cut_key_vertex(i), src.vertices[i]); }

    void triangle(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        if (a != b && b != c && a != c) mesh.triangles.push_back({a, b, c});
    }
    void fan(const std::vector<std::uint32_t>& poly) {
        for (std::size_t i = 1; i + 1 < poly.size(); ++i)
            triangle(poly[0], poly[i], poly[i + 1]);
    }
};

}  // namespace

std::pair<TriangleMesh, TriangleMesh> split_by_plane(const TriangleMesh& solid,
                                                     const Plane& plane) {
    {
        MeshDiagnostics d = validate(solid);
        if (!d.watertight)
            throw Error(ErrorCode::NotWatertight,
                        "split requires a watertight solid (" +
                            std::to_string(d.boundary_edge_count) + " boundary edges)");
    }

    std::vector<double> distance;
    std::vector<int> side;
    classify_vertices(solid, plane, 1e-9, distance, side);
    CrossSection cs = cross_section(solid, plane, distance, side);
    if (cs.loops.empty())
        throw Error(ErrorCode::PlaneMiss, "plane does not cross the solid's interior");

    HalfBuilder below(solid), above(solid);

    for (const auto& tri : solid.triangles) {
        int pos_count = 0, neg_count = 0;
        for (int k = 0; k < 3; ++k) {
            if (side[tri[k]] > 0) ++pos_count;
            if (side[tri[k]] < 0) ++neg_count;
        }
        if (neg_count == 0 && pos_count == 0) {
            // Coplanar face: it bounds material on the side its normal
            // opposes.
            Vec3 n = cross(solid.vertices[tri[1]] - solid.vertices[tri[0]],
                           solid.vertices[tri[2]] - solid.vertices[tri[0]]);
            HalfBuilder& h = dot(n, plane.normal) > 0.0 ? below : above;
            h.triangle(h.original(tri[0]), h.original(tri[1]), h.original(tri[2]));
            continue;
        }
        if (neg_count == 0) {
            above.triangle(above.original(tri[0]), above.original(tri[1]),
                           above.original(tri[2]));
            continue;
        }
        if (pos_count == 0) {
            below.triangle(below.original(tri[0]), below.original(tri[1]),
                           below.original(tri[2]));
            continue;
        }
        // Crossing triangle: clip into a polygon per side. On-plane vertices
        // belong to both; interpolated points are keyed per mesh edge so both
        // halves and the caps share bits.
        std::vector<std::uint32_t> poly_above, poly_below;
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
            if (side[a] >= 0) poly_above.push_back(above.original(a));
            if (side[a] <= 0) poly_below.push_back(below.original(a));
            if (side[a] * side[b] < 0) {
                Vec3 q = cut_point_position(solid, a, b, distance);
                std::uint64_t key = cut_key_edge(a, b);
                poly_above.push_back(above.vertex(key, q));
                poly_below.push_back(below.vertex(key, q));
            }
        }
        above.fan(poly_above);
        below.fan(poly_below);
    }

    // Cap each outer loop with its direct holes; both halves share the
    // triangulation with opposite orientations.
    for (std::size_t l = 0; l < cs.loops.size(); ++l) {
        if (cs.loop_depth[l] % 2 != 0) continue;  // holes are capped with their parent

        std::vector<Vec2> outer2d = cs.loop_2d(l);
        std::vector<std::uint32_t> flat_ids = cs.loops[l];
        if (polygon_signed_area(outer2d) < 0.0) {
            std::reverse(outer2d.begin(), outer2d.end());
            std::reverse(flat_ids.begin(), flat_ids.end());
        }

        std::vector<std::vector<Vec2>> holes2d;
        for (std::size_t h = 0; h < cs.loops.size(); ++h) {
            if (h == l || cs.loop_depth[h] != cs.loop_depth[l] + 1) continue;
            std::vector<Vec2> h2d = cs.loop_2d(h);
            if (!point_in_polygon(h2d[0], outer2d)) continue;
            // Make sure this outer loop is the immediate parent: no other
            // even-depth loop nests between them.
            std::vector<std::uint32_t> ids = cs.loops[h];
            if (polygon_signed_area(h2d) > 0.0) {
                std::reverse(h2d.begin(), h2d.end());
                std::reverse(ids.begin(), ids.end());
            }
            holes2d.push_back(std::move(h2d));
            flat_ids.insert(flat_ids.end(), ids.begin(), ids.end());
        }

        auto cap = triangulate_with_holes(outer2d, holes2d);
        for (const auto& t : cap) {
            std::uint32_t p0 = flat_ids[t[0]], p1 = flat_ids[t[1]], p2 = flat_ids[t[2]];
            // CCW in (u, v) means normal +n: outward for the below half.
            std::uint32_t b0 = below.vertex(cs.keys[p0], cs.points[p0]);
            std::uint32_t b1 = below.vertex(cs.keys[p1], cs.points[p1]);
            std::uint32_t b2 = below.vertex(cs.keys[p2], cs.points[p2]);
            below.triangle(b0, b1, b2);
            std::uint32_t a0 = above.vertex(cs.keys[p0], cs.points[p0]);
            std::uint32_t a1 = above.vertex(cs.keys[p1], cs.points[p1]);
            std::uint32_t a2 = above.vertex(cs.keys[p2], cs.points[p2]);
            above.triangle(a0, a2, a1);
        }
    }

    double vol_below = std::abs(metrics(below.mesh).signed_volume);
    double vol_above = std::abs(metrics(above.mesh).signed_volume);
    double total = vol_below + vol_above;
    if (total <= 0.0 || std::min(vol_below, vol_above) < 1e-9 * total)
        throw Error(ErrorCode::PlaneMiss, "plane is tangent: one side has no interior");

    below.mesh.name = solid.name.empty() ? "below" : solid.name + "_below";
    above.mesh.name = solid.name.empty() ? "above" : solid.name + "_above";
    return {std::move(below.mesh), std::move(above.mesh)};
}

}  // namespace shellforge
