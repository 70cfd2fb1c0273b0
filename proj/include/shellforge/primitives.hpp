// Mesh constructors for canonical solids and exact signed-distance functors
// for the parametric primitives the generators are built from.
#pragma once

#include <functional>

#include "shellforge/geom.hpp"
#include "shellforge/mesh.hpp"

namespace shellforge {

// --- mesh fixtures -------------------------------------------------------

// Axis-aligned box from min/max corners, 12 triangles, outward orientation.
TriangleMesh make_box(const Vec3& lo, const Vec3& hi);

// Icosphere: icosahedron subdivided `subdivisions` times, radius r, centered
// at `center`. 20 * 4^subdivisions triangles.
TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center = {0, 0, 0});

// Closed cylinder along +z from z0 to z1, `segments` sides.
TriangleMesh make_cylinder(double radius, double z0, double z1, int segments = 96,
                           const Vec3& axis_origin = {0, 0, 0});

// Regular tetrahedron with unit-ish coordinates; watertight test fixture.
TriangleMesh make_tetrahedron();

// --- signed distance functors --------------------------------------------

using Sdf = std::function<double(const Vec3&)>;

// Exact box SDF; hollow-free, negative inside.
Sdf sdf_box(const Vec3& center, const Vec3& half_extent);
Sdf sdf_sphere(const Vec3& center, double radius);

// Capped cylinder whose axis is the local +z of `pose`, spanning local
// z in [z0, z1].
Sdf sdf_cylinder(const RigidTransform& pose, double radius, double z0, double z1);

// Obround (stadium) cross-section of `length` x `width` in the local xy
// plane, extruded over local z in [z0, z1].
Sdf sdf_obround_prism(const RigidTransform& pose, double length, double width, double z0,
                      double z1);

// Capsule (exact SDF of a segment inflated by radius).
Sdf sdf_capsule(const Vec3& a, const Vec3& b, double radius);

// Ellipsoid with given semi-axes; approximate-but-sign-correct distance
// (scaled radial estimate, adequate for voxel sampling).
Sdf sdf_ellipsoid(const Vec3& center, const Vec3& semi_axes);

inline Sdf sdf_union(Sdf a, Sdf b) {
    return [a = std::move(a), b = std::move(b)](const Vec3& p) { return std::min(a(p), b(p)); };
}
inline Sdf sdf_intersect(Sdf a, Sdf b) {
    return [a = std::move(a), b = std::move(b)](const Vec3& p) { return std::max(a(p), b(p)); };
}
inline Sdf sdf_subtract(Sdf a, Sdf b) {
    return [a = std::move(a), b = std::move(b)](const Vec3& p) { return std::max(a(p), -b(p)); };
}
inline Sdf sdf_offset(Sdf a, double grow) {
    return [a = std::move(a), grow](const Vec3& p) { return a(p) - grow; };
}

// Exact closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace shellforge
