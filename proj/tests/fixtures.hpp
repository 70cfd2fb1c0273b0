// Shared synthetic fixtures for the integration suites: a hand-scale "scanned"
// egg with a flattened window zone and the three fiducial bumps of the default
// blank embedded on the flat, plus the matching circuit description.
#pragma once

#include "shellforge/circuit.hpp"
#include "shellforge/field.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/primitives.hpp"

namespace shellforge::fixtures {

inline CircuitSpec egg_circuit() {
    CircuitSpec c;
    c.board_length = 12;
    c.board_width = 12;
    c.board_height = 3;
    c.tilt_deg = 10;
    // Standoff covers the sensor package plus the 2 mm cover sheet, which
    // also keeps the bracket lips clear of the window wall.
    c.window = WindowSpec{14.0, 0.0, 0.0, 5.0};
    return c;
}

inline BlankSpec egg_blank() {
    BlankSpec b;
    b.circuit = egg_circuit();
    b.expansion = 3.0;
    b.fiducials = BlankSpec::default_fiducials(b.circuit);
    return b;
}

// Ellipsoid (22, 22, 30) flattened at the window plane with the blank's bump
// pattern on the flat. Returns the mesh and the ground-truth window pose
// (identity rotation, translation to the flat's center).
inline TriangleMesh egg_scan(double pitch, RigidTransform* truth_pose = nullptr) {
    const Vec3 semi{22, 22, 30};
    const double flat_radius = 12.0;
    const double zflat =
        semi.z * std::sqrt(1.0 - (flat_radius * flat_radius) / (semi.x * semi.x));

    Sdf egg = sdf_ellipsoid({0, 0, 0}, semi);
    Sdf flat_cut = sdf_box({0, 0, zflat + 25.0}, {50, 50, 25.0});
    Sdf solid = sdf_subtract(std::move(egg), std::move(flat_cut));
    BlankSpec blank = egg_blank();
    for (const Vec3& c : blank.fiducial_centers())
        solid = sdf_union(std::move(solid), sdf_sphere({c.x, c.y, zflat}, 1.0));

    ScalarField grid = make_grid(Aabb{{-semi.x, -semi.y, -semi.z}, {semi.x, semi.y, zflat + 1.5}},
                                 pitch, 3);
    TriangleMesh mesh = extract_surface(sample_sdf(solid, grid));
    mesh.name = "egg";
    if (truth_pose) *truth_pose = RigidTransform{Mat3::identity(), {0, 0, zflat}};
    return mesh;
}

}  // namespace shellforge::fixtures
