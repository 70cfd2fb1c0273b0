#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shellforge/error.hpp"
#include "shellforge/field.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/primitives.hpp"

using namespace shellforge;

namespace {

VoxelizeOptions coarse(double pitch) {
    VoxelizeOptions o;
    o.pitch = pitch;
    return o;
}

// Nearest sample to a world position.
float nearest_sample(const ScalarField& f, const Vec3& p) {
    int i = static_cast<int>(std::lround((p.x - f.origin.x) / f.pitch));
    int j = static_cast<int>(std::lround((p.y - f.origin.y) / f.pitch));
    int k = static_cast<int>(std::lround((p.z - f.origin.z) / f.pitch));
    return f.at(i, j, k);
}

}  // namespace

TEST_CASE("voxelize: cube center is ~ -5, boundary strictly positive") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    ScalarField f = voxelize(cube, coarse(0.5));
    CHECK(std::abs(nearest_sample(f, {5, 5, 5}) - (-5.0)) <= 0.5);
    for (int k = 0; k < f.nz; ++k)
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i) {
                if (i != 0 && i != f.nx - 1 && j != 0 && j != f.ny - 1 && k != 0 && k != f.nz - 1)
                    continue;
                CHECK(f.at(i, j, k) > 0.f);
            }
    // Samples outside the solid but inside the grid are positive.
    CHECK(nearest_sample(f, {-0.9, 5, 5}) > 0.f);
}

TEST_CASE("voxelize: sphere signed distance matches the analytic SDF") {
    TriangleMesh sphere = make_icosphere(10.0, 3);
    ScalarField f = voxelize(sphere, coarse(0.25));
    // +2 at radius 12
    CHECK(std::abs(f.sample({12, 0, 0}) - 2.0) <= 0.25);
    CHECK(std::abs(f.sample({0, 12, 0}) - 2.0) <= 0.25);
    // -4 at radius 6
    CHECK(std::abs(f.sample({0, 0, 6}) - (-4.0)) <= 0.25);
    // far-field accuracy after closest-point propagation (15+ voxels out)
    CHECK(std::abs(f.sample({0, 0, 0}) - (-10.0)) <= 0.35);
}

TEST_CASE("voxelize: open mesh rejected") {
    TriangleMesh cube = make_box({0, 0, 0}, {5, 5, 5});
    cube.triangles.pop_back();
    try {
        voxelize(cube, coarse(0.5));
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotWatertight);
    }
}

TEST_CASE("voxelize: grid cap enforced") {
    VoxelizeOptions o;
    o.pitch = 0.01;
    o.voxel_cap = 1000;
    try {
        voxelize(make_box({0, 0, 0}, {10, 10, 10}), o);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridTooLarge);
    }
}

TEST_CASE("extract: watertight sphere within 2% of the analytic ball") {
    TriangleMesh sphere = make_icosphere(10.0, 3);
    ScalarField f = voxelize(sphere, coarse(0.25));
    TriangleMesh iso = extract_surface(f);
    MeshDiagnostics d = validate(iso);
    CHECK(d.watertight);
    CHECK(d.manifold);
    double analytic = 4.0 / 3.0 * kPi * 1000.0;  // 4188.79
    CHECK(std::abs(metrics(iso).signed_volume - analytic) / analytic < 0.02);
}

TEST_CASE("extract: all-positive field gives the empty mesh") {
    ScalarField f = make_grid(Aabb{{0, 0, 0}, {5, 5, 5}}, 1.0, 2);
    for (auto& v : f.values) v = 3.f;
    TriangleMesh m = extract_surface(f);
    CHECK(m.vertices.empty());
    CHECK(m.triangles.empty());
    CHECK(f.solid_volume() == 0.0);
}

TEST_CASE("extract: voxelize round trip conserves cube volume within 3%") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    ScalarField f = voxelize(cube, coarse(0.25));
    TriangleMesh back = extract_surface(f);
    CHECK(validate(back).watertight);
    CHECK(std::abs(metrics(back).signed_volume - 1000.0) / 1000.0 < 0.03);
    // Exterior faces reconstruct on the exact planes.
    Aabb box = back.bounds();
    CHECK(std::abs(box.min.x - 0.0) < 0.3);
    CHECK(std::abs(box.max.z - 10.0) < 0.3);
}

TEST_CASE("csg: subtract(X, X) empties the solid; union with empty is identity") {
    TriangleMesh cube = make_box({0, 0, 0}, {8, 8, 8});
    ScalarField x = voxelize(cube, coarse(0.4));
    ScalarField none = csg_apply(x, x, CsgOp::Subtract);
    for (float v : none.values) CHECK(v >= 0.f);

    ScalarField empty = x;
    for (auto& v : empty.values) v = 1e6f;
    ScalarField same = csg_apply(x, empty, CsgOp::Union);
    for (std::size_t i = 0; i < x.values.size(); ++i) CHECK(same.values[i] == x.values[i]);
}

TEST_CASE("csg: cube minus coaxial cylinder matches the analytic volume") {
    TriangleMesh cube = make_box({-5, -5, -5}, {5, 5, 5});
    ScalarField f = voxelize(cube, coarse(0.2));
    // Through-cylinder r=2 along z, overshooting both faces.
    csg_apply_sdf(f, sdf_cylinder(RigidTransform::identity(), 2.0, -20.0, 20.0), CsgOp::Subtract);
    double expect = 1000.0 - kPi * 4.0 * 10.0;  // 874.34
    TriangleMesh out = extract_surface(f);
    CHECK(validate(out).watertight);
    CHECK(std::abs(metrics(out).signed_volume - expect) / expect < 0.03);
}

TEST_CASE("csg: mismatched pitches rejected, resampling works otherwise") {
    ScalarField a = voxelize(make_box({0, 0, 0}, {6, 6, 6}), coarse(0.4));
    ScalarField b = voxelize(make_box({3, 3, 3}, {9, 9, 9}), coarse(0.5));
    CHECK_THROWS_AS(csg_apply(a, b, CsgOp::Union), Error);

    ScalarField b2 = voxelize(make_box({3, 3, 3}, {9, 9, 9}), coarse(0.4));
    ScalarField u = csg_apply(a, b2, CsgOp::Intersect);
    // Intersection is the [3,6]^3 cube = 27 mm^3 (b2 resampled onto a's lattice).
    double vol = u.solid_volume();
    CHECK(std::abs(vol - 27.0) / 27.0 < 0.15);
}

TEST_CASE("csg: inclusion-exclusion on two overlapping spheres within 5%") {
    TriangleMesh s1 = make_icosphere(6.0, 3, {0, 0, 0});
    TriangleMesh s2 = make_icosphere(6.0, 3, {4, 0, 0});
    Aabb joint = s1.bounds();
    joint.expand(s2.bounds());
    ScalarField grid = make_grid(joint, 0.25, 3);
    ScalarField f1 = voxelize_on_grid(s1, grid);
    ScalarField f2 = voxelize_on_grid(s2, grid);
    double va = f1.solid_volume();
    double vb = f2.solid_volume();
    double vu = csg_apply(f1, f2, CsgOp::Union).solid_volume();
    double vi = csg_apply(f1, f2, CsgOp::Intersect).solid_volume();
    CHECK(std::abs((vu + vi) - (va + vb)) / (va + vb) < 0.05);
}

TEST_CASE("offset: zero delta is the identity") {
    ScalarField f = voxelize(make_box({0, 0, 0}, {5, 5, 5}), coarse(0.5));
    ScalarField same = offset_field(f, 0.0);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(same.values[i] == f.values[i]);
}

TEST_CASE("offset: eroding a sphere by 3 leaves the analytic smaller sphere") {
    TriangleMesh sphere = make_icosphere(20.0, 4);
    ScalarField f = voxelize(sphere, coarse(0.25));
    ScalarField eroded = offset_field(f, 3.0);
    double expect = 4.0 / 3.0 * kPi * 17.0 * 17.0 * 17.0;  // 20579.5
    CHECK(std::abs(eroded.solid_volume() - expect) / expect < 0.03);
}

TEST_CASE("offset: eroding a cube by 2 shrinks the bbox to ~6mm") {
    ScalarField f = voxelize(make_box({0, 0, 0}, {10, 10, 10}), coarse(0.25));
    TriangleMesh small = extract_surface(offset_field(f, 2.0));
    Aabb box = small.bounds();
    for (int a = 0; a < 3; ++a) {
        CHECK(std::abs(box.min[a] - 2.0) <= 0.25);
        CHECK(std::abs(box.max[a] - 8.0) <= 0.25);
    }
}

TEST_CASE("offset: growth beyond the padding is rejected") {
    ScalarField f = voxelize(make_box({0, 0, 0}, {5, 5, 5}), coarse(0.5));  // padding 3 voxels
    try {
        offset_field(f, -5.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DeltaExceedsPadding);
    }
    // Small growth stays legal.
    ScalarField grown = offset_field(f, -0.5);
    CHECK(grown.solid_volume() > f.solid_volume());
}

TEST_CASE("offset: erosions compose exactly") {
    ScalarField f = voxelize(make_icosphere(8.0, 3), coarse(0.4));
    ScalarField a = offset_field(offset_field(f, 1.0), 1.5);
    ScalarField b = offset_field(f, 2.5);
    for (std::size_t i = 0; i < a.values.size(); ++i)
        CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-6));
}

TEST_CASE("extract surface of analytic field: orientation is outward") {
    ScalarField grid = make_grid(Aabb{{-6, -6, -6}, {6, 6, 6}}, 0.4, 3);
    ScalarField f = sample_sdf(sdf_sphere({0, 0, 0}, 5.0), grid);
    TriangleMesh m = extract_surface(f);
    CHECK(validate(m).watertight);
    CHECK(metrics(m).signed_volume > 0.0);
    double analytic = 4.0 / 3.0 * kPi * 125.0;
    CHECK(std::abs(metrics(m).signed_volume - analytic) / analytic < 0.03);
}
