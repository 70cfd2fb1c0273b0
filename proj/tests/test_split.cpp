#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shellforge/error.hpp"
#include "shellforge/field.hpp"
#include "shellforge/polygon.hpp"
#include "shellforge/primitives.hpp"
#include "shellforge/section.hpp"
#include "shellforge/split.hpp"

using namespace shellforge;

TEST_CASE("polygon: square with square hole triangulates to the right area") {
    std::vector<Vec2> outer = {{0, 0}, {10, 0}, {10, 10}, {0, 10}};               // CCW
    std::vector<std::vector<Vec2>> holes = {{{3, 3}, {3, 7}, {7, 7}, {7, 3}}};    // CW
    auto tris = triangulate_with_holes(outer, holes);
    std::vector<Vec2> pts = outer;
    for (const auto& h : holes) pts.insert(pts.end(), h.begin(), h.end());
    double area = 0.0;
    for (const auto& t : tris) {
        const Vec2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
        area += 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
    }
    CHECK(area == doctest::Approx(100.0 - 16.0));
    for (const auto& t : tris) {
        const Vec2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
        CHECK(((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)) >= -1e-12);
    }
}

TEST_CASE("polygon: dense annulus triangulates fully") {
    std::vector<Vec2> outer, hole;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
        double a = 2 * kPi * i / n;
        outer.push_back({20 * std::cos(a), 20 * std::sin(a)});
        hole.push_back({17 * std::cos(-a), 17 * std::sin(-a)});  // CW
    }
    auto tris = triangulate_with_holes(outer, {hole});
    std::vector<Vec2> pts = outer;
    pts.insert(pts.end(), hole.begin(), hole.end());
    double area = 0.0;
    for (const auto& t : tris) {
        const Vec2 &a = pts[t[0]], &b = pts[t[1]], &c = pts[t[2]];
        area += 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
    }
    double expect = kPi * (400.0 - 289.0);
    CHECK(std::abs(area - expect) / expect < 0.01);  // polygonal deficit only
}

TEST_CASE("section: cube cut mid-height has one square loop") {
    TriangleMesh cube = make_box({0, 0, 0}, {30, 30, 30});
    CrossSection cs = cross_section(cube, Plane{{0, 0, 1}, 15.0});
    REQUIRE(cs.loops.size() == 1);
    CHECK(cs.loop_depth[0] == 0);
    CHECK(cs.loop_length(0) == doctest::Approx(120.0));
}

TEST_CASE("section: shelled sphere equator gives two nested loops") {
    ScalarField f = voxelize(make_icosphere(15.0, 3), {.pitch = 0.5});
    ScalarField inner = offset_field(f, 3.0);
    ScalarField shell = csg_apply(f, inner, CsgOp::Subtract);
    TriangleMesh m = extract_surface(shell);
    CrossSection cs = cross_section(m, Plane{{0, 0, 1}, 0.0});
    REQUIRE(cs.loops.size() == 2);
    int outers = 0, holes = 0;
    for (int d : cs.loop_depth) (d % 2 == 0 ? outers : holes)++;
    CHECK(outers == 1);
    CHECK(holes == 1);
    double l0 = cs.loop_length(0), l1 = cs.loop_length(1);
    CHECK(std::abs(std::max(l0, l1) - 2 * kPi * 15.0) / (2 * kPi * 15.0) < 0.03);
    CHECK(std::abs(std::min(l0, l1) - 2 * kPi * 12.0) / (2 * kPi * 12.0) < 0.03);
}

TEST_CASE("split: cube mid-plane gives two equal watertight halves") {
    TriangleMesh cube = make_box({0, 0, 0}, {30, 30, 30});
    auto [below, above] = split_by_plane(cube, Plane{{0, 0, 1}, 15.0});
    CHECK(validate(below).watertight);
    CHECK(validate(above).watertight);
    CHECK(metrics(below).signed_volume == doctest::Approx(13500.0));
    CHECK(metrics(above).signed_volume == doctest::Approx(13500.0));
    CHECK(below.bounds().max.z == doctest::Approx(15.0));
    CHECK(above.bounds().min.z == doctest::Approx(15.0));
}

TEST_CASE("split: oblique plane through a tetrahedron conserves volume exactly") {
    TriangleMesh tet = make_tetrahedron();
    double vol = metrics(tet).signed_volume;
    Plane plane = Plane::through_point({1, 0.7, -0.3}, {0.1, 0.05, 0.0});
    auto [below, above] = split_by_plane(tet, plane);
    CHECK(validate(below).watertight);
    CHECK(validate(above).watertight);
    double sum = metrics(below).signed_volume + metrics(above).signed_volume;
    CHECK(std::abs(sum - vol) <= 1e-12 * vol);
}

TEST_CASE("split: tangent plane misses") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    CHECK_THROWS_AS(split_by_plane(cube, Plane{{0, 0, 1}, 0.0}), Error);
    try {
        split_by_plane(cube, Plane{{0, 0, 1}, -5.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PlaneMiss);
    }
}

TEST_CASE("split: open mesh rejected") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    cube.triangles.pop_back();
    try {
        split_by_plane(cube, Plane{{0, 0, 1}, 5.0});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotWatertight);
    }
}

TEST_CASE("split: shelled sphere at the equator — watertight, volume sum 1e-6") {
    ScalarField f = voxelize(make_icosphere(20.0, 4), {.pitch = 0.25});
    ScalarField shell = csg_apply(f, offset_field(f, 3.0), CsgOp::Subtract);
    TriangleMesh m = extract_surface(shell);
    REQUIRE(validate(m).watertight);
    double vol = metrics(m).signed_volume;

    auto [below, above] = split_by_plane(m, Plane{{0, 0, 1}, 0.0});
    MeshDiagnostics db = validate(below), da = validate(above);
    CHECK(db.watertight);
    CHECK(db.manifold);
    CHECK(da.watertight);
    CHECK(da.manifold);
    double sum = metrics(below).signed_volume + metrics(above).signed_volume;
    CHECK(std::abs(sum - vol) / vol < 1e-6);

    // Repeatable bit-exactly.
    auto [below2, above2] = split_by_plane(m, Plane{{0, 0, 1}, 0.0});
    REQUIRE(below2.vertices.size() == below.vertices.size());
    REQUIRE(above2.triangles.size() == above.triangles.size());
    bool identical = true;
    for (std::size_t i = 0; i < below.vertices.size(); ++i)
        if (!(below2.vertices[i] == below.vertices[i])) identical = false;
    CHECK(identical);
}

TEST_CASE("split: egg through both lobes of a dumbbell caps two loops") {
    // Two spheres joined by nothing — split plane crosses both: two disjoint
    // outer loops must each get their own cap.
    TriangleMesh two;
    append_mesh(two, make_icosphere(5.0, 3, {0, 0, 0}));
    append_mesh(two, make_icosphere(5.0, 3, {20, 0, 0}));
    double vol = metrics(two).signed_volume;
    auto [below, above] = split_by_plane(two, Plane{{0, 0, 1}, 0.0});
    CHECK(validate(below).watertight);
    CHECK(validate(above).watertight);
    double sum = metrics(below).signed_volume + metrics(above).signed_volume;
    CHECK(std::abs(sum - vol) / vol < 1e-9);
}
