#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shellforge/error.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/mesh_io.hpp"
#include "shellforge/primitives.hpp"
#include "shellforge/rng.hpp"

using namespace shellforge;

namespace {

std::vector<std::uint8_t> one_triangle_stl() {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    m.triangles = {{0, 1, 2}};
    return write_mesh(m, MeshFormat::StlBinary);
}

}  // namespace

TEST_CASE("binary STL: minimal well-formed file") {
    auto bytes = one_triangle_stl();
    CHECK(bytes.size() == 134);  // 80 header + 4 count + 50
    TriangleMesh m = parse_mesh(bytes, MeshFormat::StlBinary);
    CHECK(m.vertices.size() == 3);
    CHECK(m.triangles.size() == 1);
    CHECK(m.vertices[1] == Vec3{1, 0, 0});
}

TEST_CASE("binary STL: truncated body raises TruncatedFile") {
    auto bytes = one_triangle_stl();
    // Claim 10 triangles but keep one triangle's worth of bytes.
    bytes[80] = 10;
    CHECK_THROWS_AS(parse_mesh(bytes, MeshFormat::StlBinary), Error);
    try {
        parse_mesh(bytes, MeshFormat::StlBinary);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TruncatedFile);
    }
}

TEST_CASE("binary STL: header-only file is truncated") {
    std::vector<std::uint8_t> bytes(60, 0);
    try {
        parse_mesh(bytes, MeshFormat::StlBinary);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TruncatedFile);
    }
}

TEST_CASE("ASCII STL: closed tetrahedron round trips and validates watertight") {
    TriangleMesh tet = make_tetrahedron();
    auto bytes = write_mesh(tet, MeshFormat::StlAscii);
    std::string text(bytes.begin(), bytes.end());
    CHECK(std::count(text.begin(), text.end(), 'f') >= 4);  // facet blocks
    TriangleMesh back = parse_mesh(bytes, MeshFormat::StlAscii);
    CHECK(back.triangles.size() == 4);
    MeshDiagnostics d = validate(back);
    CHECK(d.watertight);
    CHECK(d.manifold);
    CHECK(d.boundary_edge_count == 0);
    for (std::size_t t = 0; t < back.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            const Vec3& got = back.vertices[back.triangles[t][k]];
            const Vec3& want = tet.vertices[tet.triangles[t][k]];
            CHECK(got.x == doctest::Approx(want.x));
            CHECK(got.y == doctest::Approx(want.y));
            CHECK(got.z == doctest::Approx(want.z));
        }
}

TEST_CASE("ASCII STL: malformed vertex line reports the offset") {
    std::string text = "solid x\n facet normal 0 0 1\n outer loop\n vertex 0 0 nope\n";
    std::vector<std::uint8_t> bytes(text.begin(), text.end());
    try {
        parse_mesh(bytes, MeshFormat::StlAscii);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedRecord);
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("binary STL round-trip is bit-exact, including awkward floats") {
    Rng rng(7);
    TriangleMesh m;
    for (int t = 0; t < 50; ++t) {
        for (int v = 0; v < 3; ++v)
            m.vertices.push_back({static_cast<float>(rng.uniform(-100, 100)),
                                  static_cast<float>(rng.uniform(-100, 100)),
                                  static_cast<float>(rng.uniform(-100, 100))});
        std::uint32_t b = 3 * t;
        m.triangles.push_back({b, b + 1, b + 2});
    }
    auto bytes = write_mesh(m, MeshFormat::StlBinary);
    TriangleMesh back = parse_mesh(bytes, MeshFormat::StlBinary);
    auto bytes2 = write_mesh(back, MeshFormat::StlBinary);
    CHECK(bytes == bytes2);
    REQUIRE(back.vertices.size() == m.vertices.size());
    for (std::size_t i = 0; i < m.vertices.size(); ++i) CHECK(back.vertices[i] == m.vertices[i]);
}

TEST_CASE("OBJ: v/f parse, unsupported constructs rejected") {
    std::string good = "# comment\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";
    TriangleMesh m = parse_mesh({good.begin(), good.end()}, MeshFormat::Obj);
    CHECK(m.triangles.size() == 1);

    std::string normals = "vn 0 0 1\n";
    try {
        parse_mesh({normals.begin(), normals.end()}, MeshFormat::Obj);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnsupportedFeature);
    }

    std::string quad = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n";
    CHECK_THROWS_AS(parse_mesh({quad.begin(), quad.end()}, MeshFormat::Obj), Error);

    std::string bad_index = "v 0 0 0\nf 1 2 3\n";
    try {
        parse_mesh({bad_index.begin(), bad_index.end()}, MeshFormat::Obj);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("validate: closed cube is watertight with one component") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    MeshDiagnostics d = validate(cube);
    CHECK(d.watertight);
    CHECK(d.manifold);
    CHECK(d.boundary_edge_count == 0);
    CHECK(d.connected_components == 1);
    CHECK(d.inverted_adjacent_pairs == 0);
    CHECK(d.degenerate_triangle_count == 0);
}

TEST_CASE("validate: cube missing one triangle exposes 3 boundary edges") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    cube.triangles.pop_back();
    MeshDiagnostics d = validate(cube);
    CHECK_FALSE(d.watertight);
    CHECK(d.boundary_edge_count == 3);
}

TEST_CASE("validate: one flipped triangle shows inverted adjacent pairs") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    std::swap(cube.triangles[5][1], cube.triangles[5][2]);
    MeshDiagnostics d = validate(cube);
    CHECK(d.inverted_adjacent_pairs >= 1);
    CHECK_FALSE(d.watertight);
}

TEST_CASE("validate: out-of-range index throws") {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}};
    m.triangles = {{0, 1, 7}};
    try {
        validate(m);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
}

TEST_CASE("metrics: analytic cube and orientation sign") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    MeshMetrics m = metrics(cube);
    CHECK(m.signed_volume == doctest::Approx(1000.0));
    CHECK(m.surface_area == doctest::Approx(600.0));
    CHECK(m.bbox.min == Vec3{0, 0, 0});
    CHECK(m.bbox.max == Vec3{10, 10, 10});

    TriangleMesh inside_out = cube;
    for (auto& t : inside_out.triangles) std::swap(t[1], t[2]);
    CHECK(metrics(inside_out).signed_volume == doctest::Approx(-1000.0));
}

TEST_CASE("metrics: icosphere volume approaches the analytic ball") {
    TriangleMesh sphere = make_icosphere(20.0, 4);
    CHECK(validate(sphere).watertight);
    double analytic = 4.0 / 3.0 * kPi * 20.0 * 20.0 * 20.0;  // 33510.32
    double got = metrics(sphere).signed_volume;
    CHECK(std::abs(got - analytic) / analytic < 0.01);
    CHECK(got < analytic);  // inscribed polyhedron under-counts
}

TEST_CASE("repair: welds coincident vertices without changing triangles") {
    TriangleMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1e-6, 0, 0}, {1, 1, 0}};
    m.triangles = {{0, 1, 2}, {3, 4, 2}};
    TriangleMesh r = repair_basic(m, 1e-4);
    CHECK(r.vertices.size() == 4);
    CHECK(r.triangles.size() == 2);
}

TEST_CASE("repair: clean cube unchanged up to reindexing") {
    TriangleMesh cube = make_box({0, 0, 0}, {10, 10, 10});
    TriangleMesh r = repair_basic(cube);
    CHECK(r.vertices.size() == 8);
    CHECK(r.triangles.size() == 12);
    CHECK(metrics(r).signed_volume == doctest::Approx(1000.0));
    CHECK(validate(r).watertight);
}

TEST_CASE("repair: fully flipped cube comes back outward-oriented") {
    TriangleMesh cube = make_box({0, 0, 0}, {1, 1, 1});
    for (auto& t : cube.triangles) std::swap(t[1], t[2]);
    REQUIRE(metrics(cube).signed_volume == doctest::Approx(-1.0));
    TriangleMesh r = repair_basic(cube);
    CHECK(metrics(r).signed_volume == doctest::Approx(1.0));
    CHECK(validate(r).watertight);
}

TEST_CASE("repair: single flipped triangle is re-unified") {
    TriangleMesh cube = make_box({0, 0, 0}, {1, 1, 1});
    std::swap(cube.triangles[3][1], cube.triangles[3][2]);
    TriangleMesh r = repair_basic(cube);
    CHECK(validate(r).watertight);
    CHECK(metrics(r).signed_volume == doctest::Approx(1.0));
}

TEST_CASE("repair: idempotent") {
    TriangleMesh m;
    // two coincident vertices + one degenerate sliver
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1e-7, 0, 0}, {2, 0, 0}};
    m.triangles = {{0, 1, 2}, {3, 1, 2}, {0, 1, 4}};
    TriangleMesh r1 = repair_basic(m);
    TriangleMesh r2 = repair_basic(r1);
    CHECK(r1.vertices.size() == r2.vertices.size());
    CHECK(r1.triangles.size() == r2.triangles.size());
    CHECK(metrics(r1).signed_volume == doctest::Approx(metrics(r2).signed_volume));
}

TEST_CASE("transform: identity, translation, rotation") {
    TriangleMesh cube = make_box({0, 0, 0}, {1, 1, 1});
    TriangleMesh same = transform_mesh(cube, RigidTransform::identity());
    for (std::size_t i = 0; i < cube.vertices.size(); ++i)
        CHECK(same.vertices[i] == cube.vertices[i]);

    RigidTransform shift{Mat3::identity(), {1, 2, 3}};
    MeshMetrics shifted = metrics(transform_mesh(cube, shift));
    CHECK(shifted.bbox.min.x == doctest::Approx(1.0));
    CHECK(shifted.bbox.min.y == doctest::Approx(2.0));
    CHECK(shifted.bbox.min.z == doctest::Approx(3.0));
    CHECK(shifted.signed_volume == doctest::Approx(1.0));

    RigidTransform rot{Mat3::rotation_z(deg_to_rad(90)), {0, 0, 0}};
    MeshMetrics r = metrics(transform_mesh(cube, rot));
    CHECK(r.signed_volume == doctest::Approx(1.0));
    CHECK(r.bbox.min.x == doctest::Approx(-1.0));
    CHECK(r.bbox.max.y == doctest::Approx(1.0));
}

TEST_CASE("transform: non-orthonormal rotation rejected") {
    RigidTransform bad;
    bad.rotation(0, 0) = 2.0;
    try {
        transform_mesh(make_tetrahedron(), bad);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidTransform);
    }
}

TEST_CASE("transform invariance: volume preserved, negated by flip") {
    Rng rng(11);
    TriangleMesh sphere = make_icosphere(7.0, 2, {1, 2, 3});
    double vol = metrics(sphere).signed_volume;
    for (int trial = 0; trial < 20; ++trial) {
        Vec3 axis{rng.gaussian(), rng.gaussian(), rng.gaussian()};
        RigidTransform t{Mat3::rotation_axis_angle(axis, rng.uniform(0, 6.28)),
                         {rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)}};
        double moved = metrics(transform_mesh(sphere, t)).signed_volume;
        CHECK(std::abs(moved - vol) <= 1e-9 * std::abs(vol));
    }
}

TEST_CASE("rigid transform: compose with inverse is identity") {
    RigidTransform t{Mat3::rotation_axis_angle({1, 2, -1}, 1.1), {4, -2, 9}};
    RigidTransform id = t.compose(t.inverse());
    CHECK(id.is_valid());
    CHECK(norm(id.translation) < 1e-9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(id.rotation(i, j) - (i == j ? 1 : 0)) < 1e-9);
}
