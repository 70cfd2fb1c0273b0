#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shellforge/aabb_tree.hpp"
#include "shellforge/blank.hpp"
#include "shellforge/error.hpp"
#include "shellforge/field.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/primitives.hpp"

using namespace shellforge;

namespace {

CircuitSpec paper_board() {
    CircuitSpec c;
    c.board_length = 38;
    c.board_width = 51;
    c.board_height = 4;
    c.tilt_deg = 0;
    return c;
}

CircuitSpec small_board_with_window() {
    CircuitSpec c;
    c.board_length = 16;
    c.board_width = 16;
    c.board_height = 3;
    c.tilt_deg = 0;
    c.window = WindowSpec{14.0, 0.0, 0.0, 3.0};
    return c;
}

}  // namespace

TEST_CASE("spec validation catches bad fields by name") {
    CircuitSpec c = paper_board();
    c.board_height = 0;
    try {
        c.validate();
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SpecInvalid);
        CHECK(std::string(e.what()).find("board_size[2]") != std::string::npos);
    }

    c = paper_board();
    c.tilt_deg = 31;
    CHECK_THROWS_AS(c.validate(), Error);

    BlankSpec b;
    b.circuit = small_board_with_window();
    b.fiducials = {{0, 8, 1}, {120, 8, 1}, {240, 8, 1}};  // symmetric: ambiguous
    CHECK_THROWS_AS(b.validate(), Error);

    b.fiducials = BlankSpec::default_fiducials(b.circuit);
    b.validate();
}

TEST_CASE("JSON round trip of circuit and blank specs") {
    std::string text = R"({
      "board_size": [38, 51, 4],
      "tilt_deg": 10,
      "window": {"shape": "circle", "diameter": 14, "center_offset": [0, 0], "standoff": 3},
      "keepouts": [{"center": [0, -15, 3], "size": [10, 12, 6]}],
      "flexible_links": [{"from": [0, 20, 0], "to": [0, -20, 0], "slack": 50}]
    })";
    CircuitSpec c = circuit_from_json_text(text);
    CHECK(c.board_width == 51);
    CHECK(c.window.has_value());
    CHECK(c.keepouts.size() == 1);
    CircuitSpec back = circuit_from_json_text(circuit_to_json_text(c));
    CHECK(back.board_length == c.board_length);
    CHECK(back.flexible_links[0].slack == doctest::Approx(50.0));

    BlankSpec blank = blank_from_json_text(text);  // bare circuit document
    CHECK(blank.expansion == doctest::Approx(3.0));
    CHECK(blank.fiducials.size() == 3);
    BlankSpec blank2 = blank_from_json_text(blank_to_json_text(blank));
    CHECK(blank2.fiducials[1].angle_deg == doctest::Approx(100.0));
}

TEST_CASE("blank: paper board expanded by 3 has the expected bbox") {
    BlankSpec spec;
    spec.circuit = paper_board();  // no window
    spec.expansion = 3.0;
    TriangleMesh blank = generate_blank(spec, 0.3);
    CHECK(validate(blank).watertight);
    Aabb box = blank.bounds();
    // Long side (51) runs along x: 57 x 44 x 10 overall.
    CHECK(std::abs(box.size().x - 57.0) < 0.6);
    CHECK(std::abs(box.size().y - 44.0) < 0.6);
    CHECK(std::abs(box.size().z - 10.0) < 0.6);
}

TEST_CASE("blank: zero expansion of a bare cube board keeps its volume") {
    BlankSpec spec;
    spec.circuit = CircuitSpec{10, 10, 10, 0.0, std::nullopt, {}, {}};
    spec.expansion = 0.0;
    TriangleMesh blank = generate_blank(spec, 0.2);
    CHECK(std::abs(metrics(blank).signed_volume - 1000.0) / 1000.0 < 0.03);
}

TEST_CASE("blank: fiducial bumps add three hemisphere volumes") {
    BlankSpec with_bumps;
    with_bumps.circuit = small_board_with_window();
    with_bumps.expansion = 3.0;
    with_bumps.fiducials = BlankSpec::default_fiducials(with_bumps.circuit);

    BlankSpec tiny_bumps = with_bumps;
    for (auto& f : tiny_bumps.fiducials) f.bump_radius = 0.01;  // effectively none

    double pitch = 0.12;
    double v1 = metrics(generate_blank(with_bumps, pitch)).signed_volume;
    double v0 = metrics(generate_blank(tiny_bumps, pitch)).signed_volume;
    double expect = 3.0 * (2.0 / 3.0) * kPi * 1.0;  // 3 hemispheres of r = 1
    CHECK(std::abs((v1 - v0) - expect) / expect < 0.10);
}

TEST_CASE("blank: expanded envelope sits exactly `expansion` from the board") {
    BlankSpec spec;
    spec.circuit = CircuitSpec{20, 14, 4, 0.0, std::nullopt, {}, {}};
    spec.expansion = 3.0;
    double pitch = 0.2;
    TriangleMesh blank = generate_blank(spec, pitch);
    // True offset surface: every surface point is at distance `expansion`
    // from the board box, corners included.
    Sdf board = sdf_box({0, 0, -2.0}, {10, 7, 2});
    for (std::size_t i = 0; i < blank.vertices.size(); i += 7) {
        double d = board(blank.vertices[i]);
        CHECK(d >= 3.0 - pitch);
        CHECK(d <= 3.0 + pitch);
    }
}

TEST_CASE("blank: window face flush at the window plane, bumps proud") {
    BlankSpec spec;
    spec.circuit = small_board_with_window();
    spec.expansion = 3.0;
    spec.fiducials = BlankSpec::default_fiducials(spec.circuit);
    double pitch = 0.15;
    TriangleMesh blank = generate_blank(spec, pitch);
    CHECK(validate(blank).watertight);

    std::vector<Vec3> bump_centers = spec.fiducial_centers();
    double zmax_window = -1e300, zmax_all = -1e300;
    for (const Vec3& v : blank.vertices) {
        zmax_all = std::max(zmax_all, v.z);
        if (std::hypot(v.x, v.y) < 0.5 * spec.circuit.window->diameter) {
            bool near_bump = false;
            for (const Vec3& c : bump_centers)
                if (std::hypot(v.x - c.x, v.y - c.y) < 2.0) near_bump = true;
            if (!near_bump) zmax_window = std::max(zmax_window, v.z);
        }
    }
    CHECK(std::abs(zmax_window - 0.0) <= pitch);   // flush with the window plane
    CHECK(std::abs(zmax_all - 1.0) <= pitch);      // bump apex radius above it
}

TEST_CASE("blank: scalene default fiducial triangle") {
    BlankSpec spec;
    spec.circuit = small_board_with_window();
    spec.fiducials = BlankSpec::default_fiducials(spec.circuit);
    auto c = spec.fiducial_centers();
    double s0 = norm(c[1] - c[0]), s1 = norm(c[2] - c[1]), s2 = norm(c[0] - c[2]);
    CHECK(std::abs(s0 - s1) > 0.2);
    CHECK(std::abs(s1 - s2) > 0.2);
    CHECK(std::abs(s0 - s2) > 0.2);
}

TEST_CASE("blank: slack ribbon connects link endpoints") {
    BlankSpec spec;
    spec.circuit = CircuitSpec{20, 14, 4, 0.0, std::nullopt, {}, {}};
    spec.circuit.flexible_links.push_back({{0, 7, 0}, {0, 30, 0}, 40.0});
    spec.expansion = 2.0;
    TriangleMesh blank = generate_blank(spec, 0.3);
    CHECK(validate(blank).watertight);
    Aabb box = blank.bounds();
    CHECK(box.max.y > 28.0);  // ribbon reaches the far endpoint
    // The V detour consumes the slack somewhere off the straight line.
    CHECK(std::max(std::abs(box.max.x), std::abs(box.min.x)) > 12.0);
}

TEST_CASE("bracket: channel width is footprint + 2 clearance") {
    CircuitSpec c = paper_board();
    BracketDims dims = bracket_dims(c, 0.15);
    CHECK(dims.channel_width == doctest::Approx(38.3));
    CHECK(dims.channel_length == doctest::Approx(51.3));
    CHECK(bracket_dims(c, 0.0).channel_width == doctest::Approx(38.0));

    double pitch = 0.2;
    TriangleMesh bracket = generate_bracket(c, 0.15, pitch);
    CHECK(validate(bracket).watertight);

    // Measure the interior width on the mesh itself: cast rays sideways from
    // the channel center at the board's mid-height.
    AabbTree tree(bracket);
    Vec3 mid{0, 0, -2.0};
    RayHit hit_pos, hit_neg;
    REQUIRE(tree.raycast(mid, {0, 1, 0}, hit_pos));
    REQUIRE(tree.raycast(mid, {0, -1, 0}, hit_neg));
    CHECK(std::abs((hit_pos.t + hit_neg.t) - 38.3) <= 2 * pitch);
}

TEST_CASE("bracket: board envelope does not interfere at clearance offset") {
    CircuitSpec c = paper_board();
    double pitch = 0.2;
    TriangleMesh bracket = generate_bracket(c, 0.15, pitch);
    ScalarField f = voxelize(bracket, {.pitch = pitch});
    csg_apply_sdf(f, board_envelope_sdf(c), CsgOp::Intersect);
    CHECK(f.solid_volume() <= 2.0);  // voxel-noise bound
}
