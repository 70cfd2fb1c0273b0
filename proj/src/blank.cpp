#include "shellforge/blank.hpp"

#include <cmath>

#include "shellforge/error.hpp"
#include "shellforge/field.hpp"
#include "shellforge/primitives.hpp"

namespace shellforge {

namespace {

// Window offset mapped into (long axis, short axis) coordinates.
void window_offset_long_short(const CircuitSpec& spec, double& wx, double& wy) {
    double ox = spec.window ? spec.window->center_offset_x : 0.0;
    double oy = spec.window ? spec.window->center_offset_y : 0.0;
    if (spec.board_length >= spec.board_width) {
        wx = ox;
        wy = oy;
    } else {
        wx = oy;
        wy = ox;
    }
}

Vec3 board_point_to_local(const CircuitSpec& spec, const Vec3& p) {
    // Keepout/link coordinates are given relative to the board center with x
    // along board_size[0]; the local frame has x along the long side.
    if (spec.board_length >= spec.board_width) return p;
    return {p.y, p.x, p.z};
}

// Board center in the bracket-local frame (origin = sensor point on the
// board top).
Vec3 board_center_local(const CircuitSpec& spec) {
    double wx, wy;
    window_offset_long_short(spec, wx, wy);
    return {-wx, -wy, -spec.board_height * 0.5};
}

}  // namespace

RigidTransform window_to_bracket(const CircuitSpec& spec) {
    double standoff = spec.window ? spec.window->standoff : 0.0;
    RigidTransform drop{Mat3::identity(), {0, 0, -standoff}};
    RigidTransform tilt{Mat3::rotation_x(deg_to_rad(spec.tilt_deg)), {0, 0, 0}};
    return drop.compose(tilt);
}

Sdf board_envelope_sdf(const CircuitSpec& spec, double clearance) {
    Vec3 center = board_center_local(spec);
    Vec3 half{spec.long_side() * 0.5 + clearance, spec.short_side() * 0.5 + clearance,
              spec.board_height * 0.5 + clearance};
    return sdf_box(center, half);
}

Aabb board_envelope_bounds(const CircuitSpec& spec) {
    Vec3 center = board_center_local(spec);
    Vec3 half{spec.long_side() * 0.5, spec.short_side() * 0.5, spec.board_height * 0.5};
    return {center - half, center + half};
}

TriangleMesh generate_blank(const BlankSpec& spec, double pitch) {
    spec.validate();
    const CircuitSpec& c = spec.circuit;
    const double e = spec.expansion;

    // Solids are assembled in the bracket-local frame, then moved into the
    // window frame (identity when there is no window).
    RigidTransform to_window =
        c.window ? window_to_bracket(c) : RigidTransform{Mat3::identity(), {0, 0, 0}};
    RigidTransform inv = to_window.inverse();

    std::vector<Sdf> locals;  // bracket-local solids, already expanded
    Vec3 bc = board_center_local(c);
    Vec3 bhalf{c.long_side() * 0.5, c.short_side() * 0.5, c.board_height * 0.5};
    locals.push_back(sdf_offset(sdf_box(bc, bhalf), e));
    for (const auto& k : c.keepouts) {
        Vec3 kc = bc + board_point_to_local(c, k.center);
        Vec3 ks = board_point_to_local(c, k.size);
        locals.push_back(
            sdf_offset(sdf_box(kc, {std::abs(ks.x) * 0.5, std::abs(ks.y) * 0.5,
                                    std::abs(ks.z) * 0.5}),
                       e));
    }
    for (const auto& link : c.flexible_links) {
        // Ribbons carry the stated slack: straight when it fits, a V detour
        // otherwise. 1.5 mm printed section.
        Vec3 a = bc + board_point_to_local(c, link.from);
        Vec3 b = bc + board_point_to_local(c, link.to);
        double gap = norm(b - a);
        if (link.slack <= gap + 1e-9) {
            locals.push_back(sdf_capsule(a, b, 0.75));
        } else {
            double half = link.slack * 0.5;
            double lift = std::sqrt(std::max(0.0, half * half - 0.25 * gap * gap));
            Vec3 u, v;
            plane_basis(normalized(b - a), u, v);
            Vec3 mid = (a + b) * 0.5 + u * lift;
            locals.push_back(sdf_capsule(a, mid, 0.75));
            locals.push_back(sdf_capsule(mid, b, 0.75));
        }
    }

    Sdf blank = [locals = std::move(locals), inv](const Vec3& p) {
        Vec3 q = inv.apply(p);
        double d = 1e300;
        for (const auto& s : locals) d = std::min(d, s(q));
        return d;
    };

    Aabb box;
    {
        Aabb local = board_envelope_bounds(c);
        local.pad(e + 1.0);
        for (const auto& k : c.keepouts) {
            Vec3 kc = bc + board_point_to_local(c, k.center);
            Vec3 ks = board_point_to_local(c, k.size);
            Aabb kb{kc - ks * 0.5, kc + ks * 0.5};
            kb.pad(e + 1.0);
            local.expand(kb);
        }
        for (const auto& link : c.flexible_links) {
            Vec3 a = bc + board_point_to_local(c, link.from);
            Vec3 b = bc + board_point_to_local(c, link.to);
            local.expand(a);
            local.expand(b);
            double gap = norm(b - a);
            if (link.slack > gap + 1e-9) {
                double half = link.slack * 0.5;
                double lift = std::sqrt(std::max(0.0, half * half - 0.25 * gap * gap));
                Vec3 u, v;
                plane_basis(normalized(b - a), u, v);
                Vec3 apex = (a + b) * 0.5 + u * lift;
                local.expand(apex + Vec3{1, 1, 1});
                local.expand(apex - Vec3{1, 1, 1});
            }
        }
        // Transform the local bbox corners into the window frame.
        for (int corner = 0; corner < 8; ++corner) {
            Vec3 p{corner & 1 ? local.max.x : local.min.x, corner & 2 ? local.max.y : local.min.y,
                   corner & 4 ? local.max.z : local.min.z};
            box.expand(to_window.apply(p));
        }
    }

    if (c.window) {
        const WindowSpec& w = *c.window;
        double r = w.diameter * 0.5;
        // Unexpanded window cylinder, fused half a millimeter into the board
        // region, its top face exactly at the window plane z = 0.
        blank = sdf_union(std::move(blank), sdf_cylinder(RigidTransform::identity(), r,
                                                         -w.standoff - 0.5, 0.0));
        std::vector<Vec3> centers = spec.fiducial_centers();
        for (std::size_t i = 0; i < centers.size(); ++i) {
            double br = spec.fiducials[i].bump_radius;
            blank = sdf_union(std::move(blank), sdf_sphere(centers[i], br));
            box.expand(centers[i] + Vec3{br, br, br});
            box.expand(centers[i] - Vec3{br, br, br});
        }
        box.expand({r, r, 0});
        box.expand({-r, -r, -w.standoff});
    }

    ScalarField grid = make_grid(box, pitch, 3);
    ScalarField f = sample_sdf(blank, grid);
    TriangleMesh mesh = extract_surface(f);
    mesh.name = "blank";
    return mesh;
}

BracketDims bracket_dims(const CircuitSpec& spec, double fit_clearance) {
    BracketDims d;
    d.channel_length = spec.long_side() + 2.0 * fit_clearance;
    d.channel_width = spec.short_side() + 2.0 * fit_clearance;
    d.wall_height = spec.board_height + 1.0;
    return d;
}

TriangleMesh generate_bracket(const CircuitSpec& spec, double fit_clearance, double pitch) {
    spec.validate();
    if (fit_clearance < 0.0)
        throw Error(ErrorCode::SpecInvalid, "fit_clearance must be >= 0");
    BracketDims dims = bracket_dims(spec, fit_clearance);

    Vec3 bc = board_center_local(spec);
    const double h = spec.board_height;
    const double seat = bc.z - h * 0.5;  // z of the board's underside
    const double half_len = dims.channel_length * 0.5;
    const double half_chan = dims.channel_width * 0.5;
    const double wall = dims.wall_thickness;
    const double top = seat + h + 1.0;

    std::vector<Sdf> parts;
    // Base plate under the channel and walls.
    parts.push_back(sdf_box({bc.x, bc.y, seat - dims.base_thickness * 0.5},
                            {half_len, half_chan + wall, dims.base_thickness * 0.5}));
    // Side walls along the long axis.
    for (double s : {-1.0, 1.0}) {
        double wy = bc.y + s * (half_chan + wall * 0.5);
        parts.push_back(sdf_box({bc.x, wy, (seat + top) * 0.5},
                                {half_len, wall * 0.5, (top - seat) * 0.5}));
        // Inward snap lip at the wall top.
        double ly = bc.y + s * (half_chan - dims.lip_depth * 0.5);
        parts.push_back(sdf_box({bc.x, ly, top - 0.35}, {half_len, dims.lip_depth * 0.5, 0.35}));
    }

    Sdf bracket = [parts = std::move(parts)](const Vec3& p) {
        double d = 1e300;
        for (const auto& s : parts) d = std::min(d, s(p));
        return d;
    };

    Aabb box{{bc.x - half_len, bc.y - half_chan - wall, seat - dims.base_thickness},
             {bc.x + half_len, bc.y + half_chan + wall, top}};
    ScalarField grid = make_grid(box, pitch, 3);
    TriangleMesh mesh = extract_surface(sample_sdf(bracket, grid));
    mesh.name = "bracket";
    return mesh;
}

}  // namespace shellforge
