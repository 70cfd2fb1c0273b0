#include "shellforge/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "shellforge/aabb_tree.hpp"
#include "shellforge/field.hpp"
#include "shellforge/mesh_io.hpp"
#include "shellforge/rng.hpp"
#include "shellforge/section.hpp"
#include "shellforge/split.hpp"

namespace shellforge {

using nlohmann::json;

void AssemblyPlan::validate() const {
    if (shell_thickness <= 0) throw Error(ErrorCode::SpecInvalid, "shell_thickness must be > 0");
    if (pitch <= 0) throw Error(ErrorCode::SpecInvalid, "pitch must be > 0");
    if (counterbore.depth > 0 && counterbore.diameter <= through_hole_diameter)
        throw Error(ErrorCode::SpecInvalid,
                    "counterbore.diameter must exceed through_hole_diameter (rim width "
                    "(d_cb - d_th)/2 must be positive)");
    if (std::abs(norm(split_plane.normal) - 1.0) > 1e-6)
        throw Error(ErrorCode::SpecInvalid, "split_plane.normal must be unit length");
    for (std::size_t i = 0; i < fasteners.size(); ++i) {
        const FastenerSpec& f = fasteners[i];
        if (f.width >= shell_thickness)
            throw Error(ErrorCode::SpecInvalid,
                        "fasteners[" + std::to_string(i) +
                            "].width must stay below shell_thickness (boss must live inside "
                            "the wall ring)");
        if (f.length < f.width || f.height <= 0 || f.clearance < 0)
            throw Error(ErrorCode::SpecInvalid,
                        "fasteners[" + std::to_string(i) + "] has an invalid profile");
    }
}

Vec3 volume_centroid(const TriangleMesh& solid) {
    double vol = 0.0;
    Vec3 moment{0, 0, 0};
    for (const auto& tri : solid.triangles) {
        const Vec3& a = solid.vertices[tri[0]];
        const Vec3& b = solid.vertices[tri[1]];
        const Vec3& c = solid.vertices[tri[2]];
        double v = dot(a, cross(b, c)) / 6.0;
        vol += v;
        moment += (a + b + c) * (v / 4.0);
    }
    if (std::abs(vol) < 1e-12) throw Error(ErrorCode::PlaneMiss, "solid has no volume");
    return moment / vol;
}

// --- planning ----------------------------------------------------------------

AssemblyPlan plan_default(const TriangleMesh& scan, const RigidTransform& window_pose,
                          const CircuitSpec& spec, double pitch) {
    (void)spec;
    AssemblyPlan plan;
    plan.pitch = pitch;
    plan.window_pose = window_pose;

    Vec3 n = normalized(window_pose.rotation.col(2));
    Vec3 centroid = volume_centroid(scan);
    plan.split_plane = Plane{n, dot(n, centroid)};

    CrossSection cs = cross_section(scan, plan.split_plane);
    if (cs.loops.empty())
        throw Error(ErrorCode::PlaneMiss, "centroid plane does not intersect the solid");

    std::size_t rim = 0;
    double rim_len = 0.0;
    for (std::size_t l = 0; l < cs.loops.size(); ++l) {
        double len = cs.loop_length(l);
        if (len > rim_len) {
            rim_len = len;
            rim = l;
        }
    }
    int count = std::max(3, static_cast<int>(std::floor(rim_len / 60.0)));

    std::vector<Vec2> rim2d = cs.loop_2d(rim);
    const auto& loop = cs.loops[rim];
    // Arc-length walk placing `count` bosses mid-wall, evenly spaced.
    std::vector<double> cum(loop.size() + 1, 0.0);
    for (std::size_t i = 0; i < loop.size(); ++i)
        cum[i + 1] = cum[i] + norm(cs.points[loop[(i + 1) % loop.size()]] - cs.points[loop[i]]);
    for (int k = 0; k < count; ++k) {
        double s = (k + 0.5) * rim_len / count;
        std::size_t seg = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin() - 1;
        seg = std::min(seg, loop.size() - 1);
        double t = (s - cum[seg]) / std::max(1e-12, cum[seg + 1] - cum[seg]);
        Vec2 p0 = rim2d[seg], p1 = rim2d[(seg + 1) % loop.size()];
        Vec2 at{p0.x + t * (p1.x - p0.x), p0.y + t * (p1.y - p0.y)};
        Vec2 tangent{p1.x - p0.x, p1.y - p0.y};
        double tl = std::hypot(tangent.x, tangent.y);
        if (tl < 1e-12) continue;
        tangent = {tangent.x / tl, tangent.y / tl};
        Vec2 inward{-tangent.y, tangent.x};
        Vec2 probe{at.x + 0.1 * inward.x, at.y + 0.1 * inward.y};
        if (!point_in_polygon(probe, rim2d)) inward = {-inward.x, -inward.y};

        FastenerSpec f;
        f.rim_position = {at.x + 0.5 * plan.shell_thickness * inward.x,
                          at.y + 0.5 * plan.shell_thickness * inward.y};
        f.angle_deg = rad_to_deg(std::atan2(tangent.y, tangent.x));
        plan.fasteners.push_back(f);
    }
    plan.validate();
    return plan;
}

// --- plan JSON ----------------------------------------------------------------

namespace {

json plane_to_json(const Plane& p) {
    return {{"normal", {p.normal.x, p.normal.y, p.normal.z}}, {"offset", p.offset}};
}
Plane plane_from_json(const json& j) {
    Plane p;
    p.normal = normalized(
        {j.at("normal")[0].get<double>(), j.at("normal")[1].get<double>(),
         j.at("normal")[2].get<double>()});
    p.offset = j.at("offset").get<double>();
    return p;
}
json transform_to_json(const RigidTransform& t) {
    json rows = json::array();
    for (int i = 0; i < 3; ++i) rows.push_back({t.rotation(i, 0), t.rotation(i, 1), t.rotation(i, 2)});
    return {{"rotation", rows}, {"translation", {t.translation.x, t.translation.y, t.translation.z}}};
}
RigidTransform transform_from_json(const json& j) {
    RigidTransform t;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) t.rotation(i, k) = j.at("rotation")[i][k].get<double>();
    t.translation = {j.at("translation")[0].get<double>(), j.at("translation")[1].get<double>(),
                     j.at("translation")[2].get<double>()};
    if (!t.is_valid(1e-6)) throw Error(ErrorCode::InvalidTransform, "window_pose rotation");
    return t;
}

}  // namespace

std::string plan_to_json_text(const AssemblyPlan& plan) {
    json j;
    j["shell_thickness"] = plan.shell_thickness;
    j["pitch"] = plan.pitch;
    j["split_plane"] = plane_to_json(plan.split_plane);
    j["window_pose"] = transform_to_json(plan.window_pose);
    j["through_hole_diameter"] = plan.through_hole_diameter;
    j["counterbore"] = {{"diameter", plan.counterbore.diameter}, {"depth", plan.counterbore.depth}};
    j["fasteners"] = json::array();
    for (const auto& f : plan.fasteners)
        j["fasteners"].push_back({{"position", {f.rim_position.x, f.rim_position.y}},
                                  {"angle_deg", f.angle_deg},
                                  {"length", f.length},
                                  {"width", f.width},
                                  {"height", f.height},
                                  {"clearance", f.clearance}});
    return j.dump(2);
}

AssemblyPlan plan_apply_overrides(const AssemblyPlan& base, const std::string& json_text) {
    if (json_text.empty()) return base;
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::SpecInvalid, "plan overrides: unparseable JSON");
    AssemblyPlan plan = base;
    if (j.contains("shell_thickness")) plan.shell_thickness = j["shell_thickness"].get<double>();
    if (j.contains("pitch")) plan.pitch = j["pitch"].get<double>();
    if (j.contains("split_plane")) plan.split_plane = plane_from_json(j["split_plane"]);
    if (j.contains("window_pose")) plan.window_pose = transform_from_json(j["window_pose"]);
    if (j.contains("through_hole_diameter"))
        plan.through_hole_diameter = j["through_hole_diameter"].get<double>();
    if (j.contains("counterbore")) {
        plan.counterbore.diameter =
            j["counterbore"].value("diameter", plan.counterbore.diameter);
        plan.counterbore.depth = j["counterbore"].value("depth", plan.counterbore.depth);
    }
    if (j.contains("fasteners")) {
        plan.fasteners.clear();
        for (const json& fj : j["fasteners"]) {
            FastenerSpec f;
            f.rim_position = {fj.at("position")[0].get<double>(),
                              fj.at("position")[1].get<double>()};
            f.angle_deg = fj.value("angle_deg", 0.0);
            f.length = fj.value("length", 6.0);
            f.width = fj.value("width", 2.0);
            f.height = fj.value("height", 3.0);
            f.clearance = fj.value("clearance", 0.15);
            plan.fasteners.push_back(f);
        }
    }
    plan.validate();
    return plan;
}

// --- shell --------------------------------------------------------------------

TriangleMesh shell(const TriangleMesh& scan, double thickness, double pitch,
                   std::vector<Warning>* warnings) {
    if (thickness < 2.0 * pitch)
        throw Error(ErrorCode::UsageError, "shell thickness must be at least 2 * pitch");
    ScalarField f = voxelize(scan, {.pitch = pitch});
    ScalarField eroded = offset_field(f, thickness);

    bool any_interior = false;
    for (float v : eroded.values)
        if (v < 0.f) {
            any_interior = true;
            break;
        }
    if (!any_interior && warnings) {
        float deepest = 0.f;
        std::size_t at = 0;
        for (std::size_t i = 0; i < f.values.size(); ++i)
            if (f.values[i] < deepest) {
                deepest = f.values[i];
                at = i;
            }
        int k = static_cast<int>(at / (static_cast<std::size_t>(f.nx) * f.ny));
        int j = static_cast<int>((at / f.nx) % f.ny);
        int i = static_cast<int>(at % f.nx);
        Vec3 p = f.position(i, j, k);
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "solid thinner than 2x thickness everywhere (max depth %.2f mm near "
                      "%.1f %.1f %.1f); shell fills it solid",
                      -deepest, p.x, p.y, p.z);
        warnings->push_back({"ThinFeature", buf});
    } else if (warnings) {
        // Block-level scan for local collapses: surface blocks with no eroded
        // interior anywhere nearby.
        const int B = 16;
        int bx = (f.nx + B - 1) / B, by = (f.ny + B - 1) / B, bz = (f.nz + B - 1) / B;
        std::vector<char> has_solid(static_cast<std::size_t>(bx) * by * bz, 0);
        std::vector<char> has_core(has_solid.size(), 0);
        for (int k = 0; k < f.nz; ++k)
            for (int j = 0; j < f.ny; ++j)
                for (int i = 0; i < f.nx; ++i) {
                    std::size_t b =
                        (static_cast<std::size_t>(k / B) * by + j / B) * bx + i / B;
                    std::size_t n = f.index(i, j, k);
                    if (f.values[n] < 0.f) has_solid[b] = 1;
                    if (eroded.values[n] < 0.f) has_core[b] = 1;
                }
        int ring = 1 + static_cast<int>(std::ceil(2.0 * thickness / (B * pitch)));
        int reported = 0;
        for (int bk = 0; bk < bz && reported < 4; ++bk)
            for (int bj = 0; bj < by && reported < 4; ++bj)
                for (int bi = 0; bi < bx && reported < 4; ++bi) {
                    std::size_t b = (static_cast<std::size_t>(bk) * by + bj) * bx + bi;
                    if (!has_solid[b]) continue;
                    bool core_near = false;
                    for (int dk = -ring; dk <= ring && !core_near; ++dk)
                        for (int dj = -ring; dj <= ring && !core_near; ++dj)
                            for (int di = -ring; di <= ring && !core_near; ++di) {
                                int qi = bi + di, qj = bj + dj, qk = bk + dk;
                                if (qi < 0 || qi >= bx || qj < 0 || qj >= by || qk < 0 ||
                                    qk >= bz)
                                    continue;
                                if (has_core[(static_cast<std::size_t>(qk) * by + qj) * bx +
                                             qi])
                                    core_near = true;
                            }
                    if (!core_near) {
                        Vec3 p = f.position(bi * B + B / 2, bj * B + B / 2, bk * B + B / 2);
                        char buf[160];
                        std::snprintf(buf, sizeof buf,
                                      "region near %.1f %.1f %.1f thinner than 2x thickness; "
                                      "walls merge there",
                                      p.x, p.y, p.z);
                        warnings->push_back({"ThinFeature", buf});
                        ++reported;
                    }
                }
    }

    ScalarField shell_field = csg_apply(f, eroded, CsgOp::Subtract);
    TriangleMesh out = extract_surface(shell_field);
    out.name = scan.name.empty() ? "shell" : scan.name + "_shell";
    return out;
}

// --- window -------------------------------------------------------------------

TriangleMesh cut_window(const TriangleMesh& piece, const AssemblyPlan& plan) {
    plan.validate();
    const RigidTransform& w = plan.window_pose;
    Vec3 axis = normalized(w.rotation.col(2));
    Vec3 center = w.translation;
    double far = piece.bounds().diagonal() + 10.0;

    AabbTree tree(piece);
    {
        RayHit probe;
        bool hit_in = tree.raycast(center + axis * far, -axis, probe);
        if (!hit_in) throw Error(ErrorCode::WindowOffPiece, "window axis misses the piece");
    }

    // Lowest outer-surface height on the counterbore circle fixes the seat so
    // the disc never stands proud of the surrounding surface.
    double seat = 0.0;
    if (plan.counterbore.depth > 0.0) {
        Vec3 u, v;
        plane_basis(axis, u, v);
        double r = plan.counterbore.diameter * 0.5;
        double min_h = 1e300;
        int hits = 0;
        const int samples = 72;
        for (int i = 0; i < samples; ++i) {
            double a = 2.0 * kPi * i / samples;
            Vec3 rim = center + (u * std::cos(a) + v * std::sin(a)) * r;
            RayHit hit;
            if (tree.raycast(rim + axis * far, -axis, hit)) {
                min_h = std::min(min_h, far - hit.t);
                ++hits;
            }
        }
        if (hits < (3 * samples) / 4)
            throw Error(ErrorCode::WindowOffPiece,
                        "counterbore circle leaves the piece surface (" + std::to_string(hits) +
                            "/" + std::to_string(samples) + " probes hit)");
        seat = min_h - plan.counterbore.depth;
    }

    ScalarField f = voxelize(piece, {.pitch = plan.pitch});
    RigidTransform window_frame{w.rotation, w.translation};
    csg_apply_sdf(f,
                  sdf_cylinder(window_frame, plan.through_hole_diameter * 0.5, -far, far),
                  CsgOp::Subtract);
    if (plan.counterbore.depth > 0.0)
        csg_apply_sdf(f,
                      sdf_cylinder(window_frame, plan.counterbore.diameter * 0.5, seat, far),
                      CsgOp::Subtract);
    TriangleMesh out = extract_surface(f);
    out.name = piece.name;
    return out;
}

// --- bracket ------------------------------------------------------------------

namespace {

Sdf sdf_oriented_box(const RigidTransform& pose, const Vec3& center_local, const Vec3& half) {
    RigidTransform inv = pose.inverse();
    return [inv, center_local, half](const Vec3& p) {
        Vec3 q = inv.apply(p) - center_local;
        Vec3 d{std::abs(q.x) - half.x, std::abs(q.y) - half.y, std::abs(q.z) - half.z};
        Vec3 dp{std::max(d.x, 0.0), std::max(d.y, 0.0), std::max(d.z, 0.0)};
        return norm(dp) + std::min(std::max(d.x, std::max(d.y, d.z)), 0.0);
    };
}

}  // namespace

TriangleMesh place_bracket(const TriangleMesh& piece, const TriangleMesh& bracket,
                           const RigidTransform& pose, double pitch) {
    Aabb bb = bracket.bounds();
    // Base perimeter sample points on the bracket's bottom rectangle.
    std::vector<Vec3> perimeter;
    for (int i = 0; i <= 3; ++i) {
        double tx = i / 3.0;
        double x = bb.min.x + tx * (bb.max.x - bb.min.x);
        perimeter.push_back({x, bb.min.y, bb.min.z});
        perimeter.push_back({x, bb.max.y, bb.min.z});
        double y = bb.min.y + tx * (bb.max.y - bb.min.y);
        perimeter.push_back({bb.min.x, y, bb.min.z});
        perimeter.push_back({bb.max.x, y, bb.min.z});
    }

    Vec3 dir = pose.rotation * Vec3{0, 0, -1};  // base outward normal, world
    AabbTree tree(piece);
    double extent = 0.0;
    for (const Vec3& p : perimeter) {
        RayHit hit;
        if (!tree.raycast(pose.apply(p), dir, hit, 1e-6) || hit.t > 100.0)
            throw Error(ErrorCode::BracketOutsideCavity,
                        "bracket base ray finds no inner surface within 100 mm");
        extent = std::max(extent, hit.t);
    }

    // Stem: the base footprint extruded down to the farthest hit (plus a
    // little overlap each way so the union fuses).
    Vec3 stem_center{(bb.min.x + bb.max.x) * 0.5, (bb.min.y + bb.max.y) * 0.5,
                     bb.min.z - extent * 0.5 + 0.5};
    Vec3 stem_half{(bb.max.x - bb.min.x) * 0.5, (bb.max.y - bb.min.y) * 0.5,
                   extent * 0.5 + 0.65};
    Sdf stem = sdf_oriented_box(pose, stem_center, stem_half);

    TriangleMesh posed = transform_mesh(bracket, pose);
    Aabb box = piece.bounds();
    box.expand(posed.bounds());
    ScalarField grid = make_grid(box, pitch, 3);
    VoxelizeOptions opts;
    opts.pitch = pitch;
    ScalarField f = voxelize_on_grid(piece, grid, opts);
    ScalarField fb = voxelize_on_grid(posed, grid, opts);
    ScalarField merged = csg_apply(f, fb, CsgOp::Union);
    csg_apply_sdf(merged, stem, CsgOp::Union);
    TriangleMesh out = extract_surface(merged);
    out.name = piece.name;
    return out;
}

// --- fasteners ------------------------------------------------------------------

namespace {

// Sampled wall thickness: inward rays from surface points, away from the cut
// plane. A report estimate, not a guarantee.
double sampled_min_wall(const TriangleMesh& mesh, const Plane& cut, double exclusion) {
    AabbTree tree(mesh);
    Rng rng(20200517);
    double total_area = 0.0;
    std::vector<double> cumulative;
    cumulative.reserve(mesh.triangles.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total_area += mesh.triangle_area(t);
        cumulative.push_back(total_area);
    }
    double min_wall = 1e300;
    const int samples = 300;
    for (int s = 0; s < samples; ++s) {
        double pick = rng.uniform() * total_area;
        std::size_t t = std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
                        cumulative.begin();
        t = std::min(t, mesh.triangles.size() - 1);
        const auto& tri = mesh.triangles[t];
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        Vec3 p = mesh.vertices[tri[0]] * (1 - u - v) + mesh.vertices[tri[1]] * u +
                 mesh.vertices[tri[2]] * v;
        if (std::abs(cut.signed_distance(p)) < exclusion) continue;
        Vec3 n = normalized(mesh.triangle_normal(t));
        RayHit hit;
        if (tree.raycast(p - n * 1e-4, -n, hit, 1e-6) && hit.t < 1e300)
            min_wall = std::min(min_wall, hit.t + 1e-4);
    }
    return min_wall;
}

}  // namespace

PartSet add_fasteners(const TriangleMesh& part_a, const TriangleMesh& part_b,
                      const AssemblyPlan& plan) {
    plan.validate();
    const Plane& plane = plan.split_plane;
    Vec3 u, v;
    plane_basis(plane.normal, u, v);

    double side_a = plane.signed_distance(volume_centroid(part_a)) >= 0 ? 1.0 : -1.0;
    Vec3 boss_dir = plane.normal * (-side_a);  // away from part_a, into part_b

    // The wall ring: part_a's section a bit inside its cut face.
    Plane ring_plane{plane.normal, plane.offset + side_a * 0.3};
    CrossSection ring = cross_section(part_a, ring_plane);
    if (ring.loops.empty())
        throw Error(ErrorCode::BossOffWall, "no wall ring at the split plane");
    std::vector<std::vector<Vec2>> ring2d;
    for (std::size_t l = 0; l < ring.loops.size(); ++l) ring2d.push_back(ring.loop_2d(l));

    auto in_ring = [&](const Vec2& p) {
        int crossings = 0;
        for (const auto& loop : ring2d)
            if (point_in_polygon(p, loop)) ++crossings;
        return crossings % 2 == 1;
    };

    AabbTree tree_a(part_a);
    struct BossGeom {
        RigidTransform frame;  // x = long axis, z = boss_dir
        double down;           // extrusion into part_a
        const FastenerSpec* spec;
    };
    std::vector<BossGeom> bosses;
    for (const FastenerSpec& f : plan.fasteners) {
        Vec3 base_u = u * std::cos(deg_to_rad(f.angle_deg)) + v * std::sin(deg_to_rad(f.angle_deg));
        Vec3 z = boss_dir;
        Vec3 y = cross(z, base_u);
        RigidTransform frame{Mat3::from_columns(base_u, y, z),
                             plane.normal * plane.offset + u * f.rim_position.x +
                                 v * f.rim_position.y};

        // Profile must sit fully inside the wall ring.
        Vec2 c = f.rim_position;
        double ca = std::cos(deg_to_rad(f.angle_deg)), sa = std::sin(deg_to_rad(f.angle_deg));
        double hl = f.length * 0.5, hw = f.width * 0.5;
        const Vec2 corners[8] = {{hl, hw}, {hl, -hw}, {-hl, hw}, {-hl, -hw},
                                 {hl, 0},  {-hl, 0},  {0, hw},   {0, -hw}};
        for (const Vec2& q : corners) {
            Vec2 world{c.x + ca * q.x - sa * q.y, c.y + sa * q.x + ca * q.y};
            if (!in_ring(world))
                throw Error(ErrorCode::BossOffWall,
                            "fastener profile leaves the shell wall ring at (" +
                                std::to_string(world.x) + ", " + std::to_string(world.y) + ")");
        }

        // Root depth: ray from just above the cut face into part_a, out
        // through the far wall surface.
        Vec3 origin = frame.translation + boss_dir * 0.05;
        auto hits = tree_a.raycast_all(origin, -boss_dir, 1e-6);
        double down = 2.0 * plan.shell_thickness;
        if (hits.size() >= 2) down = hits[1].t + 0.25;
        bosses.push_back({frame, down, &f});
    }

    // part_a: union the bosses in the field domain.
    Aabb box_a = part_a.bounds();
    for (const BossGeom& b : bosses) {
        Vec3 top = b.frame.translation + boss_dir * b.spec->height;
        box_a.expand(top + Vec3{4, 4, 4});
        box_a.expand(top - Vec3{4, 4, 4});
    }
    VoxelizeOptions opts;
    opts.pitch = plan.pitch;
    ScalarField fa = voxelize_on_grid(part_a, make_grid(box_a, plan.pitch, 3), opts);
    for (const BossGeom& b : bosses)
        csg_apply_sdf(fa,
                      sdf_obround_prism(b.frame, b.spec->length, b.spec->width, -b.down,
                                        b.spec->height),
                      CsgOp::Union);

    // part_b: subtract the clearance cavities (with bottom relief).
    ScalarField fb = voxelize(part_b, opts);
    for (const BossGeom& b : bosses)
        csg_apply_sdf(fb,
                      sdf_obround_prism(b.frame, b.spec->length + 2 * b.spec->clearance,
                                        b.spec->width + 2 * b.spec->clearance, -0.5,
                                        b.spec->height + 0.3),
                      CsgOp::Subtract);

    PartSet set;
    set.part_a = extract_surface(fa);
    set.part_a.name = part_a.name.empty() ? "part_a" : part_a.name;
    set.part_b = extract_surface(fb);
    set.part_b.name = part_b.name.empty() ? "part_b" : part_b.name;

    MeshDiagnostics da = validate(set.part_a), db = validate(set.part_b);
    set.report.watertight_a = da.watertight;
    set.report.watertight_b = db.watertight;
    set.report.volume_a = metrics(set.part_a).signed_volume;
    set.report.volume_b = metrics(set.part_b).signed_volume;

    // Mated interference on a shared lattice.
    {
        Aabb joint = set.part_a.bounds();
        joint.expand(set.part_b.bounds());
        ScalarField grid = make_grid(joint, plan.pitch, 3);
        VoxelizeOptions fast = opts;
        fast.skip_watertight_check = true;
        ScalarField ia = voxelize_on_grid(set.part_a, grid, fast);
        ScalarField ib = voxelize_on_grid(set.part_b, grid, fast);
        set.report.interference_volume = csg_apply(ia, ib, CsgOp::Intersect).solid_volume();
    }
    set.report.min_wall_a = sampled_min_wall(set.part_a, plane, 1.0);
    set.report.min_wall_b = sampled_min_wall(set.part_b, plane, 1.0);
    return set;
}

// --- pipeline -------------------------------------------------------------------

namespace {

template <typename F>
auto stage(const char* name, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), std::string("[stage ") + name + "] " + e.what());
    }
}

}  // namespace

PipelineResult run_pipeline(const PipelineInputs& inputs) {
    PipelineResult result;
    json report;
    report["config"] = {{"scan", inputs.scan_path},
                        {"name", inputs.name},
                        {"out_dir", inputs.out_dir},
                        {"pitch", inputs.pitch},
                        {"blank_spec", json::parse(blank_to_json_text(inputs.blank))},
                        {"plan_overrides",
                         inputs.plan_overrides_json.empty()
                             ? json(nullptr)
                             : json::parse(inputs.plan_overrides_json)}};

    TriangleMesh scan = stage("load", [&] {
        TriangleMesh m = load_mesh(inputs.scan_path);
        return repair_basic(m);
    });

    MeshDiagnostics diag = stage("validate", [&] {
        MeshDiagnostics d = validate(scan);
        if (!d.watertight)
            throw Error(ErrorCode::NotWatertight,
                        "scan still has " + std::to_string(d.boundary_edge_count) +
                            " boundary edges after repair");
        return d;
    });
    report["stages"]["validate"] = {{"watertight", diag.watertight},
                                    {"manifold", diag.manifold},
                                    {"components", diag.connected_components},
                                    {"triangles", scan.triangles.size()}};

    FiducialObservation obs = stage("fiducials", [&] {
        if (inputs.manual_fiducials) return *inputs.manual_fiducials;
        if (!inputs.detect_hint)
            throw Error(ErrorCode::UsageError,
                        "either manual fiducials or a detection hint is required");
        DetectOptions d;
        d.bump_radius = inputs.blank.fiducials.empty() ? 1.0
                                                       : inputs.blank.fiducials[0].bump_radius;
        return detect_fiducials(scan, *inputs.detect_hint, inputs.detect_hint_radius, d);
    });

    PoseFit pose = stage("register", [&] {
        return pose_from_fiducials(obs, inputs.blank.fiducial_centers());
    });
    result.window_pose = pose.transform;
    result.registration_residual = pose.residual_rms;
    result.bracket_pose = bracket_pose(pose.transform, inputs.blank.circuit);
    report["stages"]["register"] = {
        {"residual_rms", pose.residual_rms},
        {"source", obs.source == FiducialObservation::Source::Manual ? "manual" : "detected"},
        {"window_pose", transform_to_json(pose.transform)}};

    AssemblyPlan plan = stage("plan", [&] {
        AssemblyPlan p = plan_default(scan, result.window_pose, inputs.blank.circuit,
                                      inputs.pitch);
        return plan_apply_overrides(p, inputs.plan_overrides_json);
    });
    result.plan = plan;
    report["stages"]["plan"] = json::parse(plan_to_json_text(plan));

    std::vector<Warning> shell_warnings;
    TriangleMesh shelled = stage("shell", [&] {
        return shell(scan, plan.shell_thickness, plan.pitch, &shell_warnings);
    });
    report["stages"]["shell"] = {{"volume", metrics(shelled).signed_volume},
                                 {"warnings", json::array()}};
    for (const Warning& w : shell_warnings)
        report["stages"]["shell"]["warnings"].push_back({{"code", w.code}, {"message", w.message}});

    auto halves = stage("split", [&] { return split_by_plane(shelled, plan.split_plane); });

    // part_a carries the bracket: the piece whose inner surface the bracket's
    // base extrusion actually lands on (the base faces away from the window,
    // so this is usually the half opposite the window).
    bool bracket_on_below = stage("split", [&] {
        Vec3 dir = result.bracket_pose.rotation * Vec3{0, 0, -1};
        Vec3 origin = result.bracket_pose.apply({0, 0, -inputs.blank.circuit.board_height - 2.0});
        RayHit hit_below, hit_above;
        bool hb = AabbTree(halves.first).raycast(origin, dir, hit_below);
        bool ha = AabbTree(halves.second).raycast(origin, dir, hit_above);
        if (!hb && !ha)
            throw Error(ErrorCode::BracketOutsideCavity,
                        "bracket base ray hits neither half of the shell");
        if (hb && ha) return hit_below.t < hit_above.t;
        return hb;
    });
    TriangleMesh part_a = bracket_on_below ? std::move(halves.first) : std::move(halves.second);
    TriangleMesh part_b = bracket_on_below ? std::move(halves.second) : std::move(halves.first);
    part_a.name = inputs.name + "_a";
    part_b.name = inputs.name + "_b";
    report["stages"]["split"] = {{"volume_a", metrics(part_a).signed_volume},
                                 {"volume_b", metrics(part_b).signed_volume}};

    // Window cut applies to whichever piece the axis exits through.
    double window_side = plan.split_plane.signed_distance(
        plan.window_pose.translation + plan.window_pose.rotation.col(2) * 1.0);
    bool window_on_a = (window_side < 0) == bracket_on_below;
    stage("window", [&] {
        if (window_on_a)
            part_a = cut_window(part_a, plan);
        else
            part_b = cut_window(part_b, plan);
        return 0;
    });
    report["stages"]["window"] = {{"piece", window_on_a ? "a" : "b"},
                                  {"through_hole_diameter", plan.through_hole_diameter},
                                  {"counterbore_diameter", plan.counterbore.diameter}};

    TriangleMesh bracket = stage("bracket", [&] {
        TriangleMesh b = generate_bracket(inputs.blank.circuit, 0.15, plan.pitch);
        part_a = place_bracket(part_a, b, result.bracket_pose, plan.pitch);
        return b;
    });
    report["stages"]["bracket"] = {{"pose", transform_to_json(result.bracket_pose)},
                                   {"volume", metrics(bracket).signed_volume}};

    result.parts = stage("fasten", [&] { return add_fasteners(part_a, part_b, plan); });
    report["stages"]["fasten"] = {
        {"count", plan.fasteners.size()},
        {"volume_a", result.parts.report.volume_a},
        {"volume_b", result.parts.report.volume_b},
        {"watertight_a", result.parts.report.watertight_a},
        {"watertight_b", result.parts.report.watertight_b},
        {"interference_volume", result.parts.report.interference_volume},
        {"min_wall_a", result.parts.report.min_wall_a},
        {"min_wall_b", result.parts.report.min_wall_b}};

    stage("export", [&] {
        std::filesystem::create_directories(inputs.out_dir);
        std::string a = inputs.out_dir + "/" + inputs.name + "_a.stl";
        std::string b = inputs.out_dir + "/" + inputs.name + "_b.stl";
        save_mesh(result.parts.part_a, a);
        save_mesh(result.parts.part_b, b);
        result.output_files = {a, b};
        return 0;
    });

    report["outputs"] = result.output_files;
    result.report_json = report.dump(2);

    std::string report_path = inputs.out_dir + "/" + inputs.name + "_report.json";
    std::vector<std::uint8_t> bytes(result.report_json.begin(), result.report_json.end());
    bytes.push_back('\n');
    write_file_bytes(report_path, bytes);
    result.output_files.push_back(report_path);
    return result;
}

}  // namespace shellforge
