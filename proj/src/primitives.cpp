#include "shellforge/primitives.hpp"

#include <cmath>
#include <map>

namespace shellforge {

TriangleMesh make_box(const Vec3& lo, const Vec3& hi) {
    TriangleMesh m;
    m.vertices = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                  {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
    m.triangles = {{0, 2, 1}, {0, 3, 2},   // z = lo (normal -z)
                   {4, 5, 6}, {4, 6, 7},   // z = hi (+z)
                   {0, 1, 5}, {0, 5, 4},   // y = lo (-y)
                   {3, 7, 6}, {3, 6, 2},   // y = hi (+y)
                   {0, 4, 7}, {0, 7, 3},   // x = lo (-x)
                   {1, 2, 6}, {1, 6, 5}};  // x = hi (+x)
    return m;
}

TriangleMesh make_icosphere(double radius, int subdivisions, const Vec3& center) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                               {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                               {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : verts) v = normalized(v);
    std::vector<std::array<std::uint32_t, 3>> tris = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
        auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            std::uint32_t idx = static_cast<std::uint32_t>(verts.size());
            verts.push_back(normalized((verts[a] + verts[b]) * 0.5));
            midpoints.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(tris.size() * 4);
        for (const auto& t : tris) {
            std::uint32_t ab = midpoint(t[0], t[1]);
            std::uint32_t bc = midpoint(t[1], t[2]);
            std::uint32_t ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        tris = std::move(next);
    }
    TriangleMesh m;
    m.vertices.reserve(verts.size());
    for (const auto& v : verts) m.vertices.push_back(center + v * radius);
    m.triangles = std::move(tris);
    return m;
}

TriangleMesh make_cylinder(double radius, double z0, double z1, int segments,
                           const Vec3& axis_origin) {
    TriangleMesh m;
    const std::uint32_t n = static_cast<std::uint32_t>(segments);
    for (int ring = 0; ring < 2; ++ring) {
        double z = ring == 0 ? z0 : z1;
        for (std::uint32_t i = 0; i < n; ++i) {
            double a = 2.0 * kPi * i / n;
            m.vertices.push_back(axis_origin +
                                 Vec3{radius * std::cos(a), radius * std::sin(a), z});
        }
    }
    std::uint32_t c0 = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(axis_origin + Vec3{0, 0, z0});
    std::uint32_t c1 = static_cast<std::uint32_t>(m.vertices.size());
    m.vertices.push_back(axis_origin + Vec3{0, 0, z1});
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t j = (i + 1) % n;
        m.triangles.push_back({i, j, n + j});
        m.triangles.push_back({i, n + j, n + i});
        m.triangles.push_back({c0, j, i});          // bottom cap, normal -z
        m.triangles.push_back({c1, n + i, n + j});  // top cap, +z
    }
    return m;
}

TriangleMesh make_tetrahedron() {
    TriangleMesh m;
    m.vertices = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}, {0, 3, 1}, {1, 3, 2}};
    return m;
}

// --- SDFs -----------------------------------------------------------------

namespace {
inline double sdf_box_local(const Vec3& q, const Vec3& h) {
    Vec3 d{std::abs(q.x) - h.x, std::abs(q.y) - h.y, std::abs(q.z) - h.z};
    Vec3 dpos{std::max(d.x, 0.0), std::max(d.y, 0.0), std::max(d.z, 0.0)};
    return norm(dpos) + std::min(std::max(d.x, std::max(d.y, d.z)), 0.0);
}
}  // namespace

Sdf sdf_box(const Vec3& center, const Vec3& half_extent) {
    return [center, half_extent](const Vec3& p) { return sdf_box_local(p - center, half_extent); };
}

Sdf sdf_sphere(const Vec3& center, double radius) {
    return [center, radius](const Vec3& p) { return norm(p - center) - radius; };
}

Sdf sdf_cylinder(const RigidTransform& pose, double radius, double z0, double z1) {
    RigidTransform inv = pose.inverse();
    double zc = 0.5 * (z0 + z1), zh = 0.5 * (z1 - z0);
    return [inv, radius, zc, zh](const Vec3& p) {
        Vec3 q = inv.apply(p);
        double dr = std::hypot(q.x, q.y) - radius;
        double dz = std::abs(q.z - zc) - zh;
        double outside = std::hypot(std::max(dr, 0.0), std::max(dz, 0.0));
        return outside + std::min(std::max(dr, dz), 0.0);
    };
}

Sdf sdf_obround_prism(const RigidTransform& pose, double length, double width, double z0,
                      double z1) {
    RigidTransform inv = pose.inverse();
    double seg_half = std::max(0.0, (length - width) * 0.5);
    double r = width * 0.5;
    double zc = 0.5 * (z0 + z1), zh = 0.5 * (z1 - z0);
    return [inv, seg_half, r, zc, zh](const Vec3& p) {
        Vec3 q = inv.apply(p);
        double sx = std::clamp(q.x, -seg_half, seg_half);
        double d2d = std::hypot(q.x - sx, q.y) - r;
        double dz = std::abs(q.z - zc) - zh;
        double outside = std::hypot(std::max(d2d, 0.0), std::max(dz, 0.0));
        return outside + std::min(std::max(d2d, dz), 0.0);
    };
}

Sdf sdf_capsule(const Vec3& a, const Vec3& b, double radius) {
    Vec3 ab = b - a;
    double len2 = norm2(ab);
    return [a, ab, len2, radius](const Vec3& p) {
        double t = len2 > 0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
        return norm(p - (a + ab * t)) - radius;
    };
}

Sdf sdf_ellipsoid(const Vec3& center, const Vec3& semi_axes) {
    return [center, semi_axes](const Vec3& p) {
        Vec3 q = p - center;
        Vec3 s{q.x / semi_axes.x, q.y / semi_axes.y, q.z / semi_axes.z};
        double k0 = norm(s);
        Vec3 s2{s.x / semi_axes.x, s.y / semi_axes.y, s.z / semi_axes.z};
        double k1 = norm(s2);
        return k1 > 0 ? k0 * (k0 - 1.0) / k1 : -std::min({semi_axes.x, semi_axes.y, semi_axes.z});
    };
}

// Ericson, Real-Time Collision Detection, 5.1.5.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));

    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));

    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

}  // namespace shellforge
