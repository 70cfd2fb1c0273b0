#include "shellforge/aabb_tree.hpp"

#include <algorithm>
#include <cmath>

#include "shellforge/primitives.hpp"

namespace shellforge {

namespace {

double box_distance2(const Aabb& box, const Vec3& p) {
    double d2 = 0.0;
    for (int a = 0; a < 3; ++a) {
        double v = p[a];
        if (v < box.min[a]) d2 += (box.min[a] - v) * (box.min[a] - v);
        if (v > box.max[a]) d2 += (v - box.max[a]) * (v - box.max[a]);
    }
    return d2;
}

// Slab test; returns entry/exit interval intersected with [t0, t1].
bool box_ray(const Aabb& box, const Vec3& o, const Vec3& inv_dir, double t0, double t1) {
    for (int a = 0; a < 3; ++a) {
        double ta = (box.min[a] - o[a]) * inv_dir[a];
        double tb = (box.max[a] - o[a]) * inv_dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

// Möller–Trumbore.
bool triangle_ray(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b, const Vec3& c,
                  double& t_out) {
    Vec3 e1 = b - a, e2 = c - a;
    Vec3 p = cross(d, e2);
    double det = dot(e1, p);
    if (std::abs(det) < 1e-14) return false;
    double inv = 1.0 / det;
    Vec3 s = o - a;
    double u = dot(s, p) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    Vec3 q = cross(s, e1);
    double v = dot(d, q) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    t_out = dot(e2, q) * inv;
    return true;
}

}  // namespace

AabbTree::AabbTree(const TriangleMesh& mesh) : mesh_(&mesh) {
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.triangles.size());
    if (n == 0) return;
    tri_order_.resize(n);
    std::vector<Vec3> centroids(n);
    for (std::uint32_t t = 0; t < n; ++t) {
        tri_order_[t] = t;
        const auto& tri = mesh.triangles[t];
        centroids[t] =
            (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    }
    nodes_.reserve(2 * n);
    build(tri_order_, 0, n, centroids);
}

std::int32_t AabbTree::build(std::vector<std::uint32_t>& tris, std::uint32_t begin,
                             std::uint32_t end, const std::vector<Vec3>& centroids) {
    Node node;
    for (std::uint32_t i = begin; i < end; ++i) {
        const auto& tri = mesh_->triangles[tris[i]];
        for (int k = 0; k < 3; ++k) node.box.expand(mesh_->vertices[tri[k]]);
    }
    std::int32_t self = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(node);
    if (end - begin <= 8) {
        nodes_[self].first = begin;
        nodes_[self].count = end - begin;
        return self;
    }
    Vec3 extent = node.box.size();
    int axis = extent.x >= extent.y && extent.x >= extent.z ? 0 : (extent.y >= extent.z ? 1 : 2);
    std::uint32_t mid = (begin + end) / 2;
    std::nth_element(tris.begin() + begin, tris.begin() + mid, tris.begin() + end,
                     [&](std::uint32_t a, std::uint32_t b) {
                         return centroids[a][axis] < centroids[b][axis];
                     });
    std::int32_t l = build(tris, begin, mid, centroids);
    std::int32_t r = build(tris, mid, end, centroids);
    nodes_[self].left = l;
    nodes_[self].right = r;
    return self;
}

double AabbTree::closest_point(const Vec3& p, Vec3* closest) const {
    if (nodes_.empty()) return std::numeric_limits<double>::infinity();
    double best2 = std::numeric_limits<double>::infinity();
    Vec3 best_point;
    // Explicit stack; visit nearer child first.
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        std::int32_t ni = stack[--top];
        const Node& node = nodes_[ni];
        if (box_distance2(node.box, p) >= best2) continue;
        if (node.left < 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const auto& tri = mesh_->triangles[tri_order_[i]];
                Vec3 q = closest_point_on_triangle(p, mesh_->vertices[tri[0]],
                                                   mesh_->vertices[tri[1]],
                                                   mesh_->vertices[tri[2]]);
                double d2 = norm2(p - q);
                if (d2 < best2) {
                    best2 = d2;
                    best_point = q;
                }
            }
            continue;
        }
        double dl = box_distance2(nodes_[node.left].box, p);
        double dr = box_distance2(nodes_[node.right].box, p);
        if (dl < dr) {
            if (top < 63) stack[top++] = node.right;
            if (top < 63) stack[top++] = node.left;
        } else {
            if (top < 63) stack[top++] = node.left;
            if (top < 63) stack[top++] = node.right;
        }
    }
    if (closest) *closest = best_point;
    return std::sqrt(best2);
}

bool AabbTree::raycast(const Vec3& origin, const Vec3& dir, RayHit& hit, double t_min) const {
    if (nodes_.empty()) return false;
    Vec3 inv{1.0 / (dir.x == 0 ? 1e-300 : dir.x), 1.0 / (dir.y == 0 ? 1e-300 : dir.y),
             1.0 / (dir.z == 0 ? 1e-300 : dir.z)};
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_tri = 0;
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!box_ray(node.box, origin, inv, t_min, best)) continue;
        if (node.left < 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const auto& tri = mesh_->triangles[tri_order_[i]];
                double t;
                if (triangle_ray(origin, dir, mesh_->vertices[tri[0]], mesh_->vertices[tri[1]],
                                 mesh_->vertices[tri[2]], t) &&
                    t >= t_min && t < best) {
                    best = t;
                    best_tri = tri_order_[i];
                }
            }
            continue;
        }
        if (top < 63) stack[top++] = node.left;
        if (top < 63) stack[top++] = node.right;
    }
    if (!std::isfinite(best)) return false;
    hit.t = best;
    hit.tri = best_tri;
    hit.point = origin + dir * best;
    return true;
}

std::vector<RayHit> AabbTree::raycast_all(const Vec3& origin, const Vec3& dir,
                                          double t_min) const {
    std::vector<RayHit> hits;
    if (nodes_.empty()) return hits;
    Vec3 inv{1.0 / (dir.x == 0 ? 1e-300 : dir.x), 1.0 / (dir.y == 0 ? 1e-300 : dir.y),
             1.0 / (dir.z == 0 ? 1e-300 : dir.z)};
    std::int32_t stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (!box_ray(node.box, origin, inv, t_min, std::numeric_limits<double>::infinity()))
            continue;
        if (node.left < 0) {
            for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
                const auto& tri = mesh_->triangles[tri_order_[i]];
                double t;
                if (triangle_ray(origin, dir, mesh_->vertices[tri[0]], mesh_->vertices[tri[1]],
                                 mesh_->vertices[tri[2]], t) &&
                    t >= t_min) {
                    hits.push_back({t, tri_order_[i], origin + dir * t});
                }
            }
            continue;
        }
        if (top < 63) stack[top++] = node.left;
        if (top < 63) stack[top++] = node.right;
    }
    std::sort(hits.begin(), hits.end(), [](const RayHit& a, const RayHit& b) { return a.t < b.t; });
    return hits;
}

}  // namespace shellforge
