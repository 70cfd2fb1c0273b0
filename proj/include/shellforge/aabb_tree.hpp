// Median-split AABB tree over mesh triangles: closest-point and ray queries
// for bracket extrusion, window probing and surface-fidelity sampling.
#pragma once

#include <cstdint>
#include <vector>

#include "shellforge/mesh.hpp"

namespace shellforge {

struct RayHit {
    double t = 0.0;        // distance along the (unit) ray direction
    std::uint32_t tri = 0;
    Vec3 point;
};

class AabbTree {
  public:
    AabbTree() = default;
    explicit AabbTree(const TriangleMesh& mesh);

    bool empty() const { return nodes_.empty(); }

    // Unsigned distance and the closest surface point.
    double closest_point(const Vec3& p, Vec3* closest = nullptr) const;

    // First hit with t >= t_min along the ray, or false.
    bool raycast(const Vec3& origin, const Vec3& dir, RayHit& hit, double t_min = 1e-9) const;

    // All hits with t >= t_min, sorted by t.
    std::vector<RayHit> raycast_all(const Vec3& origin, const Vec3& dir,
                                    double t_min = 1e-9) const;

  private:
    struct Node {
        Aabb box;
        std::int32_t left = -1;    // child index, or -1 for leaf
        std::int32_t right = -1;
        std::uint32_t first = 0;   // leaf: range into tri_order_
        std::uint32_t count = 0;
    };

    const TriangleMesh* mesh_ = nullptr;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> tri_order_;

    std::int32_t build(std::vector<std::uint32_t>& tris, std::uint32_t begin, std::uint32_t end,
                       const std::vector<Vec3>& centroids);
};

}  // namespace shellforge
