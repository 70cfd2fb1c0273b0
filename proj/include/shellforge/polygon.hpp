// 2D polygon helpers for capping planar cross-sections: signed area,
// point-in-polygon, and ear-clipping triangulation of a region bounded by one
// outer loop and any number of hole loops.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace shellforge {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

double polygon_signed_area(const std::vector<Vec2>& loop);

// Even-odd rule; boundary points unspecified.
bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& loop);

// Triangulates the region inside `outer` minus the `holes`. The outer loop
// must be counter-clockwise and holes clockwise. Returned triangles index
// into the concatenated point list [outer..., holes[0]..., holes[1]...] and
// are counter-clockwise. Degenerate (collinear) stretches come back as
// zero-area triangles rather than failures.
std::vector<std::array<std::uint32_t, 3>> triangulate_with_holes(
    const std::vector<Vec2>& outer, const std::vector<std::vector<Vec2>>& holes);

}  // namespace shellforge
