// Exact mesh clipping against a plane. Unlike the voxel Booleans used
// elsewhere, the split preserves volume to rounding error and leaves crisp
// mating faces — both matter at the assembly joint.
#pragma once

#include <utility>

#include "shellforge/mesh.hpp"
#include "shellforge/section.hpp"

namespace shellforge {

// Splits a watertight solid into (below, above) halves relative to the plane
// normal. Triangles are clipped exactly; the cross-section is capped with a
// constrained triangulation shared by both halves, so volumes sum to the
// original within rounding. Throws Error(PlaneMiss) when the plane misses the
// interior and Error(NotWatertight) for open input.
std::pair<TriangleMesh, TriangleMesh> split_by_plane(const TriangleMesh& solid,
                                                     const Plane& plane);

}  // namespace shellforge
