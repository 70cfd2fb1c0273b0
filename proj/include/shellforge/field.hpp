// Signed-distance voxel grids: the substrate for shelling and Boolean work.
// Offsetting on a distance field cannot self-intersect the way surface-normal
// offsets do; the cost is a pitch-bounded geometric error.
#pragma once

#include <cstdint>
#include <vector>

#include "shellforge/mesh.hpp"
#include "shellforge/primitives.hpp"

namespace shellforge {

enum class CsgOp { Union, Intersect, Subtract };

struct ScalarField {
    Vec3 origin;         // position of sample (0,0,0), mm
    double pitch = 0.2;  // mm per voxel, uniform
    int nx = 0, ny = 0, nz = 0;
    std::vector<float> values;  // x-fastest, signed distance in mm, negative inside

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;
    }
    Vec3 position(int i, int j, int k) const {
        return {origin.x + i * pitch, origin.y + j * pitch, origin.z + k * pitch};
    }
    float at(int i, int j, int k) const { return values[index(i, j, k)]; }
    float& at(int i, int j, int k) { return values[index(i, j, k)]; }
    std::size_t voxel_count() const {
        return static_cast<std::size_t>(nx) * ny * nz;
    }
    Aabb domain() const {
        return {origin, {origin.x + (nx - 1) * pitch, origin.y + (ny - 1) * pitch,
                         origin.z + (nz - 1) * pitch}};
    }

    // Trilinear sample; outside the domain returns the clamped value plus the
    // distance to the domain so far-away queries stay positive.
    double sample(const Vec3& p) const;

    // Volume of the negative region, by marching the zero level set.
    double solid_volume() const;
};

struct VoxelizeOptions {
    double pitch = 0.2;
    int padding = 3;                        // voxels of clearance around the bbox
    std::size_t voxel_cap = std::size_t(1) << 28;
    int exact_band = 5;                     // voxels given exact point-triangle distance
    bool skip_watertight_check = false;     // callers that already validated
};

// Signed distance field of a watertight mesh. Exact distance within
// `exact_band` voxels of the surface, closest-point propagation beyond; sign
// by per-axis scanline parity with majority vote, generalized-winding-number
// arbitration where the axes disagree.
// Throws Error(NotWatertight) / Error(GridTooLarge).
ScalarField voxelize(const TriangleMesh& mesh, const VoxelizeOptions& options = {});

// Same field, but sampled on a caller-fixed grid (so several solids can be
// combined without resampling).
ScalarField voxelize_on_grid(const TriangleMesh& mesh, const ScalarField& grid_template,
                             const VoxelizeOptions& options = {});

// Grid covering `box` (plus padding) at `pitch`; values unset (all +inf).
ScalarField make_grid(const Aabb& box, double pitch, int padding,
                      std::size_t voxel_cap = std::size_t(1) << 28);

// Samples an analytic SDF on the template's lattice.
ScalarField sample_sdf(const Sdf& sdf, const ScalarField& grid_template);

// Combine two fields on a's lattice (b is resampled trilinearly when its
// lattice differs). Throws Error(PitchMismatch) when pitches differ.
ScalarField csg_apply(const ScalarField& a, const ScalarField& b, CsgOp op);

// In-place variant against an analytic SDF (no resampling error).
void csg_apply_sdf(ScalarField& a, const Sdf& b, CsgOp op);

// output(x) = f(x) + delta: delta > 0 erodes the solid, delta < 0 grows it.
// Growth is limited by the grid padding (Error(DeltaExceedsPadding)).
ScalarField offset_field(const ScalarField& f, double delta);

// Marching tetrahedra over the uniform 6-tet cube decomposition: watertight,
// outward-oriented, empty mesh for an all-positive field.
TriangleMesh extract_surface(const ScalarField& f);

// Raw debug dump: little-endian float32 array plus a sidecar text header.
void dump_field(const ScalarField& f, const std::string& path_prefix);

}  // namespace shellforge
