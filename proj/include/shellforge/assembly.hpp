// Scan-to-parts conversion: shelling, splitting, window counterbore, bracket
// fusion and friction-fit fasteners. Split is exact mesh clipping; the other
// Boolean stages run in the signed-distance domain.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shellforge/blank.hpp"
#include "shellforge/circuit.hpp"
#include "shellforge/error.hpp"
#include "shellforge/geom.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/polygon.hpp"
#include "shellforge/registration.hpp"

namespace shellforge {

struct CounterboreSpec {
    double diameter = 20.0;  // window disc diameter
    double depth = 2.0;      // disc thickness; 0 means no recess
};

struct FastenerSpec {
    Vec2 rim_position;       // split-plane coordinates (plane basis)
    double angle_deg = 0.0;  // obround long axis within the plane
    double length = 6.0;     // obround profile
    double width = 2.0;
    double height = 3.0;     // boss rise above the cut plane
    double clearance = 0.15; // cavity inflation per side
};

struct AssemblyPlan {
    double shell_thickness = 3.0;
    Plane split_plane;
    RigidTransform window_pose;
    double through_hole_diameter = 16.0;
    CounterboreSpec counterbore;
    std::vector<FastenerSpec> fasteners;
    double pitch = 0.2;  // voxel pitch for the field-domain stages

    // Rim width (counterbore - bore)/2 must be positive, fastener bosses must
    // fit inside the shell wall. Throws Error(SpecInvalid).
    void validate() const;
};

std::string plan_to_json_text(const AssemblyPlan& plan);
// Fields present in the document override `base`; everything else persists.
AssemblyPlan plan_apply_overrides(const AssemblyPlan& base, const std::string& json_text);

struct PartReport {
    double volume_a = 0.0;
    double volume_b = 0.0;
    bool watertight_a = false;
    bool watertight_b = false;
    double interference_volume = 0.0;  // mated parts, voxel measure
    double min_wall_a = 0.0;           // sampled estimate away from the cut
    double min_wall_b = 0.0;
    std::vector<Warning> warnings;
};

struct PartSet {
    TriangleMesh part_a;  // bracket-and-boss piece
    TriangleMesh part_b;  // fastener-cavity piece
    PartReport report;
};

// Split plane parallel to the window through the volume centroid; fastener
// count max(3, floor(rim/60mm)) spaced along the longest rim loop, centered
// in the wall ring. Throws Error(PlaneMiss) for degenerate solids.
AssemblyPlan plan_default(const TriangleMesh& scan, const RigidTransform& window_pose,
                          const CircuitSpec& spec, double pitch = 0.2);

// Hollow solid: scan minus erode(scan, thickness), field domain. Thin regions
// that collapse are reported as warnings; the shell is still returned.
TriangleMesh shell(const TriangleMesh& scan, double thickness, double pitch = 0.2,
                   std::vector<Warning>* warnings = nullptr);

// Through-bore plus counterbore recess along the window axis. The recess
// floor sits `depth` below the lowest surface point on the counterbore
// circle, so the disc never sits proud. Throws Error(WindowOffPiece).
TriangleMesh cut_window(const TriangleMesh& piece, const AssemblyPlan& plan);

// Transforms the bracket by `pose`, extrudes its base to the inner shell
// surface (max perimeter ray hit), unions with the piece. Throws
// Error(BracketOutsideCavity) when the base rays find no surface within
// 100 mm.
TriangleMesh place_bracket(const TriangleMesh& piece, const TriangleMesh& bracket,
                           const RigidTransform& pose, double pitch = 0.2);

// Bosses on part_a (rising from the cut plane, rooted into its wall),
// clearance cavities in part_b, with reports. Throws Error(BossOffWall) when
// a profile leaves the wall ring.
PartSet add_fasteners(const TriangleMesh& part_a, const TriangleMesh& part_b,
                      const AssemblyPlan& plan);

struct PipelineInputs {
    std::string scan_path;
    BlankSpec blank;
    std::optional<FiducialObservation> manual_fiducials;
    std::optional<Vec3> detect_hint;
    double detect_hint_radius = 15.0;
    std::string plan_overrides_json;  // empty = none
    std::string out_dir = ".";
    std::string name = "part";
    double pitch = 0.2;
};

struct PipelineResult {
    PartSet parts;
    RigidTransform window_pose;
    RigidTransform bracket_pose;
    AssemblyPlan plan;
    double registration_residual = 0.0;
    std::string report_json;
    std::vector<std::string> output_files;
};

// repair -> validate -> register -> plan -> shell -> split -> window ->
// bracket -> fasteners -> export. Errors carry the failing stage's name.
PipelineResult run_pipeline(const PipelineInputs& inputs);

// Volume centroid via the divergence theorem (exposed for planning tests).
Vec3 volume_centroid(const TriangleMesh& solid);

}  // namespace shellforge
