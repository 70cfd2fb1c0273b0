// Recovering the embedded circuit's pose inside a scan from the three
// fiducial bumps on the interaction window.
#pragma once

#include <vector>

#include "shellforge/circuit.hpp"
#include "shellforge/geom.hpp"
#include "shellforge/mesh.hpp"

namespace shellforge {

struct FiducialObservation {
    std::array<Vec3, 3> points;  // bump centers on the scan surface
    enum class Source { Manual, Detected } source = Source::Manual;
};

struct PlaneFit {
    Vec3 normal;    // unit
    double offset;  // n.x = offset
};

// Exact plane for 3 points, least squares (smallest covariance direction)
// beyond that. `orient_hint`, when nonzero, picks the normal sign (detection
// passes the mean outward vertex normal). Throws Error(DegenerateInput) for
// collinear input.
PlaneFit fit_plane(const std::vector<Vec3>& points, const Vec3& orient_hint = {0, 0, 0});

struct PoseFit {
    RigidTransform transform;  // maps layout (window frame) -> scan world
    double residual_rms = 0.0;
    std::array<int, 3> correspondence{};  // observed index for each layout bump
};

// Correspondence by matching the three pairwise distances (the scalene layout
// makes it unique), then the closed-form optimal 3-point rigid solve
// (quaternion method). Throws AmbiguousCorrespondence when the layout's sides
// are within 0.2 mm of each other and HighResidual above 0.5 mm RMS.
PoseFit pose_from_fiducials(const FiducialObservation& obs, const std::vector<Vec3>& layout);

struct DetectOptions {
    double bump_radius = 1.0;
    double min_protrusion_factor = 0.5;  // accept bumps >= factor * bump_radius
};

// Finds the three bump centers near `hint_center` as local protrusion maxima
// over a locally fitted plane, non-maximum-suppressed, apex corrected back to
// the sphere center, sorted by angle. Throws Error(DetectionFailed) when
// fewer than three candidates survive; manual picks stay the fallback.
FiducialObservation detect_fiducials(const TriangleMesh& scan, const Vec3& hint_center,
                                     double hint_radius, const DetectOptions& options = {});

// Bracket pose from the recovered window pose: tilt about the bracket's long
// axis and the sensor standoff below the window plane.
RigidTransform bracket_pose(const RigidTransform& window_pose, const CircuitSpec& spec);

// Reads a 3-line "x y z" text file of manually picked points.
FiducialObservation load_fiducials(const std::string& path);

}  // namespace shellforge
