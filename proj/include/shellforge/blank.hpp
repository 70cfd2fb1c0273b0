// Printable stand-ins for the electronics: the expanded sculpting blank and
// the snap-in mounting bracket.
//
// Frames: when the circuit has a window, the blank is built in the window
// frame (origin at the window's outer face center, z outward). The bracket's
// local frame has its origin at the sensor point (board top, under the window
// center), base outward normal -z and the board's long axis along x. The two
// frames are related by bracket = window ∘ Tz(-standoff) ∘ Rx(tilt).
#pragma once

#include "shellforge/circuit.hpp"
#include "shellforge/mesh.hpp"
#include "shellforge/primitives.hpp"

namespace shellforge {

struct BracketDims {
    double channel_length = 0.0;  // interior, along x
    double channel_width = 0.0;   // interior, between wall faces
    double wall_thickness = 2.0;
    double wall_height = 0.0;     // above the board seat
    double lip_depth = 0.8;
    double base_thickness = 2.0;
};

BracketDims bracket_dims(const CircuitSpec& spec, double fit_clearance);

// Expanded board envelope + keepouts, unexpanded window cylinder, three
// hemispherical fiducial bumps on the window face, slack ribbons for cables.
TriangleMesh generate_blank(const BlankSpec& spec, double pitch = 0.2);

// U-channel tray with snap lips, sized to the board footprint plus clearance.
TriangleMesh generate_bracket(const CircuitSpec& spec, double fit_clearance = 0.15,
                              double pitch = 0.2);

// Board envelope solid in the bracket's local frame (used for seat checks).
Sdf board_envelope_sdf(const CircuitSpec& spec, double clearance = 0.0);
Aabb board_envelope_bounds(const CircuitSpec& spec);

// window -> bracket transform (tilt about the long axis, sensor standoff).
RigidTransform window_to_bracket(const CircuitSpec& spec);

}  // namespace shellforge
