// Parametric circuit description and the derived printable blank. All
// lengths in mm, angles in degrees. JSON schemas are documented in the README.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shellforge/geom.hpp"

namespace shellforge {

struct WindowSpec {
    double diameter = 14.0;        // circular interaction window
    double center_offset_x = 0.0;  // window center on the board, board frame
    double center_offset_y = 0.0;
    double standoff = 3.0;         // window surface height above the board top
};

struct KeepoutBox {
    Vec3 center;  // relative to the board center, z up from board mid-plane
    Vec3 size;
};

struct FlexibleLink {
    Vec3 from;     // board frame
    Vec3 to;
    double slack = 0.0;  // printed ribbon length; >= straight distance
};

struct CircuitSpec {
    double board_length = 38.0;  // board_size[0]
    double board_width = 51.0;   // board_size[1]
    double board_height = 4.0;
    double tilt_deg = 10.0;      // board tilt relative to the window plane
    std::optional<WindowSpec> window;
    std::vector<KeepoutBox> keepouts;
    std::vector<FlexibleLink> flexible_links;

    double long_side() const { return std::max(board_length, board_width); }
    double short_side() const { return std::min(board_length, board_width); }

    // Throws Error(SpecInvalid) naming the offending field.
    void validate() const;
};

struct FiducialBump {
    double angle_deg = 0.0;   // on the window rim circle
    double radius_mm = 8.0;   // from the window center
    double bump_radius = 1.0;
};

struct BlankSpec {
    CircuitSpec circuit;
    double expansion = 3.0;  // wall-thickness allowance around the electronics
    std::vector<FiducialBump> fiducials;

    // Bump centers in the window frame (origin at the window's outer face
    // center, z outward).
    std::vector<Vec3> fiducial_centers() const;

    // Throws Error(SpecInvalid); enforces the asymmetric (scalene) bump
    // layout that makes the scan correspondence unambiguous.
    void validate() const;

    // The paper-shaped default: three bumps at 0/100/220 degrees, one
    // millimeter outside the window radius.
    static std::vector<FiducialBump> default_fiducials(const CircuitSpec& circuit);
};

CircuitSpec circuit_from_json_text(const std::string& text);
BlankSpec blank_from_json_text(const std::string& text);

// Loads either a BlankSpec document or a bare CircuitSpec document (the
// latter gets default expansion and fiducials).
BlankSpec load_blank_spec(const std::string& path);
CircuitSpec load_circuit_spec(const std::string& path);

std::string circuit_to_json_text(const CircuitSpec& spec);
std::string blank_to_json_text(const BlankSpec& spec);

}  // namespace shellforge
