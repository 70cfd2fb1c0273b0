#include "shellforge/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "shellforge/error.hpp"

namespace shellforge {

using nlohmann::json;

void CircuitSpec::validate() const {
    auto positive = [](double v, const char* field) {
        if (!(v > 0.0)) throw Error(ErrorCode::SpecInvalid, std::string(field) + " must be > 0");
    };
    positive(board_length, "board_size[0]");
    positive(board_width, "board_size[1]");
    positive(board_height, "board_size[2]");
    if (tilt_deg < 0.0 || tilt_deg > 30.0)
        throw Error(ErrorCode::SpecInvalid, "tilt_deg must be in [0, 30]");
    if (window) {
        if (window->diameter < 1.0)
            throw Error(ErrorCode::SpecInvalid, "window.diameter must be >= 1 mm");
        positive(window->standoff, "window.standoff");
    }
    for (std::size_t i = 0; i < keepouts.size(); ++i)
        for (int a = 0; a < 3; ++a)
            if (!(keepouts[i].size[a] > 0.0))
                throw Error(ErrorCode::SpecInvalid,
                            "keepouts[" + std::to_string(i) + "].size must be > 0");
    for (std::size_t i = 0; i < flexible_links.size(); ++i) {
        const auto& link = flexible_links[i];
        if (link.slack + 1e-9 < norm(link.to - link.from))
            throw Error(ErrorCode::SpecInvalid, "flexible_links[" + std::to_string(i) +
                                                    "].slack shorter than the endpoint gap");
    }
}

std::vector<FiducialBump> BlankSpec::default_fiducials(const CircuitSpec& circuit) {
    double window_radius = circuit.window ? circuit.window->diameter * 0.5 : 7.0;
    double r = window_radius + 1.0;
    return {{0.0, r, 1.0}, {100.0, r, 1.0}, {220.0, r, 1.0}};
}

std::vector<Vec3> BlankSpec::fiducial_centers() const {
    std::vector<Vec3> centers;
    centers.reserve(fiducials.size());
    for (const auto& f : fiducials) {
        double a = deg_to_rad(f.angle_deg);
        centers.push_back({f.radius_mm * std::cos(a), f.radius_mm * std::sin(a), 0.0});
    }
    return centers;
}

void BlankSpec::validate() const {
    circuit.validate();
    if (expansion < 0.0) throw Error(ErrorCode::SpecInvalid, "expansion must be >= 0");
    if (circuit.window) {
        if (fiducials.size() != 3)
            throw Error(ErrorCode::SpecInvalid, "fiducials: exactly 3 bumps required");
        for (std::size_t i = 0; i < 3; ++i) {
            if (!(fiducials[i].bump_radius > 0.0))
                throw Error(ErrorCode::SpecInvalid,
                            "fiducials[" + std::to_string(i) + "].bump_radius must be > 0");
            if (!(fiducials[i].radius_mm > 0.0))
                throw Error(ErrorCode::SpecInvalid,
                            "fiducials[" + std::to_string(i) + "].radius_mm must be > 0");
        }
        // Pairwise distinct angles and no two equal inter-angle gaps.
        std::vector<double> angles;
        for (const auto& f : fiducials)
            angles.push_back(std::fmod(std::fmod(f.angle_deg, 360.0) + 360.0, 360.0));
        std::sort(angles.begin(), angles.end());
        double gaps[3] = {angles[1] - angles[0], angles[2] - angles[1],
                          360.0 - (angles[2] - angles[0])};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                if (std::abs(gaps[i] - gaps[j]) < 1.0)
                    throw Error(ErrorCode::SpecInvalid,
                                "fiducials: inter-angle gaps must differ (symmetric layouts make "
                                "the correspondence ambiguous)");
            }
        // Scalene triangle of bump centers, the property registration needs.
        std::vector<Vec3> c = fiducial_centers();
        double side[3] = {norm(c[1] - c[0]), norm(c[2] - c[1]), norm(c[0] - c[2])};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                if (std::abs(side[i] - side[j]) < 0.2)
                    throw Error(ErrorCode::SpecInvalid,
                                "fiducials: bump triangle sides within 0.2 mm of each other");
    }
}

namespace {

Vec3 vec3_from(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 3)
        throw Error(ErrorCode::SpecInvalid, std::string(field) + " must be [x, y, z]");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

CircuitSpec circuit_from_json(const json& j) {
    CircuitSpec spec;
    if (!j.contains("board_size"))
        throw Error(ErrorCode::SpecInvalid, "board_size is required");
    const json& bs = j.at("board_size");
    if (!bs.is_array() || bs.size() != 3)
        throw Error(ErrorCode::SpecInvalid, "board_size must be [length, width, height]");
    spec.board_length = bs[0].get<double>();
    spec.board_width = bs[1].get<double>();
    spec.board_height = bs[2].get<double>();
    spec.tilt_deg = j.value("tilt_deg", 0.0);
    if (j.contains("window") && !j.at("window").is_null()) {
        const json& w = j.at("window");
        std::string shape = w.value("shape", "circle");
        if (shape != "circle")
            throw Error(ErrorCode::SpecInvalid, "window.shape: only 'circle' is supported");
        WindowSpec ws;
        ws.diameter = w.value("diameter", 14.0);
        if (w.contains("center_offset")) {
            const json& o = w.at("center_offset");
            ws.center_offset_x = o[0].get<double>();
            ws.center_offset_y = o[1].get<double>();
        }
        ws.standoff = w.value("standoff", 3.0);
        spec.window = ws;
    }
    for (const json& k : j.value("keepouts", json::array())) {
        KeepoutBox box;
        box.center = vec3_from(k.at("center"), "keepouts[].center");
        box.size = vec3_from(k.at("size"), "keepouts[].size");
        spec.keepouts.push_back(box);
    }
    for (const json& l : j.value("flexible_links", json::array())) {
        FlexibleLink link;
        link.from = vec3_from(l.at("from"), "flexible_links[].from");
        link.to = vec3_from(l.at("to"), "flexible_links[].to");
        link.slack = l.value("slack", norm(link.to - link.from));
        spec.flexible_links.push_back(link);
    }
    spec.validate();
    return spec;
}

BlankSpec blank_from_json(const json& j) {
    BlankSpec spec;
    if (j.contains("circuit")) {
        spec.circuit = circuit_from_json(j.at("circuit"));
        spec.expansion = j.value("expansion", 3.0);
        if (j.contains("fiducials")) {
            for (const json& f : j.at("fiducials")) {
                FiducialBump b;
                b.angle_deg = f.at("angle_deg").get<double>();
                b.radius_mm = f.at("radius_mm").get<double>();
                b.bump_radius = f.value("bump_radius", 1.0);
                spec.fiducials.push_back(b);
            }
        } else {
            spec.fiducials = BlankSpec::default_fiducials(spec.circuit);
        }
    } else {
        // Bare circuit document: defaults for the blank parameters.
        spec.circuit = circuit_from_json(j);
        spec.expansion = 3.0;
        spec.fiducials = BlankSpec::default_fiducials(spec.circuit);
    }
    spec.validate();
    return spec;
}

json parse_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::SpecInvalid, "unparseable JSON document");
    return j;
}

}  // namespace

CircuitSpec circuit_from_json_text(const std::string& text) {
    return circuit_from_json(parse_json_text(text));
}

BlankSpec blank_from_json_text(const std::string& text) {
    return blank_from_json(parse_json_text(text));
}

namespace {
std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
}  // namespace

BlankSpec load_blank_spec(const std::string& path) { return blank_from_json_text(read_text(path)); }

CircuitSpec load_circuit_spec(const std::string& path) {
    json j = parse_json_text(read_text(path));
    return circuit_from_json(j.contains("circuit") ? j.at("circuit") : j);
}

namespace {
json circuit_to_json(const CircuitSpec& spec) {
    json j;
    j["board_size"] = {spec.board_length, spec.board_width, spec.board_height};
    j["tilt_deg"] = spec.tilt_deg;
    if (spec.window) {
        j["window"] = {{"shape", "circle"},
                       {"diameter", spec.window->diameter},
                       {"center_offset", {spec.window->center_offset_x, spec.window->center_offset_y}},
                       {"standoff", spec.window->standoff}};
    }
    j["keepouts"] = json::array();
    for (const auto& k : spec.keepouts)
        j["keepouts"].push_back({{"center", {k.center.x, k.center.y, k.center.z}},
                                 {"size", {k.size.x, k.size.y, k.size.z}}});
    j["flexible_links"] = json::array();
    for (const auto& l : spec.flexible_links)
        j["flexible_links"].push_back({{"from", {l.from.x, l.from.y, l.from.z}},
                                       {"to", {l.to.x, l.to.y, l.to.z}},
                                       {"slack", l.slack}});
    return j;
}
}  // namespace

std::string circuit_to_json_text(const CircuitSpec& spec) { return circuit_to_json(spec).dump(2); }

std::string blank_to_json_text(const BlankSpec& spec) {
    json j;
    j["circuit"] = circuit_to_json(spec.circuit);
    j["expansion"] = spec.expansion;
    j["fiducials"] = json::array();
    for (const auto& f : spec.fiducials)
        j["fiducials"].push_back({{"angle_deg", f.angle_deg},
                                  {"radius_mm", f.radius_mm},
                                  {"bump_radius", f.bump_radius}});
    return j.dump(2);
}

}  // namespace shellforge
