#include "shellforge/registration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "shellforge/blank.hpp"
#include "shellforge/error.hpp"

namespace shellforge {

PlaneFit fit_plane(const std::vector<Vec3>& points, const Vec3& orient_hint) {
    if (points.size() < 3)
        throw Error(ErrorCode::DegenerateInput, "plane fit needs at least 3 points");

    Vec3 centroid{0, 0, 0};
    for (const Vec3& p : points) centroid += p;
    centroid = centroid / static_cast<double>(points.size());

    Vec3 normal;
    if (points.size() == 3) {
        Vec3 e1 = points[1] - points[0], e2 = points[2] - points[0];
        normal = cross(e1, e2);
        if (norm(normal) < 1e-8 * norm(e1) * norm(e2))
            throw Error(ErrorCode::DegenerateInput, "points are collinear within tolerance");
        normal = normalized(normal);
    } else {
        std::array<std::array<double, 3>, 3> cov{};
        for (const Vec3& p : points) {
            Vec3 q = p - centroid;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) cov[i][j] += q[i] * q[j];
        }
        std::array<double, 3> eig;
        std::array<std::array<double, 3>, 3> vecs;
        jacobi_eigen_symmetric<3>(cov, eig, vecs);
        if (eig[1] < 1e-12)
            throw Error(ErrorCode::DegenerateInput, "points are collinear within tolerance");
        normal = normalized({vecs[0][0], vecs[1][0], vecs[2][0]});  // smallest eigenvalue
    }

    if (norm(orient_hint) > 0.0 && dot(normal, orient_hint) < 0.0) normal = -normal;
    return {normal, dot(normal, centroid)};
}

namespace {

// Horn's closed-form quaternion solve for the optimal rotation mapping the
// centered `src` points onto the centered `dst` points.
Mat3 optimal_rotation(const std::array<Vec3, 3>& src, const std::array<Vec3, 3>& dst) {
    double s[3][3] = {};
    for (int n = 0; n < 3; ++n)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s[i][j] += src[n][i] * dst[n][j];

    std::array<std::array<double, 4>, 4> N{};
    N[0][0] = s[0][0] + s[1][1] + s[2][2];
    N[0][1] = N[1][0] = s[1][2] - s[2][1];
    N[0][2] = N[2][0] = s[2][0] - s[0][2];
    N[0][3] = N[3][0] = s[0][1] - s[1][0];
    N[1][1] = s[0][0] - s[1][1] - s[2][2];
    N[1][2] = N[2][1] = s[0][1] + s[1][0];
    N[1][3] = N[3][1] = s[2][0] + s[0][2];
    N[2][2] = -s[0][0] + s[1][1] - s[2][2];
    N[2][3] = N[3][2] = s[1][2] + s[2][1];
    N[3][3] = -s[0][0] - s[1][1] + s[2][2];

    std::array<double, 4> eig;
    std::array<std::array<double, 4>, 4> vecs;
    jacobi_eigen_symmetric<4>(N, eig, vecs);
    // Largest eigenvalue = optimal quaternion (w, x, y, z).
    double w = vecs[0][3], x = vecs[1][3], y = vecs[2][3], z = vecs[3][3];

    Mat3 r;
    r.m = {{{w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)},
            {2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)},
            {2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z}}};
    double q2 = w * w + x * x + y * y + z * z;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] /= q2;
    return r;
}

}  // namespace

PoseFit pose_from_fiducials(const FiducialObservation& obs, const std::vector<Vec3>& layout) {
    if (layout.size() != 3)
        throw Error(ErrorCode::DegenerateInput, "layout must contain exactly 3 bump centers");
    {
        Vec3 n = cross(obs.points[1] - obs.points[0], obs.points[2] - obs.points[0]);
        if (0.5 * norm(n) <= 1.0)
            throw Error(ErrorCode::DegenerateInput,
                        "observed fiducials nearly collinear (area <= 1 mm^2)");
    }

    // Unique correspondence needs a scalene layout.
    double lay_side[3] = {norm(layout[1] - layout[0]), norm(layout[2] - layout[1]),
                          norm(layout[0] - layout[2])};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::abs(lay_side[i] - lay_side[j]) < 0.2)
                throw Error(ErrorCode::AmbiguousCorrespondence,
                            "layout sides within 0.2 mm of each other");

    // Try all six assignments; pick the best pairwise-distance match.
    static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                    {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
    int best_perm = 0;
    double best_score = 1e300;
    for (int p = 0; p < 6; ++p) {
        const int* q = perms[p];
        double score = 0.0;
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3;
            double obs_side = norm(obs.points[q[j]] - obs.points[q[i]]);
            score += std::abs(obs_side - norm(layout[j] - layout[i]));
        }
        if (score < best_score) {
            best_score = score;
            best_perm = p;
        }
    }

    std::array<Vec3, 3> matched;
    PoseFit fit;
    for (int i = 0; i < 3; ++i) {
        fit.correspondence[i] = perms[best_perm][i];
        matched[i] = obs.points[perms[best_perm][i]];
    }

    Vec3 c_layout{0, 0, 0}, c_obs{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        c_layout += layout[i];
        c_obs += matched[i];
    }
    c_layout = c_layout / 3.0;
    c_obs = c_obs / 3.0;
    std::array<Vec3, 3> src, dst;
    for (int i = 0; i < 3; ++i) {
        src[i] = layout[i] - c_layout;
        dst[i] = matched[i] - c_obs;
    }

    fit.transform.rotation = optimal_rotation(src, dst);
    fit.transform.translation = c_obs - fit.transform.rotation * c_layout;

    double sum2 = 0.0;
    for (int i = 0; i < 3; ++i) sum2 += norm2(fit.transform.apply(layout[i]) - matched[i]);
    fit.residual_rms = std::sqrt(sum2 / 3.0);
    if (fit.residual_rms > 0.5)
        throw Error(ErrorCode::HighResidual,
                    "registration residual " + std::to_string(fit.residual_rms) +
                        " mm RMS; check the picked points");
    return fit;
}

FiducialObservation detect_fiducials(const TriangleMesh& scan, const Vec3& hint_center,
                                     double hint_radius, const DetectOptions& options) {
    if (!scan.bounds().contains(hint_center))
        throw Error(ErrorCode::DetectionFailed, "hint center outside the scan bounds");

    // Patch vertices and an area-weighted outward normal around the hint.
    std::vector<std::uint32_t> patch;
    for (std::uint32_t i = 0; i < scan.vertices.size(); ++i)
        if (norm(scan.vertices[i] - hint_center) <= hint_radius) patch.push_back(i);
    if (patch.size() < 16)
        throw Error(ErrorCode::DetectionFailed, "too few scan vertices near the hint");

    Vec3 mean_normal{0, 0, 0};
    {
        std::vector<char> in_patch(scan.vertices.size(), 0);
        for (std::uint32_t i : patch) in_patch[i] = 1;
        for (std::size_t t = 0; t < scan.triangles.size(); ++t) {
            const auto& tri = scan.triangles[t];
            if (in_patch[tri[0]] || in_patch[tri[1]] || in_patch[tri[2]])
                mean_normal += scan.triangle_normal(t);
        }
    }

    std::vector<Vec3> pts;
    pts.reserve(patch.size());
    for (std::uint32_t i : patch) pts.push_back(scan.vertices[i]);
    PlaneFit plane = fit_plane(pts, mean_normal);

    // Protrusion maxima above the local plane.
    struct Candidate {
        Vec3 p;
        double height;
    };
    std::vector<Candidate> cands;
    double min_height = options.min_protrusion_factor * options.bump_radius;
    for (const Vec3& p : pts) {
        double h = dot(plane.normal, p) - plane.offset;
        if (h >= min_height) cands.push_back({p, h});
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        if (a.height != b.height) return a.height > b.height;
        if (a.p.x != b.p.x) return a.p.x < b.p.x;
        if (a.p.y != b.p.y) return a.p.y < b.p.y;
        return a.p.z < b.p.z;
    });
    std::vector<Candidate> picked;
    for (const Candidate& c : cands) {
        bool blocked = false;
        for (const Candidate& k : picked)
            if (norm(c.p - k.p) < 2.0 * options.bump_radius) blocked = true;
        if (!blocked) picked.push_back(c);
        if (picked.size() == 3) break;
    }
    if (picked.size() < 3)
        throw Error(ErrorCode::DetectionFailed, "found " + std::to_string(picked.size()) +
                                                    " bump candidates, need 3");

    // Apex -> sphere center, then sort by angle in the plane for a stable
    // ordering.
    FiducialObservation obs;
    obs.source = FiducialObservation::Source::Detected;
    Vec3 u, v;
    plane_basis(plane.normal, u, v);
    std::array<Vec3, 3> centers;
    for (int i = 0; i < 3; ++i) centers[i] = picked[i].p - plane.normal * options.bump_radius;
    Vec3 mid = (centers[0] + centers[1] + centers[2]) / 3.0;
    std::sort(centers.begin(), centers.end(), [&](const Vec3& a, const Vec3& b) {
        return std::atan2(dot(a - mid, v), dot(a - mid, u)) <
               std::atan2(dot(b - mid, v), dot(b - mid, u));
    });
    obs.points = centers;
    return obs;
}

RigidTransform bracket_pose(const RigidTransform& window_pose, const CircuitSpec& spec) {
    return window_pose.compose(window_to_bracket(spec));
}

FiducialObservation load_fiducials(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
    FiducialObservation obs;
    int count = 0;
    std::string line;
    while (std::getline(in, line) && count < 3) {
        std::istringstream ls(line);
        Vec3 p;
        if (!(ls >> p.x >> p.y >> p.z)) {
            if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
            throw Error(ErrorCode::MalformedRecord,
                        "fiducial file line " + std::to_string(count + 1) + " is not 'x y z'");
        }
        obs.points[count++] = p;
    }
    if (count != 3)
        throw Error(ErrorCode::MalformedRecord, "fiducial file must contain 3 points");
    return obs;
}

}  // namespace shellforge
