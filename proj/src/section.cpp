#include "shellforge/section.hpp"

#include <algorithm>
#include <unordered_map>

namespace shellforge {

void classify_vertices(const TriangleMesh& mesh, const Plane& plane, double snap_eps,
                       std::vector<double>& distance, std::vector<int>& side) {
    distance.resize(mesh.vertices.size());
    side.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        double d = plane.signed_distance(mesh.vertices[i]);
        if (std::abs(d) <= snap_eps) d = 0.0;
        distance[i] = d;
        side[i] = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    }
}

CrossSection cross_section(const TriangleMesh& mesh, const Plane& plane,
                           const std::vector<double>& distance, const std::vector<int>& side) {
    CrossSection cs;
    cs.plane = plane;
    plane_basis(plane.normal, cs.basis_u, cs.basis_v);

    std::unordered_map<std::uint64_t, std::uint32_t> point_of_key;
    auto point_id = [&](std::uint64_t key, const Vec3& pos) {
        auto it = point_of_key.find(key);
        if (it != point_of_key.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(cs.points.size());
        cs.points.push_back(pos);
        cs.keys.push_back(key);
        point_of_key.emplace(key, id);
        return id;
    };

    // Chords from crossing triangles, plus in-plane mesh edges whose two
    // owner triangles sit on opposite sides.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> chords;
    std::unordered_map<std::uint64_t, int> plane_edge_owners;  // key -> side mask

    for (const auto& tri : mesh.triangles) {
        int pos_count = 0, neg_count = 0;
        for (int k = 0; k < 3; ++k) {
            if (side[tri[k]] > 0) ++pos_count;
            if (side[tri[k]] < 0) ++neg_count;
        }
        if (pos_count > 0 && neg_count > 0) {
            std::uint32_t ids[3];
            int n = 0;
            for (int k = 0; k < 3 && n < 3; ++k) {
                std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
                if (side[a] == 0) ids[n++] = point_id(cut_key_vertex(a), mesh.vertices[a]);
                if (side[a] * side[b] < 0)
                    ids[n++] = point_id(cut_key_edge(a, b),
                                        cut_point_position(mesh, a, b, distance));
            }
            if (n == 2 && ids[0] != ids[1]) chords.push_back({ids[0], ids[1]});
        } else if (pos_count + neg_count > 0) {
            // One-sided triangle: record any fully in-plane edges it owns.
            int tri_side = pos_count > 0 ? 1 : -1;
            for (int k = 0; k < 3; ++k) {
                std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
                if (side[a] == 0 && side[b] == 0)
                    plane_edge_owners[cut_key_edge(a, b)] |= tri_side > 0 ? 1 : 2;
            }
        }
    }
    for (const auto& [key, mask] : plane_edge_owners) {
        if (mask != 3) continue;  // needs an owner on each side
        std::uint32_t a = static_cast<std::uint32_t>(key >> 32);
        std::uint32_t b = static_cast<std::uint32_t>(key & 0xffffffffu);
        chords.push_back({point_id(cut_key_vertex(a), mesh.vertices[a]),
                          point_id(cut_key_vertex(b), mesh.vertices[b])});
    }

    // Chain chords into closed loops.
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> incident;
    for (std::uint32_t c = 0; c < chords.size(); ++c) {
        incident[chords[c].first].push_back(c);
        incident[chords[c].second].push_back(c);
    }
    std::vector<char> used(chords.size(), 0);
    for (std::uint32_t start = 0; start < chords.size(); ++start) {
        if (used[start]) continue;
        std::vector<std::uint32_t> loop;
        std::uint32_t first = chords[start].first;
        std::uint32_t cur = first;
        std::uint32_t chord = start;
        while (true) {
            used[chord] = 1;
            loop.push_back(cur);
            std::uint32_t nxt =
                chords[chord].first == cur ? chords[chord].second : chords[chord].first;
            if (nxt == first) break;
            std::uint32_t next_chord = UINT32_MAX;
            for (std::uint32_t c : incident[nxt])
                if (!used[c]) {
                    next_chord = c;
                    break;
                }
            if (next_chord == UINT32_MAX) {
                loop.clear();  // open chain; drop it
                break;
            }
            cur = nxt;
            chord = next_chord;
        }
        if (loop.size() >= 3) cs.loops.push_back(std::move(loop));
    }

    // Containment depth of each loop among the others (even = region
    // boundary, odd = hole).
    cs.loop_depth.assign(cs.loops.size(), 0);
    std::vector<std::vector<Vec2>> loops2d;
    loops2d.reserve(cs.loops.size());
    for (std::size_t l = 0; l < cs.loops.size(); ++l) loops2d.push_back(cs.loop_2d(l));
    for (std::size_t i = 0; i < cs.loops.size(); ++i) {
        const Vec2 probe = loops2d[i][0];
        int depth = 0;
        for (std::size_t j = 0; j < cs.loops.size(); ++j)
            if (j != i && point_in_polygon(probe, loops2d[j])) ++depth;
        cs.loop_depth[i] = depth;
    }
    return cs;
}

CrossSection cross_section(const TriangleMesh& mesh, const Plane& plane, double snap_eps) {
    std::vector<double> distance;
    std::vector<int> side;
    classify_vertices(mesh, plane, snap_eps, distance, side);
    return cross_section(mesh, plane, distance, side);
}

}  // namespace shellforge
