#include "shellforge/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <unordered_map>

#include "shellforge/error.hpp"

namespace shellforge {

namespace {

inline std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

struct EdgeUse {
    int forward = 0;   // traversals a->b with a < b
    int backward = 0;  // traversals b->a with a < b
    std::uint32_t tri[2] = {0, 0};
    int count = 0;
};

void check_indices(const TriangleMesh& mesh) {
    const std::uint32_t n = static_cast<std::uint32_t>(mesh.vertices.size());
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        for (int k = 0; k < 3; ++k)
            if (mesh.triangles[t][k] >= n)
                throw Error(ErrorCode::IndexOutOfRange,
                            "triangle " + std::to_string(t) + " references vertex " +
                                std::to_string(mesh.triangles[t][k]) + " of " + std::to_string(n));
}

}  // namespace

MeshDiagnostics validate(const TriangleMesh& mesh, double degenerate_area) {
    check_indices(mesh);
    MeshDiagnostics d;

    std::unordered_map<std::uint64_t, EdgeUse> edges;
    edges.reserve(mesh.triangles.size() * 3);
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        if (mesh.triangle_area(t) < degenerate_area) ++d.degenerate_triangle_count;
        for (int k = 0; k < 3; ++k) {
            std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
            auto& use = edges[edge_key(a, b)];
            if (a < b)
                ++use.forward;
            else
                ++use.backward;
            if (use.count < 2) use.tri[use.count] = static_cast<std::uint32_t>(t);
            ++use.count;
        }
    }

    bool over_shared = false;
    bool all_paired_opposite = true;
    for (const auto& [key, use] : edges) {
        (void)key;
        int total = use.forward + use.backward;
        if (total == 1) ++d.boundary_edge_count;
        if (total > 2) over_shared = true;
        if (total == 2) {
            // Consistent orientation means one traversal each way.
            if (use.forward == 2 || use.backward == 2) ++d.inverted_adjacent_pairs;
        }
        if (total != 2 || use.forward != 1 || use.backward != 1) all_paired_opposite = false;
    }
    d.manifold = !over_shared;
    d.watertight = !mesh.triangles.empty() && all_paired_opposite;

    // Components over triangle adjacency through shared edges.
    std::vector<std::uint32_t> parent(mesh.triangles.size());
    for (std::uint32_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [key, use] : edges) {
        (void)key;
        if (use.count >= 2) {
            std::uint32_t ra = find(use.tri[0]), rb = find(use.tri[1]);
            if (ra != rb) parent[ra] = rb;
        }
    }
    for (std::uint32_t i = 0; i < parent.size(); ++i)
        if (find(i) == i) ++d.connected_components;
    return d;
}

MeshMetrics metrics(const TriangleMesh& mesh) {
    MeshMetrics m;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        m.signed_volume += dot(a, cross(b, c)) / 6.0;
        m.surface_area += 0.5 * norm(cross(b - a, c - a));
    }
    m.bbox = mesh.bounds();
    return m;
}

TriangleMesh transform_mesh(const TriangleMesh& mesh, const RigidTransform& t) {
    if (!t.is_valid())
        throw Error(ErrorCode::InvalidTransform, "rotation is not orthonormal with det +1");
    TriangleMesh out;
    out.name = mesh.name;
    out.triangles = mesh.triangles;
    out.vertices.reserve(mesh.vertices.size());
    for (const auto& v : mesh.vertices) out.vertices.push_back(t.apply(v));
    return out;
}

void append_mesh(TriangleMesh& base, const TriangleMesh& extra) {
    const std::uint32_t offset = static_cast<std::uint32_t>(base.vertices.size());
    base.vertices.insert(base.vertices.end(), extra.vertices.begin(), extra.vertices.end());
    base.triangles.reserve(base.triangles.size() + extra.triangles.size());
    for (const auto& tri : extra.triangles)
        base.triangles.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
}

namespace {

// Spatial-hash weld: canonical representative is the first vertex seen in a
// cell-neighborhood within epsilon, keeping output order deterministic.
std::vector<std::uint32_t> weld_map(const std::vector<Vec3>& vertices, double eps,
                                    std::vector<Vec3>& welded) {
    std::vector<std::uint32_t> remap(vertices.size());
    if (eps <= 0.0) eps = 1e-12;
    const double cell = eps * 2.0;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
    auto cell_key = [&](long long ix, long long iy, long long iz) {
        std::uint64_t h = 1469598103934665603ULL;
        for (long long v : {ix, iy, iz}) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 1099511628211ULL;
        }
        return h;
    };
    const double eps2 = eps * eps;
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
        const Vec3& p = vertices[i];
        long long ix = static_cast<long long>(std::floor(p.x / cell));
        long long iy = static_cast<long long>(std::floor(p.y / cell));
        long long iz = static_cast<long long>(std::floor(p.z / cell));
        std::uint32_t found = UINT32_MAX;
        for (long long dx = -1; dx <= 1 && found == UINT32_MAX; ++dx)
            for (long long dy = -1; dy <= 1 && found == UINT32_MAX; ++dy)
                for (long long dz = -1; dz <= 1 && found == UINT32_MAX; ++dz) {
                    auto it = grid.find(cell_key(ix + dx, iy + dy, iz + dz));
                    if (it == grid.end()) continue;
                    for (std::uint32_t j : it->second)
                        if (norm2(vertices[j] - p) <= eps2) {
                            found = j;
                            break;
                        }
                }
        if (found == UINT32_MAX) {
            grid[cell_key(ix, iy, iz)].push_back(i);
            found = i;
        }
        remap[i] = found;
    }
    // Compact to the surviving representatives.
    std::vector<std::uint32_t> compact(vertices.size(), UINT32_MAX);
    for (std::uint32_t i = 0; i < vertices.size(); ++i) {
        std::uint32_t rep = remap[i];
        if (compact[rep] == UINT32_MAX) {
            compact[rep] = static_cast<std::uint32_t>(welded.size());
            welded.push_back(vertices[rep]);
        }
        remap[i] = compact[rep];
    }
    return remap;
}

}  // namespace

TriangleMesh repair_basic(const TriangleMesh& mesh, double weld_epsilon, double degenerate_area) {
    check_indices(mesh);
    TriangleMesh out;
    out.name = mesh.name;
    std::vector<std::uint32_t> remap = weld_map(mesh.vertices, weld_epsilon, out.vertices);

    out.triangles.reserve(mesh.triangles.size());
    for (const auto& tri : mesh.triangles)
        out.triangles.push_back({remap[tri[0]], remap[tri[1]], remap[tri[2]]});

    // Degenerate triangles are removed by collapsing their shortest edge, so
    // a closed surface stays closed; deleting the face alone would open a
    // hole bounded by its three edges.
    std::vector<std::uint32_t> rep(out.vertices.size());
    for (std::uint32_t i = 0; i < rep.size(); ++i) rep[i] = i;
    auto find_rep = [&](std::uint32_t x) {
        while (rep[x] != x) x = rep[x] = rep[rep[x]];
        return x;
    };
    for (int pass = 0; pass < 8; ++pass) {
        bool collapsed = false;
        std::vector<std::array<std::uint32_t, 3>> kept;
        kept.reserve(out.triangles.size());
        for (auto tri : out.triangles) {
            for (int k = 0; k < 3; ++k) tri[k] = find_rep(tri[k]);
            if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
            Vec3 n = cross(out.vertices[tri[1]] - out.vertices[tri[0]],
                           out.vertices[tri[2]] - out.vertices[tri[0]]);
            if (0.5 * norm(n) < degenerate_area) {
                double best = std::numeric_limits<double>::infinity();
                int edge = 0;
                for (int k = 0; k < 3; ++k) {
                    double len = norm2(out.vertices[tri[(k + 1) % 3]] - out.vertices[tri[k]]);
                    if (len < best) {
                        best = len;
                        edge = k;
                    }
                }
                rep[find_rep(tri[(edge + 1) % 3])] = find_rep(tri[edge]);
                collapsed = true;
                continue;
            }
            kept.push_back(tri);
        }
        out.triangles = std::move(kept);
        if (!collapsed) break;
    }
    // Compact the vertex pool to the survivors.
    {
        std::vector<std::uint32_t> compact(out.vertices.size(), UINT32_MAX);
        std::vector<Vec3> verts;
        for (auto& tri : out.triangles)
            for (int k = 0; k < 3; ++k) {
                std::uint32_t r = find_rep(tri[k]);
                if (compact[r] == UINT32_MAX) {
                    compact[r] = static_cast<std::uint32_t>(verts.size());
                    verts.push_back(out.vertices[r]);
                }
                tri[k] = compact[r];
            }
        out.vertices = std::move(verts);
    }

    // Orientation: propagate winding from the largest triangle of each
    // component, then flip the whole component if its signed volume is
    // negative.
    const std::size_t ntri = out.triangles.size();
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> edge_tris;
    edge_tris.reserve(ntri * 3);
    for (std::uint32_t t = 0; t < ntri; ++t)
        for (int k = 0; k < 3; ++k)
            edge_tris[edge_key(out.triangles[t][k], out.triangles[t][(k + 1) % 3])].push_back(t);

    std::vector<int> component(ntri, -1);
    std::vector<char> flip(ntri, 0);
    int ncomp = 0;
    std::vector<double> areas(ntri);
    for (std::uint32_t t = 0; t < ntri; ++t) areas[t] = out.triangle_area(t);

    auto traverses = [&](std::uint32_t t, std::uint32_t a, std::uint32_t b) {
        // Does triangle t (with its current flip state) traverse a->b?
        const auto& tri = out.triangles[t];
        for (int k = 0; k < 3; ++k) {
            std::uint32_t u = tri[k], v = tri[(k + 1) % 3];
            if (flip[t]) std::swap(u, v);
            if (u == a && v == b) return true;
        }
        return false;
    };

    for (std::uint32_t seed_scan = 0; seed_scan < ntri; ++seed_scan) {
        if (component[seed_scan] != -1) continue;
        // Collect the component first (ignoring orientation), then pick its
        // largest triangle as propagation seed.
        std::vector<std::uint32_t> members;
        std::queue<std::uint32_t> q;
        q.push(seed_scan);
        component[seed_scan] = ncomp;
        while (!q.empty()) {
            std::uint32_t t = q.front();
            q.pop();
            members.push_back(t);
            for (int k = 0; k < 3; ++k) {
                for (std::uint32_t other :
                     edge_tris[edge_key(out.triangles[t][k], out.triangles[t][(k + 1) % 3])]) {
                    if (component[other] == -1) {
                        component[other] = ncomp;
                        q.push(other);
                    }
                }
            }
        }
        std::uint32_t seed = members[0];
        for (std::uint32_t t : members)
            if (areas[t] > areas[seed]) seed = t;

        std::vector<char> visited(ntri, 0);
        std::queue<std::uint32_t> prop;
        prop.push(seed);
        visited[seed] = 1;
        while (!prop.empty()) {
            std::uint32_t t = prop.front();
            prop.pop();
            const auto& tri = out.triangles[t];
            for (int k = 0; k < 3; ++k) {
                std::uint32_t a = tri[k], b = tri[(k + 1) % 3];
                if (flip[t]) std::swap(a, b);
                for (std::uint32_t other : edge_tris[edge_key(a, b)]) {
                    if (other == t || visited[other]) continue;
                    // Consistent neighbors traverse the shared edge b->a.
                    flip[other] = traverses(other, a, b) ? 1 : 0;
                    visited[other] = 1;
                    prop.push(other);
                }
            }
        }

        double vol = 0.0;
        for (std::uint32_t t : members) {
            auto tri = out.triangles[t];
            if (flip[t]) std::swap(tri[1], tri[2]);
            vol += dot(out.vertices[tri[0]],
                       cross(out.vertices[tri[1]], out.vertices[tri[2]])) /
                   6.0;
        }
        if (vol < 0.0)
            for (std::uint32_t t : members) flip[t] = !flip[t];
        ++ncomp;
    }

    for (std::uint32_t t = 0; t < ntri; ++t)
        if (flip[t]) std::swap(out.triangles[t][1], out.triangles[t][2]);
    return out;
}

}  // namespace shellforge
