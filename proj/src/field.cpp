#include "shellforge/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "shellforge/error.hpp"
#include "shellforge/mesh_io.hpp"

namespace shellforge {

namespace {
constexpr float kUnset = std::numeric_limits<float>::infinity();
}

double ScalarField::sample(const Vec3& p) const {
    double fx = (p.x - origin.x) / pitch;
    double fy = (p.y - origin.y) / pitch;
    double fz = (p.z - origin.z) / pitch;
    double cx = std::clamp(fx, 0.0, static_cast<double>(nx - 1));
    double cy = std::clamp(fy, 0.0, static_cast<double>(ny - 1));
    double cz = std::clamp(fz, 0.0, static_cast<double>(nz - 1));
    // Distance from the clamped point keeps far queries positive.
    double outside = std::hypot((fx - cx) * pitch, std::hypot((fy - cy) * pitch, (fz - cz) * pitch));

    int i0 = std::min(static_cast<int>(cx), nx - 2);
    int j0 = std::min(static_cast<int>(cy), ny - 2);
    int k0 = std::min(static_cast<int>(cz), nz - 2);
    double tx = cx - i0, ty = cy - j0, tz = cz - k0;
    double v = 0.0;
    for (int dk = 0; dk < 2; ++dk)
        for (int dj = 0; dj < 2; ++dj)
            for (int di = 0; di < 2; ++di) {
                double w = (di ? tx : 1 - tx) * (dj ? ty : 1 - ty) * (dk ? tz : 1 - tz);
                v += w * at(i0 + di, j0 + dj, k0 + dk);
            }
    return v + outside;
}

ScalarField make_grid(const Aabb& box, double pitch, int padding, std::size_t voxel_cap) {
    if (pitch <= 0.0) throw Error(ErrorCode::UsageError, "pitch must be positive");
    ScalarField f;
    f.pitch = pitch;
    // Half-pitch stagger keeps samples off axis-aligned faces.
    double margin = (padding + 0.5) * pitch;
    f.origin = box.min - Vec3{margin, margin, margin};
    Vec3 span = box.max + Vec3{margin, margin, margin} - f.origin;
    f.nx = static_cast<int>(std::ceil(span.x / pitch)) + 1;
    f.ny = static_cast<int>(std::ceil(span.y / pitch)) + 1;
    f.nz = static_cast<int>(std::ceil(span.z / pitch)) + 1;
    f.nx = std::max(f.nx, 2);
    f.ny = std::max(f.ny, 2);
    f.nz = std::max(f.nz, 2);
    std::size_t count = static_cast<std::size_t>(f.nx) * f.ny * f.nz;
    if (count > voxel_cap)
        throw Error(ErrorCode::GridTooLarge,
                    std::to_string(count) + " voxels exceeds cap " + std::to_string(voxel_cap) +
                        " (pitch " + std::to_string(pitch) + ")");
    f.values.assign(count, kUnset);
    return f;
}

ScalarField sample_sdf(const Sdf& sdf, const ScalarField& grid_template) {
    ScalarField f;
    f.origin = grid_template.origin;
    f.pitch = grid_template.pitch;
    f.nx = grid_template.nx;
    f.ny = grid_template.ny;
    f.nz = grid_template.nz;
    f.values.resize(f.voxel_count());
    std::size_t n = 0;
    for (int k = 0; k < f.nz; ++k)
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i, ++n)
                f.values[n] = static_cast<float>(sdf(f.position(i, j, k)));
    return f;
}

// --- voxelize ---------------------------------------------------------------

namespace {

struct CpGrid {
    std::vector<float> x, y, z, d2;
};

// Exact point-triangle distances within `band` voxels of each triangle.
void seed_narrow_band(const TriangleMesh& mesh, const ScalarField& f, int band, CpGrid& cp) {
    const double pitch = f.pitch;
    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        Aabb box;
        box.expand(a);
        box.expand(b);
        box.expand(c);
        int i0 = std::max(0, static_cast<int>(std::floor((box.min.x - f.origin.x) / pitch)) - band);
        int j0 = std::max(0, static_cast<int>(std::floor((box.min.y - f.origin.y) / pitch)) - band);
        int k0 = std::max(0, static_cast<int>(std::floor((box.min.z - f.origin.z) / pitch)) - band);
        int i1 = std::min(f.nx - 1,
                          static_cast<int>(std::ceil((box.max.x - f.origin.x) / pitch)) + band);
        int j1 = std::min(f.ny - 1,
                          static_cast<int>(std::ceil((box.max.y - f.origin.y) / pitch)) + band);
        int k1 = std::min(f.nz - 1,
                          static_cast<int>(std::ceil((box.max.z - f.origin.z) / pitch)) + band);
        for (int k = k0; k <= k1; ++k)
            for (int j = j0; j <= j1; ++j) {
                std::size_t row = f.index(0, j, k);
                for (int i = i0; i <= i1; ++i) {
                    Vec3 p = f.position(i, j, k);
                    Vec3 q = closest_point_on_triangle(p, a, b, c);
                    float d2 = static_cast<float>(norm2(p - q));
                    std::size_t n = row + i;
                    if (d2 < cp.d2[n]) {
                        cp.d2[n] = d2;
                        cp.x[n] = static_cast<float>(q.x);
                        cp.y[n] = static_cast<float>(q.y);
                        cp.z[n] = static_cast<float>(q.z);
                    }
                }
            }
    }
}

// Closest-point propagation: two lexicographic sweeps per round over the
// 26-neighborhood, carrying candidate surface points. Far-field error stays
// well under a voxel, which first-order distance marching would not give.
void propagate_closest_points(const ScalarField& f, CpGrid& cp, int rounds) {
    struct Offset {
        int di, dj, dk;
        long long dn;
    };
    std::vector<Offset> forward;
    for (int dk = -1; dk <= 1; ++dk)
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di) {
                if (dk > 0 || (dk == 0 && dj > 0) || (dk == 0 && dj == 0 && di >= 0)) continue;
                forward.push_back(
                    {di, dj, dk, (static_cast<long long>(dk) * f.ny + dj) * f.nx + di});
            }

    auto sweep = [&](bool reverse) {
        const int nx = f.nx, ny = f.ny, nz = f.nz;
        for (int kk = 0; kk < nz; ++kk) {
            int k = reverse ? nz - 1 - kk : kk;
            for (int jj = 0; jj < ny; ++jj) {
                int j = reverse ? ny - 1 - jj : jj;
                std::size_t row = f.index(0, j, k);
                for (int ii = 0; ii < nx; ++ii) {
                    int i = reverse ? nx - 1 - ii : ii;
                    std::size_t n = row + i;
                    double px = f.origin.x + i * f.pitch;
                    double py = f.origin.y + j * f.pitch;
                    double pz = f.origin.z + k * f.pitch;
                    float best = cp.d2[n];
                    float bx = cp.x[n], by = cp.y[n], bz = cp.z[n];
                    for (const Offset& o : forward) {
                        int oi = i + (reverse ? -o.di : o.di);
                        int oj = j + (reverse ? -o.dj : o.dj);
                        int ok = k + (reverse ? -o.dk : o.dk);
                        if (oi < 0 || oi >= nx || oj < 0 || oj >= ny || ok < 0 || ok >= nz)
                            continue;
                        std::size_t m = f.index(oi, oj, ok);
                        if (cp.d2[m] == kUnset) continue;
                        double dx = px - cp.x[m], dy = py - cp.y[m], dz = pz - cp.z[m];
                        float d2 = static_cast<float>(dx * dx + dy * dy + dz * dz);
                        if (d2 < best) {
                            best = d2;
                            bx = cp.x[m];
                            by = cp.y[m];
                            bz = cp.z[m];
                        }
                    }
                    if (best < cp.d2[n]) {
                        cp.d2[n] = best;
                        cp.x[n] = bx;
                        cp.y[n] = by;
                        cp.z[n] = bz;
                    }
                }
            }
        }
    };
    for (int r = 0; r < rounds; ++r) {
        sweep(false);
        sweep(true);
    }
}

inline double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

// Half-open edge ownership so a crossing on a shared edge counts exactly once.
inline bool edge_counts_tie(double dx, double dy) { return dy < 0.0 || (dy == 0.0 && dx < 0.0); }

// Scanline parity along one axis. votes[n] gets 0 (outside), 1 (inside) or
// stays 2 (unknown, odd row). `axis` is the ray direction; (bu, bv) the other
// two axes.
void parity_votes(const TriangleMesh& mesh, const ScalarField& f, int axis,
                  std::vector<std::uint8_t>& votes) {
    int bu = (axis + 1) % 3, bv = (axis + 2) % 3;
    const int dims[3] = {f.nx, f.ny, f.nz};
    int nu = dims[bu], nv = dims[bv], na = dims[axis];

    // Rays pass through sample rows offset by an irrational sub-voxel jitter:
    // extraction meshes have vertices exactly on lattice lines, and exact
    // edge hits would otherwise break the crossing parity. Only samples
    // within ~1e-5 pitch of the surface can be misjudged, where the signed
    // distance is ~0 anyway.
    const double jitter_u = f.pitch * 1.31607401295249e-5 * (axis + 1);  // ~sqrt(3)-1 scaled
    const double jitter_v = f.pitch * 2.23606797749979e-5 * (axis + 1);  // ~sqrt(5) scaled

    std::vector<std::vector<float>> rows(static_cast<std::size_t>(nu) * nv);

    for (const auto& tri : mesh.triangles) {
        const Vec3& a = mesh.vertices[tri[0]];
        const Vec3& b = mesh.vertices[tri[1]];
        const Vec3& c = mesh.vertices[tri[2]];
        double au = a[bu], av = a[bv], bu_ = b[bu], bv_ = b[bv], cu = c[bu], cv = c[bv];
        double area2 = cross2(bu_ - au, bv_ - av, cu - au, cv - av);
        if (area2 == 0.0) continue;  // parallel to the ray; другой axis handles it
        // Orient CCW in (u, v).
        double p0u = au, p0v = av, p1u = bu_, p1v = bv_, p2u = cu, p2v = cv;
        if (area2 < 0.0) {
            std::swap(p1u, p2u);
            std::swap(p1v, p2v);
        }
        Vec3 n = cross(b - a, c - a);
        double na_comp = n[axis];
        double plane_c = dot(n, a);

        double org_u = f.origin[bu], org_v = f.origin[bv], org_a = f.origin[axis];
        double lo_u = std::min({p0u, p1u, p2u}), hi_u = std::max({p0u, p1u, p2u});
        double lo_v = std::min({p0v, p1v, p2v}), hi_v = std::max({p0v, p1v, p2v});
        int iu0 = std::max(0, static_cast<int>(std::ceil((lo_u - org_u - jitter_u) / f.pitch)));
        int iu1 =
            std::min(nu - 1, static_cast<int>(std::floor((hi_u - org_u - jitter_u) / f.pitch)));
        int iv0 = std::max(0, static_cast<int>(std::ceil((lo_v - org_v - jitter_v) / f.pitch)));
        int iv1 =
            std::min(nv - 1, static_cast<int>(std::floor((hi_v - org_v - jitter_v) / f.pitch)));
        for (int iv = iv0; iv <= iv1; ++iv) {
            double qv = org_v + iv * f.pitch + jitter_v;
            for (int iu = iu0; iu <= iu1; ++iu) {
                double qu = org_u + iu * f.pitch + jitter_u;
                double e0 = cross2(p1u - p0u, p1v - p0v, qu - p0u, qv - p0v);
                double e1 = cross2(p2u - p1u, p2v - p1v, qu - p1u, qv - p1v);
                double e2 = cross2(p0u - p2u, p0v - p2v, qu - p2u, qv - p2v);
                bool in = (e0 > 0 || (e0 == 0 && edge_counts_tie(p1u - p0u, p1v - p0v))) &&
                          (e1 > 0 || (e1 == 0 && edge_counts_tie(p2u - p1u, p2v - p1v))) &&
                          (e2 > 0 || (e2 == 0 && edge_counts_tie(p0u - p2u, p0v - p2v)));
                if (!in) continue;
                // n[axis] != 0 because the projected area is n[axis]/2.
                double n_bu = n[bu], n_bv = n[bv];
                double ca = (plane_c - n_bu * qu - n_bv * qv) / na_comp;
                rows[static_cast<std::size_t>(iv) * nu + iu].push_back(
                    static_cast<float>(ca - org_a));
            }
        }
    }

    std::array<int, 3> idx;
    for (int iv = 0; iv < nv; ++iv)
        for (int iu = 0; iu < nu; ++iu) {
            auto& crossings = rows[static_cast<std::size_t>(iv) * nu + iu];
            std::sort(crossings.begin(), crossings.end());
            bool bad = crossings.size() % 2 != 0;
            idx[bu] = iu;
            idx[bv] = iv;
            std::size_t ptr = 0;
            for (int ia = 0; ia < na; ++ia) {
                idx[axis] = ia;
                std::size_t n = f.index(idx[0], idx[1], idx[2]);
                if (bad) {
                    votes[n] = 2;
                    continue;
                }
                double coord = ia * f.pitch;
                while (ptr < crossings.size() && crossings[ptr] <= coord) ++ptr;
                votes[n] = static_cast<std::uint8_t>(ptr % 2 == 1 ? 1 : 0);
            }
        }
}

// Exact generalized winding number (Oosterom–Strackee solid angles).
double winding_number(const TriangleMesh& mesh, const Vec3& p) {
    double total = 0.0;
    for (const auto& tri : mesh.triangles) {
        Vec3 a = mesh.vertices[tri[0]] - p;
        Vec3 b = mesh.vertices[tri[1]] - p;
        Vec3 c = mesh.vertices[tri[2]] - p;
        double la = norm(a), lb = norm(b), lc = norm(c);
        double det = dot(a, cross(b, c));
        double denom = la * lb * lc + dot(a, b) * lc + dot(b, c) * la + dot(c, a) * lb;
        total += 2.0 * std::atan2(det, denom);
    }
    return total / (4.0 * kPi);
}

}  // namespace

ScalarField voxelize_on_grid(const TriangleMesh& mesh, const ScalarField& grid_template,
                             const VoxelizeOptions& options) {
    if (!options.skip_watertight_check) {
        MeshDiagnostics d = validate(mesh);
        if (!d.watertight)
            throw Error(ErrorCode::NotWatertight,
                        "mesh has " + std::to_string(d.boundary_edge_count) +
                            " boundary edges and " + std::to_string(d.inverted_adjacent_pairs) +
                            " inverted pairs");
    }

    ScalarField f;
    f.origin = grid_template.origin;
    f.pitch = grid_template.pitch;
    f.nx = grid_template.nx;
    f.ny = grid_template.ny;
    f.nz = grid_template.nz;
    const std::size_t count = f.voxel_count();

    CpGrid cp;
    cp.x.assign(count, 0.f);
    cp.y.assign(count, 0.f);
    cp.z.assign(count, 0.f);
    cp.d2.assign(count, kUnset);

    // Dense extraction meshes make a wide exact band quadratically expensive;
    // the propagated far field is still sub-voxel accurate.
    int band = options.exact_band;
    if (mesh.triangles.size() > 150000) band = std::min(band, 2);
    seed_narrow_band(mesh, f, band, cp);
    propagate_closest_points(f, cp, 2);

    std::vector<std::uint8_t> vx(count), vy(count), vz(count);
    parity_votes(mesh, f, 0, vx);
    parity_votes(mesh, f, 1, vy);
    parity_votes(mesh, f, 2, vz);

    f.values.resize(count);
    std::vector<std::size_t> disputed;
    std::size_t n = 0;
    for (int k = 0; k < f.nz; ++k)
        for (int j = 0; j < f.ny; ++j)
            for (int i = 0; i < f.nx; ++i, ++n) {
                int inside = 0, known = 0;
                for (std::uint8_t v : {vx[n], vy[n], vz[n]})
                    if (v != 2) {
                        ++known;
                        inside += v;
                    }
                double d = std::sqrt(static_cast<double>(cp.d2[n]));
                bool is_inside;
                if (known > 0 && (inside == 0 || inside == known)) {
                    is_inside = inside == known && inside > 0;
                } else if (known >= 2 && (inside * 2 != known)) {
                    is_inside = inside * 2 > known;
                    disputed.push_back(n);  // non-unanimous: re-check exactly
                } else {
                    is_inside = false;
                    disputed.push_back(n);
                }
                f.values[n] = static_cast<float>(is_inside ? -d : d);
            }

    // Exact winding-number arbitration for the (few) contested samples. The
    // budget keeps a pathological dispute flood from turning O(n_tri) per
    // query into a stall; past it the majority vote above stands.
    const std::size_t arbitration_cap =
        std::max<std::size_t>(64, (std::size_t(1) << 31) / std::max<std::size_t>(
                                                               mesh.triangles.size(), 1));
    for (std::size_t t = 0; t < disputed.size() && t < arbitration_cap; ++t) {
        std::size_t m = disputed[t];
        int k = static_cast<int>(m / (static_cast<std::size_t>(f.nx) * f.ny));
        int j = static_cast<int>((m / f.nx) % f.ny);
        int i = static_cast<int>(m % f.nx);
        bool inside = winding_number(mesh, f.position(i, j, k)) > 0.5;
        double d = std::abs(f.values[m]);
        f.values[m] = static_cast<float>(inside ? -d : d);
    }
    return f;
}

ScalarField voxelize(const TriangleMesh& mesh, const VoxelizeOptions& options) {
    Aabb box = mesh.bounds();
    if (box.empty()) throw Error(ErrorCode::UsageError, "cannot voxelize an empty mesh");
    if (options.padding < 2) throw Error(ErrorCode::UsageError, "padding must be >= 2");
    ScalarField grid = make_grid(box, options.pitch, options.padding, options.voxel_cap);
    return voxelize_on_grid(mesh, grid, options);
}

ScalarField csg_apply(const ScalarField& a, const ScalarField& b, CsgOp op) {
    if (std::abs(a.pitch - b.pitch) > 1e-9 * a.pitch)
        throw Error(ErrorCode::PitchMismatch, "fields have pitches " + std::to_string(a.pitch) +
                                                  " and " + std::to_string(b.pitch));
    ScalarField out = a;
    bool same_lattice = a.nx == b.nx && a.ny == b.ny && a.nz == b.nz &&
                        norm(a.origin - b.origin) < 1e-9;
    std::size_t n = 0;
    for (int k = 0; k < a.nz; ++k)
        for (int j = 0; j < a.ny; ++j)
            for (int i = 0; i < a.nx; ++i, ++n) {
                double va = a.values[n];
                double vb = same_lattice ? b.values[n] : b.sample(a.position(i, j, k));
                double r = 0;
                switch (op) {
                    case CsgOp::Union: r = std::min(va, vb); break;
                    case CsgOp::Intersect: r = std::max(va, vb); break;
                    case CsgOp::Subtract: r = std::max(va, -vb); break;
                }
                out.values[n] = static_cast<float>(r);
            }
    return out;
}

void csg_apply_sdf(ScalarField& a, const Sdf& b, CsgOp op) {
    std::size_t n = 0;
    for (int k = 0; k < a.nz; ++k)
        for (int j = 0; j < a.ny; ++j)
            for (int i = 0; i < a.nx; ++i, ++n) {
                double va = a.values[n];
                double vb = b(a.position(i, j, k));
                double r = 0;
                switch (op) {
                    case CsgOp::Union: r = std::min(va, vb); break;
                    case CsgOp::Intersect: r = std::max(va, vb); break;
                    case CsgOp::Subtract: r = std::max(va, -vb); break;
                }
                a.values[n] = static_cast<float>(r);
            }
}

ScalarField offset_field(const ScalarField& f, double delta) {
    if (delta < 0.0) {
        // Growth moves the surface toward the boundary; make sure it stays
        // strictly inside the padded grid.
        float boundary_min = kUnset;
        for (int k = 0; k < f.nz; ++k)
            for (int j = 0; j < f.ny; ++j)
                for (int i = 0; i < f.nx; ++i) {
                    if (i != 0 && i != f.nx - 1 && j != 0 && j != f.ny - 1 && k != 0 &&
                        k != f.nz - 1)
                        continue;
                    boundary_min = std::min(boundary_min, f.at(i, j, k));
                }
        if (boundary_min + delta < 0.5 * f.pitch)
            throw Error(ErrorCode::DeltaExceedsPadding,
                        "growing by " + std::to_string(-delta) +
                            " mm would reach the grid boundary (clearance " +
                            std::to_string(boundary_min) + " mm)");
    }
    ScalarField out = f;
    for (auto& v : out.values) v = static_cast<float>(v + delta);
    return out;
}

// --- marching tetrahedra ----------------------------------------------------

namespace {

// Cube corners; the six tetrahedra around the 0-6 diagonal are all positively
// oriented and face-consistent across neighboring cubes.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kTets[6][4] = {{0, 1, 2, 6}, {0, 2, 3, 6}, {0, 3, 7, 6},
                             {0, 7, 4, 6}, {0, 4, 5, 6}, {0, 5, 1, 6}};

struct MtBuilder {
    TriangleMesh mesh;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_vertex;

    std::uint32_t vertex_on_edge(std::size_t ga, std::size_t gb, double va, double vb,
                                 const Vec3& pa, const Vec3& pb) {
        if (ga > gb) return vertex_on_edge(gb, ga, vb, va, pb, pa);
        std::uint64_t key = (static_cast<std::uint64_t>(ga) << 32) | gb;
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        double t = va / (va - vb);
        std::uint32_t idx = static_cast<std::uint32_t>(mesh.vertices.size());
        mesh.vertices.push_back(pa + (pb - pa) * t);
        edge_vertex.emplace(key, idx);
        return idx;
    }
};

// Parity of a permutation of {0,1,2,3} given as tet-local slots.
inline bool permutation_odd(const int slots[4]) {
    int inversions = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (slots[i] > slots[j]) ++inversions;
    return inversions % 2 == 1;
}

}  // namespace

TriangleMesh extract_surface(const ScalarField& f) {
    MtBuilder builder;
    const std::size_t stride_j = f.nx;
    const std::size_t stride_k = static_cast<std::size_t>(f.nx) * f.ny;

    for (int k = 0; k + 1 < f.nz; ++k)
        for (int j = 0; j + 1 < f.ny; ++j)
            for (int i = 0; i + 1 < f.nx; ++i) {
                std::size_t base = f.index(i, j, k);
                std::size_t gidx[8];
                double val[8];
                bool any_neg = false, any_pos = false;
                for (int c = 0; c < 8; ++c) {
                    gidx[c] = base + kCorner[c][0] + kCorner[c][1] * stride_j +
                              kCorner[c][2] * stride_k;
                    val[c] = f.values[gidx[c]];
                    (val[c] < 0.0 ? any_neg : any_pos) = true;
                }
                if (!any_neg || !any_pos) continue;
                Vec3 pos[8];
                for (int c = 0; c < 8; ++c)
                    pos[c] = f.position(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]);

                for (const auto& tet : kTets) {
                    // Slots are positions 0..3 within the (positively
                    // oriented) tet; orientation below depends only on the
                    // parity of the inside/outside arrangement, so zero-area
                    // triangles from exact-zero samples still pair up.
                    int inside[4], outside[4];
                    int ni = 0, no = 0;
                    for (int c = 0; c < 4; ++c) {
                        if (val[tet[c]] < 0.0)
                            inside[ni++] = c;
                        else
                            outside[no++] = c;
                    }
                    if (ni == 0 || ni == 4) continue;

                    auto ev = [&](int sa, int sb) {
                        int a = tet[sa], b = tet[sb];
                        return builder.vertex_on_edge(gidx[a], gidx[b], val[a], val[b], pos[a],
                                                      pos[b]);
                    };
                    auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c,
                                    bool flip) {
                        if (flip) std::swap(b, c);
                        builder.mesh.triangles.push_back({a, b, c});
                    };

                    if (ni == 1) {
                        int slots[4] = {inside[0], outside[0], outside[1], outside[2]};
                        bool odd = permutation_odd(slots);
                        emit(ev(inside[0], outside[0]), ev(inside[0], outside[1]),
                             ev(inside[0], outside[2]), odd);
                    } else if (ni == 3) {
                        int slots[4] = {outside[0], inside[0], inside[1], inside[2]};
                        bool odd = permutation_odd(slots);
                        emit(ev(outside[0], inside[0]), ev(outside[0], inside[1]),
                             ev(outside[0], inside[2]), !odd);
                    } else {
                        int slots[4] = {inside[0], inside[1], outside[0], outside[1]};
                        bool odd = permutation_odd(slots);
                        std::uint32_t q0 = ev(inside[0], outside[0]);
                        std::uint32_t q1 = ev(inside[0], outside[1]);
                        std::uint32_t q2 = ev(inside[1], outside[1]);
                        std::uint32_t q3 = ev(inside[1], outside[0]);
                        emit(q0, q1, q2, odd);
                        emit(q0, q2, q3, odd);
                    }
                }
            }
    return std::move(builder.mesh);
}

double ScalarField::solid_volume() const {
    bool any_neg = false;
    for (float v : values)
        if (v < 0.f) {
            any_neg = true;
            break;
        }
    if (!any_neg) return 0.0;
    return metrics(extract_surface(*this)).signed_volume;
}

void dump_field(const ScalarField& f, const std::string& path_prefix) {
    std::vector<std::uint8_t> raw(f.values.size() * 4);
    std::memcpy(raw.data(), f.values.data(), raw.size());
    write_file_bytes(path_prefix + ".f32", raw);
    char header[256];
    std::snprintf(header, sizeof header, "dims %d %d %d\norigin %.9g %.9g %.9g\npitch %.9g\n",
                  f.nx, f.ny, f.nz, f.origin.x, f.origin.y, f.origin.z, f.pitch);
    std::string h = header;
    write_file_bytes(path_prefix + ".txt", std::vector<std::uint8_t>(h.begin(), h.end()));
}

}  // namespace shellforge
