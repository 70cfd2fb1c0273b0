// Small dense 3D math used across the toolchain. Units are millimeters
// throughout; angles are degrees at API boundaries and radians internally.
#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace shellforge {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) {
    double n = norm(v);
    return n > 0.0 ? v / n : Vec3{0, 0, 0};
}
inline Vec3 min3(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
inline Vec3 max3(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}

constexpr double kPi = 3.14159265358979323846;
inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

// Row-major 3x3 matrix.
struct Mat3 {
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static Mat3 identity() { return Mat3{}; }
    static Mat3 zero() {
        Mat3 r;
        r.m = {{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}}};
        return r;
    }
    static Mat3 from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2) {
        Mat3 r;
        r.m = {{{c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z}}};
        return r;
    }
    static Mat3 rotation_x(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {{{1, 0, 0}, {0, c, -s}, {0, s, c}}};
        return r;
    }
    static Mat3 rotation_y(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}};
        return r;
    }
    static Mat3 rotation_z(double rad) {
        double c = std::cos(rad), s = std::sin(rad);
        Mat3 r;
        r.m = {{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}};
        return r;
    }
    // Rodrigues rotation about an arbitrary unit axis.
    static Mat3 rotation_axis_angle(const Vec3& axis, double rad);

    double& operator()(int r, int c) { return m[r][c]; }
    double operator()(int r, int c) const { return m[r][c]; }

    Vec3 col(int c) const { return {m[0][c], m[1][c], m[2][c]}; }
    Vec3 row(int r) const { return {m[r][0], m[r][1], m[r][2]}; }

    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r = Mat3::zero();
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 3; ++j) r.m[i][j] += m[i][k] * o.m[k][j];
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    double determinant() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

inline Mat3 Mat3::rotation_axis_angle(const Vec3& axis, double rad) {
    Vec3 u = normalized(axis);
    double c = std::cos(rad), s = std::sin(rad), t = 1.0 - c;
    Mat3 r;
    r.m = {{{c + u.x * u.x * t, u.x * u.y * t - u.z * s, u.x * u.z * t + u.y * s},
            {u.y * u.x * t + u.z * s, c + u.y * u.y * t, u.y * u.z * t - u.x * s},
            {u.z * u.x * t - u.y * s, u.z * u.y * t + u.x * s, c + u.z * u.z * t}}};
    return r;
}

// Rotation (orthonormal, det +1) plus translation. Maps local -> world as
// R * p + t.
struct RigidTransform {
    Mat3 rotation;
    Vec3 translation;

    static RigidTransform identity() { return {}; }

    Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
    Vec3 apply_vector(const Vec3& v) const { return rotation * v; }

    // this ∘ other: apply `other` first, then this.
    RigidTransform compose(const RigidTransform& other) const {
        return {rotation * other.rotation, rotation * other.translation + translation};
    }
    RigidTransform inverse() const {
        Mat3 rt = rotation.transposed();
        return {rt, -(rt * translation)};
    }

    // Orthonormality and det +1 within `tol` on all entries.
    bool is_valid(double tol = 1e-9) const {
        Mat3 should_be_i = rotation * rotation.transposed();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double want = (i == j) ? 1.0 : 0.0;
                if (std::abs(should_be_i(i, j) - want) > tol) return false;
            }
        return std::abs(rotation.determinant() - 1.0) <= 10 * tol;
    }
};

struct Aabb {
    Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    bool empty() const { return min.x > max.x; }
    void expand(const Vec3& p) { min = min3(min, p); max = max3(max, p); }
    void expand(const Aabb& b) { min = min3(min, b.min); max = max3(max, b.max); }
    void pad(double d) { min -= Vec3{d, d, d}; max += Vec3{d, d, d}; }
    Vec3 size() const { return max - min; }
    Vec3 center() const { return (min + max) * 0.5; }
    double diagonal() const { return empty() ? 0.0 : norm(max - min); }
    bool contains(const Vec3& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z &&
               p.z <= max.z;
    }
};

// Oriented plane n·x = offset with |n| = 1.
struct Plane {
    Vec3 normal{0, 0, 1};
    double offset = 0.0;

    double signed_distance(const Vec3& p) const { return dot(normal, p) - offset; }
    static Plane through_point(const Vec3& n, const Vec3& p) {
        Vec3 u = normalized(n);
        return {u, dot(u, p)};
    }
};

// Deterministic orthonormal basis (u, v, n) for a unit normal n.
inline void plane_basis(const Vec3& n, Vec3& u, Vec3& v) {
    Vec3 pick = std::abs(n.x) <= std::abs(n.y) && std::abs(n.x) <= std::abs(n.z)
                    ? Vec3{1, 0, 0}
                    : (std::abs(n.y) <= std::abs(n.z) ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    u = normalized(cross(pick, n));
    v = cross(n, u);
}

// Angle between two rotations in radians: angle of Ra^T * Rb.
inline double rotation_angle_between(const Mat3& a, const Mat3& b) {
    Mat3 d = a.transposed() * b;
    double tr = d(0, 0) + d(1, 1) + d(2, 2);
    double c = std::clamp((tr - 1.0) * 0.5, -1.0, 1.0);
    return std::acos(c);
}

// Cyclic Jacobi eigensolver for small symmetric matrices (n <= 4).
// Eigenvalues ascending; eigenvectors in columns of `vecs`.
template <int N>
void jacobi_eigen_symmetric(std::array<std::array<double, N>, N> a,
                            std::array<double, N>& values,
                            std::array<std::array<double, N>, N>& vecs) {
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) vecs[i][j] = (i == j) ? 1.0 : 0.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < N; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < N; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < N; ++k) {
                    double vkp = vecs[k][p], vkq = vecs[k][q];
                    vecs[k][p] = c * vkp - s * vkq;
                    vecs[k][q] = s * vkp + c * vkq;
                }
            }
    }
    // Selection sort by eigenvalue, swapping eigenvector columns along.
    for (int i = 0; i < N; ++i) values[i] = a[i][i];
    for (int i = 0; i < N - 1; ++i) {
        int best = i;
        for (int j = i + 1; j < N; ++j)
            if (values[j] < values[best]) best = j;
        if (best != i) {
            std::swap(values[i], values[best]);
            for (int k = 0; k < N; ++k) std::swap(vecs[k][i], vecs[k][best]);
        }
    }
}

}  // namespace shellforge
