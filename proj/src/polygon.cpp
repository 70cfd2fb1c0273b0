#include "shellforge/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

namespace shellforge {

namespace {

inline double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

struct Vert {
    Vec2 p;
    std::uint32_t index;  // into the concatenated point list
};

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double eps) {
    double d0 = cross2(a, b, p);
    double d1 = cross2(b, c, p);
    double d2 = cross2(c, a, p);
    return d0 >= -eps && d1 >= -eps && d2 >= -eps;
}

// Eberly-style hole merge: connect the hole's rightmost vertex to a visible
// vertex of the enclosing polygon with a doubled bridge edge.
void merge_hole(std::vector<Vert>& poly, const std::vector<Vert>& hole) {
    std::size_t hm = 0;
    for (std::size_t i = 1; i < hole.size(); ++i)
        if (hole[i].p.x > hole[hm].p.x) hm = i;
    const Vec2 m = hole[hm].p;

    // Closest edge intersection with the +x ray from m.
    double best_t = std::numeric_limits<double>::infinity();
    std::size_t best_edge = SIZE_MAX;
    Vec2 hit{0, 0};
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i].p;
        const Vec2& b = poly[(i + 1) % poly.size()].p;
        if ((a.y > m.y) == (b.y > m.y)) continue;  // edge does not straddle the ray
        double t = a.x + (m.y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (t >= m.x - 1e-12 && t - m.x < best_t) {
            best_t = t - m.x;
            best_edge = i;
            hit = {t, m.y};
        }
    }
    std::size_t bridge;
    if (best_edge == SIZE_MAX) {
        // No straddling edge (degenerate layout): fall back to the nearest
        // vertex to the right, or the nearest overall.
        bridge = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < poly.size(); ++i) {
            double d = std::hypot(poly[i].p.x - m.x, poly[i].p.y - m.y);
            if (d < best) {
                best = d;
                bridge = i;
            }
        }
    } else {
        // Candidate: the straddling edge's endpoint with the larger x; then
        // prefer any reflex vertex inside triangle (m, hit, candidate) that
        // minimizes the angle to the ray (standard visibility fix-up).
        const Vec2& a = poly[best_edge].p;
        const Vec2& b = poly[(best_edge + 1) % poly.size()].p;
        bridge = a.x >= b.x ? best_edge : (best_edge + 1) % poly.size();
        double best_metric = std::numeric_limits<double>::infinity();
        bool found = false;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            if (i == bridge) continue;
            const Vec2& q = poly[i].p;
            if (q.x <= m.x) continue;
            if (!point_in_triangle(q, m, hit, poly[bridge].p, 1e-12)) continue;
            double dx = q.x - m.x, dy = std::abs(q.y - m.y);
            double metric = std::atan2(dy, dx);
            if (!found || metric < best_metric ||
                (metric == best_metric && dx < std::hypot(poly[bridge].p.x - m.x,
                                                          poly[bridge].p.y - m.y))) {
                best_metric = metric;
                bridge = i;
                found = true;
            }
        }
    }

    // Splice: ... bridge, [hole from hm around], hm, bridge, ...
    std::vector<Vert> merged;
    merged.reserve(poly.size() + hole.size() + 2);
    for (std::size_t i = 0; i <= bridge; ++i) merged.push_back(poly[i]);
    for (std::size_t i = 0; i <= hole.size(); ++i)
        merged.push_back(hole[(hm + i) % hole.size()]);
    merged.push_back(poly[bridge]);
    for (std::size_t i = bridge + 1; i < poly.size(); ++i) merged.push_back(poly[i]);
    poly = std::move(merged);
}

}  // namespace

double polygon_signed_area(const std::vector<Vec2>& loop) {
    double a = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec2& p = loop[i];
        const Vec2& q = loop[(i + 1) % loop.size()];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

bool point_in_polygon(const Vec2& p, const std::vector<Vec2>& loop) {
    bool in = false;
    for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) in = !in;
        }
    }
    return in;
}

std::vector<std::array<std::uint32_t, 3>> triangulate_with_holes(
    const std::vector<Vec2>& outer, const std::vector<std::vector<Vec2>>& holes) {
    std::vector<std::array<std::uint32_t, 3>> out;
    if (outer.size() < 3) return out;

    // Scale-aware epsilon for collinearity and containment checks.
    double span = 0.0;
    for (const Vec2& p : outer) span = std::max({span, std::abs(p.x), std::abs(p.y)});
    const double eps = std::max(1e-30, span * span * 1e-14);

    std::vector<Vert> poly;
    poly.reserve(outer.size());
    std::uint32_t next_index = 0;
    for (const Vec2& p : outer) poly.push_back({p, next_index++});

    // Merge holes right-to-left so bridges never cross earlier ones.
    std::vector<std::vector<Vert>> hole_verts;
    for (const auto& h : holes) {
        std::vector<Vert> hv;
        for (const Vec2& p : h) hv.push_back({p, next_index++});
        hole_verts.push_back(std::move(hv));
    }
    std::sort(hole_verts.begin(), hole_verts.end(), [](const auto& a, const auto& b) {
        double ma = -1e300, mb = -1e300;
        for (const auto& v : a) ma = std::max(ma, v.p.x);
        for (const auto& v : b) mb = std::max(mb, v.p.x);
        return ma > mb;
    });
    for (const auto& hv : hole_verts)
        if (hv.size() >= 3) merge_hole(poly, hv);

    // Ear clipping over a doubly linked list, scanning reflex vertices only.
    const std::size_t n = poly.size();
    std::vector<std::size_t> prev(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
        prev[i] = (i + n - 1) % n;
        next[i] = (i + 1) % n;
    }
    auto is_convex = [&](std::size_t i) {
        return cross2(poly[prev[i]].p, poly[i].p, poly[next[i]].p) > -eps;
    };
    std::vector<char> reflex(n);
    std::size_t alive = n;
    for (std::size_t i = 0; i < n; ++i) reflex[i] = !is_convex(i);

    auto is_ear = [&](std::size_t i) {
        if (reflex[i]) return false;
        const Vec2& a = poly[prev[i]].p;
        const Vec2& b = poly[i].p;
        const Vec2& c = poly[next[i]].p;
        for (std::size_t r = 0; r < n; ++r) {
            if (!reflex[r]) continue;
            if (r == prev[i] || r == i || r == next[i]) continue;
            // Duplicated bridge vertices share coordinates with the ear's
            // corners; they never block it.
            const Vec2& q = poly[r].p;
            if ((q.x == a.x && q.y == a.y) || (q.x == b.x && q.y == b.y) ||
                (q.x == c.x && q.y == c.y))
                continue;
            if (point_in_triangle(q, a, b, c, -eps)) return false;
        }
        return true;
    };

    std::size_t cur = 0;
    std::size_t stall = 0;
    while (alive > 3) {
        if (is_ear(cur)) {
            out.push_back({poly[prev[cur]].index, poly[cur].index, poly[next[cur]].index});
            std::size_t p = prev[cur], q = next[cur];
            next[p] = q;
            prev[q] = p;
            reflex[cur] = false;
            reflex[p] = !is_convex(p);
            reflex[q] = !is_convex(q);
            --alive;
            cur = q;
            stall = 0;
        } else {
            cur = next[cur];
            if (++stall > alive) {
                // Numeric stall: clip the flattest convex corner to make
                // progress; topology stays closed even if slivers appear.
                std::size_t pick = SIZE_MAX;
                double best = std::numeric_limits<double>::infinity();
                std::size_t it = cur;
                for (std::size_t s = 0; s < alive; ++s, it = next[it]) {
                    double a = std::abs(cross2(poly[prev[it]].p, poly[it].p, poly[next[it]].p));
                    if (!reflex[it] && a < best) {
                        best = a;
                        pick = it;
                    }
                }
                if (pick == SIZE_MAX) pick = cur;
                out.push_back(
                    {poly[prev[pick]].index, poly[pick].index, poly[next[pick]].index});
                std::size_t p = prev[pick], q = next[pick];
                next[p] = q;
                prev[q] = p;
                reflex[pick] = false;
                reflex[p] = !is_convex(p);
                reflex[q] = !is_convex(q);
                --alive;
                cur = q;
                stall = 0;
            }
        }
    }
    out.push_back({poly[prev[cur]].index, poly[cur].index, poly[next[cur]].index});
    return out;
}

}  // namespace shellforge
