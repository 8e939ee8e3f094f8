#include "sectoropt/geometry.hpp"

#include <algorithm>
#include <numbers>

namespace sectoropt {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

bool all_finite(std::span<const Point> pts) {
    return std::all_of(pts.begin(), pts.end(),
                       [](const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); });
}

double project_param(Point p, Point a, Point b) {
    const Point r = b - a;
    const double len2 = dot(r, r);
    return len2 > 0.0 ? dot(p - a, r) / len2 : 0.0;
}

}  // namespace

double signed_area(std::span<const Point> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    // Shifted to the first vertex to keep the sum well conditioned.
    const Point o = ring[0];
    double twice = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        twice += cross(ring[i] - o, ring[i + 1] - o);
    }
    return 0.5 * twice;
}

SegmentIntersection intersect_segments(Point a, Point b, Point c, Point d) {
    const Point r = b - a;
    const Point s = d - c;
    const double rl = norm(r);
    const double sl = norm(s);
    SegmentIntersection none;

    if (rl <= kEpsilon || sl <= kEpsilon) {
        if (rl <= kEpsilon && sl <= kEpsilon) {
            if (distance(a, c) <= kEpsilon) return {IntersectionKind::Point, 0.0, 0.0};
            return none;
        }
        if (rl <= kEpsilon) {
            if (point_segment_distance(a, c, d) <= kEpsilon)
                return {IntersectionKind::Point, 0.0, std::clamp(project_param(a, c, d), 0.0, 1.0)};
            return none;
        }
        if (point_segment_distance(c, a, b) <= kEpsilon)
            return {IntersectionKind::Point, std::clamp(project_param(c, a, b), 0.0, 1.0), 0.0};
        return none;
    }

    const Point qp = c - a;
    const double denom = cross(r, s);
    if (std::abs(denom) <= 1e-12 * rl * sl) {
        if (std::abs(cross(r, qp)) / rl > kEpsilon) return none;
        const double t0 = project_param(c, a, b);
        const double t1 = project_param(d, a, b);
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        const double tol = kEpsilon / rl;
        if (hi < lo - tol) return none;
        if (hi - lo <= tol) {
            const double t = std::clamp(0.5 * (lo + hi), 0.0, 1.0);
            return {IntersectionKind::Point, t,
                    std::clamp(project_param(lerp(a, b, t), c, d), 0.0, 1.0)};
        }
        return {IntersectionKind::Overlap, lo, std::clamp(project_param(lerp(a, b, lo), c, d), 0.0, 1.0)};
    }

    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    const double tol_t = kEpsilon / rl;
    const double tol_u = kEpsilon / sl;
    if (t >= -tol_t && t <= 1.0 + tol_t && u >= -tol_u && u <= 1.0 + tol_u) {
        return {IntersectionKind::Point, std::clamp(t, 0.0, 1.0), std::clamp(u, 0.0, 1.0)};
    }

    // Shallow angles: an endpoint may sit within tolerance of the other
    // segment while the line intersection lands outside both.
    if (point_segment_distance(c, a, b) <= kEpsilon)
        return {IntersectionKind::Point, std::clamp(project_param(c, a, b), 0.0, 1.0), 0.0};
    if (point_segment_distance(d, a, b) <= kEpsilon)
        return {IntersectionKind::Point, std::clamp(project_param(d, a, b), 0.0, 1.0), 1.0};
    if (point_segment_distance(a, c, d) <= kEpsilon)
        return {IntersectionKind::Point, 0.0, std::clamp(project_param(a, c, d), 0.0, 1.0)};
    if (point_segment_distance(b, c, d) <= kEpsilon)
        return {IntersectionKind::Point, 1.0, std::clamp(project_param(b, c, d), 0.0, 1.0)};
    return none;
}

bool is_simple_ring(std::span<const Point> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = ring[i];
        const Point b = ring[(i + 1) % n];
        if (distance(a, b) <= kEpsilon) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point c = ring[j];
            const Point d = ring[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            const auto hit = intersect_segments(a, b, c, d);
            if (adjacent) {
                if (hit.kind == IntersectionKind::Overlap) return false;
                if (n == 3) continue;
                // Adjacent edges may only meet at their shared vertex.
                if (hit.kind == IntersectionKind::Point) {
                    const Point shared = (j == i + 1) ? b : a;
                    if (distance(lerp(a, b, hit.t), shared) > kEpsilon) return false;
                }
                continue;
            }
            if (hit.kind != IntersectionKind::None) return false;
        }
    }
    return true;
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    if (!all_finite(vertices_)) throw GeometryError("polygon has non-finite coordinates");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        if (distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]) <= kEpsilon)
            throw GeometryError("polygon has coincident consecutive vertices at index " +
                                std::to_string(i));
    }
    const double area = signed_area(vertices_);
    if (std::abs(area) <= 1e-12) throw GeometryError("polygon is degenerate (zero area)");
    if (area < 0.0) throw GeometryError("polygon is clockwise");
    if (!is_simple_ring(vertices_)) throw GeometryError("polygon boundary self-intersects");
}

Polygon Polygon::from_any_orientation(std::vector<Point> vertices) {
    if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    return Polygon(std::move(vertices));
}

std::optional<Polygon> Polygon::try_make(std::vector<Point> vertices) {
    try {
        return Polygon(std::move(vertices));
    } catch (const GeometryError&) {
        return std::nullopt;
    }
}

BoundingBox bounding_box(std::span<const Point> pts) {
    BoundingBox box;
    if (pts.empty()) return box;
    box = {pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for (const auto& p : pts) {
        box.min_x = std::min(box.min_x, p.x);
        box.min_y = std::min(box.min_y, p.y);
        box.max_x = std::max(box.max_x, p.x);
        box.max_y = std::max(box.max_y, p.y);
    }
    return box;
}

double polygon_area(const Polygon& poly) { return signed_area(poly.vertices()); }

std::vector<Point> convex_hull(std::span<const Point> pts) {
    std::vector<Point> p(pts.begin(), pts.end());
    std::sort(p.begin(), p.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return p;

    std::vector<Point> hull(2 * p.size());
    std::size_t k = 0;
    for (const auto& q : p) {
        while (k >= 2 && cross(hull[k - 1] - hull[k - 2], q - hull[k - 2]) <= 0.0) --k;
        hull[k++] = q;
    }
    for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 1] - hull[k - 2], p[i] - hull[k - 2]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k - 1);
    return hull;
}

double convexity_ratio(const Polygon& poly) {
    const double area = polygon_area(poly);
    const auto hull = convex_hull(poly.vertices());
    const double hull_area = signed_area(hull);
    if (hull_area <= 0.0) throw GeometryError("convex hull is degenerate");
    const double ratio = area / hull_area;
    // Hull of a convex polygon differs from it only by rounding.
    return ratio > 1.0 - kEpsilon ? 1.0 : ratio;
}

std::vector<double> interior_angles(const Polygon& poly) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<double> angles(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Point prev = v[(i + n - 1) % n];
        const Point next = v[(i + 1) % n];
        const Point a = v[i] - prev;
        const Point b = next - v[i];
        const double la = norm(a);
        const double lb = norm(b);
        if (la <= kEpsilon || lb <= kEpsilon)
            throw GeometryError("degenerate vertex " + std::to_string(i));
        const double c = cross(a, b);
        const double d = dot(a, b);
        if (std::abs(c) <= 1e-12 * la * lb) {
            if (d < 0.0) throw GeometryError("spike at vertex " + std::to_string(i));
            angles[i] = 180.0;
            continue;
        }
        const double turn = std::atan2(c, d) * kRadToDeg;
        angles[i] = 180.0 - turn;
    }
    return angles;
}

double point_segment_distance(Point p, Point a, Point b) {
    const double t = std::clamp(project_param(p, a, b), 0.0, 1.0);
    return distance(p, lerp(a, b, t));
}

double segment_segment_distance(Point a, Point b, Point c, Point d) {
    if (intersect_segments(a, b, c, d).kind != IntersectionKind::None) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

double point_polygon_boundary_distance(Point p, const Polygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        best = std::min(best, point_segment_distance(p, poly.edge_start(i), poly.edge_end(i)));
    }
    return best;
}

bool ring_contains_strict(std::span<const Point> ring, Point p) {
    bool inside = false;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = ring[i];
        const Point b = ring[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool contains(const Polygon& poly, Point p) {
    if (point_polygon_boundary_distance(p, poly) <= kEpsilon) return true;
    return ring_contains_strict(poly.vertices(), p);
}

double polygon_distance(const Polygon& a, const Polygon& b) {
    if (contains(a, b[0]) || contains(b, a[0])) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            best = std::min(best, segment_segment_distance(a.edge_start(i), a.edge_end(i),
                                                           b.edge_start(j), b.edge_end(j)));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

std::vector<Crossing> segment_polygon_crossings(Point a, Point b, const Polygon& poly) {
    const Point r = b - a;
    const double rl = norm(r);
    if (rl <= kEpsilon) throw GeometryError("segment is degenerate");
    std::vector<Crossing> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Point c = poly.edge_start(i);
        const Point d = poly.edge_end(i);
        const auto hit = intersect_segments(a, b, c, d);
        if (hit.kind == IntersectionKind::None) continue;
        if (hit.kind == IntersectionKind::Overlap)
            throw GrazingContactError("segment runs along polygon edge " + std::to_string(i), i);
        const double el = norm(d - c);
        if (hit.u >= 1.0 - kEpsilon / el) continue;  // reported by the next edge
        const double cosang = std::min(1.0, std::abs(dot(r, d - c)) / (rl * el));
        double angle = std::acos(cosang) * kRadToDeg;
        if (angle <= 0.0) angle = std::numeric_limits<double>::min();
        out.push_back({hit.t, i, angle});
    }
    std::sort(out.begin(), out.end(), [](const Crossing& x, const Crossing& y) {
        return x.t < y.t || (x.t == y.t && x.edge < y.edge);
    });
    return out;
}

std::vector<std::pair<double, double>> segment_inside_intervals(Point a, Point b,
                                                                 const Polygon& poly) {
    std::vector<std::pair<double, double>> out;
    if (distance(a, b) <= kEpsilon) {
        if (contains(poly, a)) out.emplace_back(0.0, 1.0);
        return out;
    }
    std::vector<double> ts{0.0, 1.0};
    for (const auto& c : segment_polygon_crossings(a, b, poly)) ts.push_back(c.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end(),
                         [](double x, double y) { return std::abs(x - y) <= 1e-12; }),
             ts.end());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        const double lo = ts[i];
        const double hi = ts[i + 1];
        if (!contains(poly, lerp(a, b, 0.5 * (lo + hi)))) continue;
        if (!out.empty() && std::abs(out.back().second - lo) <= 1e-12) {
            out.back().second = hi;
        } else {
            out.emplace_back(lo, hi);
        }
    }
    return out;
}

std::vector<Point> clip_half_plane(std::span<const Point> subject, Point normal, double offset) {
    std::vector<Point> out;
    const std::size_t n = subject.size();
    if (n == 0) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const Point cur = subject[i];
        const Point nxt = subject[(i + 1) % n];
        const double dc = dot(cur, normal) - offset;
        const double dn = dot(nxt, normal) - offset;
        if (dc <= 0.0) out.push_back(cur);
        if ((dc < 0.0 && dn > 0.0) || (dc > 0.0 && dn < 0.0)) {
            out.push_back(lerp(cur, nxt, dc / (dc - dn)));
        }
    }
    return out;
}

std::vector<Point> clip_to_convex(std::span<const Point> subject, std::span<const Point> clip) {
    std::vector<Point> out(subject.begin(), subject.end());
    const std::size_t n = clip.size();
    for (std::size_t i = 0; i < n && !out.empty(); ++i) {
        const Point a = clip[i];
        const Point r = clip[(i + 1) % n] - a;
        const Point normal{r.y, -r.x};
        out = clip_half_plane(out, normal, dot(a, normal));
    }
    return out;
}

}  // namespace sectoropt
