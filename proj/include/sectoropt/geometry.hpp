#pragma once

// Planar geometry kernel. Coordinates are longitude/latitude degrees treated
// as Euclidean plane coordinates.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sectoropt {

/// Absolute tolerance for coincidence tests, in degrees.
inline constexpr double kEpsilon = 1e-9;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Degenerate or otherwise invalid geometric input.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// A segment runs collinear with a polygon edge; the caller decides how to
/// perturb and retry.
class GrazingContactError : public GeometryError {
public:
    GrazingContactError(const std::string& what, std::size_t edge)
        : GeometryError(what), edge_(edge) {}
    std::size_t edge() const noexcept { return edge_; }

private:
    std::size_t edge_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
inline Point lerp(Point a, Point b, double t) { return a + (b - a) * t; }

/// Signed shoelace area of a closed ring; positive when counterclockwise.
double signed_area(std::span<const Point> ring);

/// True when no two non-adjacent edges touch and adjacent edges do not fold
/// back onto each other.
bool is_simple_ring(std::span<const Point> ring);

/// Simple, counterclockwise polygon with at least three vertices.
class Polygon {
public:
    /// Throws GeometryError unless the ring is simple with positive area.
    /// A clockwise ring is rejected, not reversed.
    explicit Polygon(std::vector<Point> vertices);

    /// Reverses clockwise input before validating.
    static Polygon from_any_orientation(std::vector<Point> vertices);

    static std::optional<Polygon> try_make(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    std::size_t size() const noexcept { return vertices_.size(); }
    const Point& operator[](std::size_t i) const { return vertices_[i]; }
    Point edge_start(std::size_t i) const { return vertices_[i]; }
    Point edge_end(std::size_t i) const { return vertices_[(i + 1) % vertices_.size()]; }

private:
    std::vector<Point> vertices_;
};

struct BoundingBox {
    double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    bool overlaps(const BoundingBox& o, double tol = kEpsilon) const {
        return min_x <= o.max_x + tol && o.min_x <= max_x + tol &&
               min_y <= o.max_y + tol && o.min_y <= max_y + tol;
    }
};

BoundingBox bounding_box(std::span<const Point> pts);

double polygon_area(const Polygon& poly);

/// Counterclockwise hull with collinear points removed.
std::vector<Point> convex_hull(std::span<const Point> pts);

/// area(poly) / area(hull(poly)), in (0, 1].
double convexity_ratio(const Polygon& poly);

/// Interior angle at every vertex in degrees. Collinear vertices report
/// exactly 180.
std::vector<double> interior_angles(const Polygon& poly);

/// Closed containment: points on the boundary count as inside.
bool contains(const Polygon& poly, Point p);

/// Strict containment test on a raw ring, ignoring the boundary band.
bool ring_contains_strict(std::span<const Point> ring, Point p);

double point_segment_distance(Point p, Point a, Point b);
double segment_segment_distance(Point a, Point b, Point c, Point d);
double point_polygon_boundary_distance(Point p, const Polygon& poly);

/// Minimum distance between two polygons; zero when they overlap.
double polygon_distance(const Polygon& a, const Polygon& b);

enum class IntersectionKind { None, Point, Overlap };

struct SegmentIntersection {
    IntersectionKind kind = IntersectionKind::None;
    double t = 0.0;  ///< parameter on the first segment
    double u = 0.0;  ///< parameter on the second segment
};

SegmentIntersection intersect_segments(Point a, Point b, Point c, Point d);

struct Crossing {
    double t;            ///< parameter along the query segment, in [0, 1]
    std::size_t edge;    ///< index of the crossed polygon edge
    double angle_deg;    ///< acute angle between segment and edge, (0, 90]
};

/// Crossings of segment ab with the polygon boundary, ordered by t. A hit on
/// a polygon vertex is reported once, against the edge leaving that vertex.
/// Throws GrazingContactError when the segment overlaps an edge.
std::vector<Crossing> segment_polygon_crossings(Point a, Point b, const Polygon& poly);

/// Parameter sub-intervals of segment ab that lie inside the closed polygon.
/// Propagates GrazingContactError.
std::vector<std::pair<double, double>> segment_inside_intervals(Point a, Point b,
                                                                 const Polygon& poly);

/// Clips a polygon against a convex counterclockwise ring. May return fewer
/// than three points when the intersection is empty or degenerate.
std::vector<Point> clip_to_convex(std::span<const Point> subject, std::span<const Point> clip);

/// Keeps the part of the ring where dot(p, normal) <= offset.
std::vector<Point> clip_half_plane(std::span<const Point> subject, Point normal, double offset);

}  // namespace sectoropt
