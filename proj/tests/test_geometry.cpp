#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "sectoropt/geometry.hpp"

using namespace sectoropt;

namespace {

const Polygon kSquare({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
const Polygon kL({{0, 0}, {1, 0}, {1, 0.5}, {0.5, 0.5}, {0.5, 1}, {0, 1}});

// Star-shaped random polygon around the origin.
Polygon random_star(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> r(0.3, 1.0);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    std::vector<Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 2 * std::numbers::pi * (i + 0.5 + jitter(rng)) / n;
        const double rad = r(rng);
        pts.push_back({rad * std::cos(a), rad * std::sin(a)});
    }
    return Polygon(pts);
}

bool in_triangle(Point p, Point a, Point b, Point c) {
    const double d1 = cross(b - a, p - a), d2 = cross(c - b, p - b), d3 = cross(a - c, p - c);
    const bool neg = d1 < 0 || d2 < 0 || d3 < 0;
    const bool pos = d1 > 0 || d2 > 0 || d3 > 0;
    return !(neg && pos);
}

// Hull area by brute force: keep points outside every triangle of the others.
double brute_hull_area(const std::vector<Point>& pts) {
    std::vector<Point> hull;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        bool inside = false;
        for (std::size_t a = 0; a < n && !inside; ++a)
            for (std::size_t b = a + 1; b < n && !inside; ++b)
                for (std::size_t c = b + 1; c < n && !inside; ++c)
                    if (a != i && b != i && c != i && in_triangle(pts[i], pts[a], pts[b], pts[c])) inside = true;
        if (!inside) hull.push_back(pts[i]);
    }
    Point center{0, 0};
    for (auto p : hull) center = center + p * (1.0 / hull.size());
    std::sort(hull.begin(), hull.end(), [&](Point a, Point b) {
        return std::atan2(a.y - center.y, a.x - center.x) < std::atan2(b.y - center.y, b.x - center.x);
    });
    return signed_area(hull);
}

}  // namespace

TEST_CASE("polygon area") {
    CHECK(polygon_area(kSquare) == doctest::Approx(1.0));
    CHECK(polygon_area(Polygon({{0, 0}, {1, 0}, {0, 1}})) == doctest::Approx(0.5));
    CHECK(polygon_area(kL) == doctest::Approx(0.75));
    CHECK_THROWS_AS(Polygon({{0, 0}, {1, 0}, {2, 0}}), GeometryError);
    CHECK_THROWS_AS(Polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), GeometryError);  // clockwise
    CHECK(polygon_area(Polygon::from_any_orientation({{0, 0}, {0, 1}, {1, 1}, {1, 0}})) == doctest::Approx(1.0));
}

TEST_CASE("convexity ratio") {
    CHECK(convexity_ratio(kSquare) == 1.0);
    CHECK(convexity_ratio(Polygon({{0, 0}, {2, 0}, {3, 1}, {1, 2}, {-0.5, 1}})) == 1.0);
    CHECK(convexity_ratio(kL) == doctest::Approx(0.75 / 0.875));

    std::vector<Point> star;
    for (int i = 0; i < 10; ++i) {
        const double a = std::numbers::pi / 2 + i * std::numbers::pi / 5;
        const double r = i % 2 == 0 ? 1.0 : 0.4;
        star.push_back({r * std::cos(a), r * std::sin(a)});
    }
    const Polygon poly(star);
    const double expected = polygon_area(poly) / brute_hull_area(star);
    CHECK(convexity_ratio(poly) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(convexity_ratio(poly) > 0.0);
    CHECK(convexity_ratio(poly) < 1.0);
}

TEST_CASE("convexity ratio matches the brute-force hull on random polygons") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const auto poly = random_star(rng, 8);
        const double expected = polygon_area(poly) / brute_hull_area(poly.vertices());
        CHECK(convexity_ratio(poly) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("interior angles") {
    for (double a : interior_angles(kSquare)) CHECK(a == doctest::Approx(90.0));
    const Polygon tri({{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}});
    for (double a : interior_angles(tri)) CHECK(a == doctest::Approx(60.0));
    const auto l = interior_angles(kL);
    REQUIRE(l.size() == 6);
    CHECK(std::count_if(l.begin(), l.end(), [](double a) { return std::abs(a - 270.0) < 1e-9; }) == 1);
    CHECK(std::count_if(l.begin(), l.end(), [](double a) { return std::abs(a - 90.0) < 1e-9; }) == 5);
    CHECK(l[3] == doctest::Approx(270.0));
    // A collinear vertex is a straight angle.
    const auto flat = interior_angles(Polygon({{0, 0}, {0.5, 0}, {1, 0}, {1, 1}, {0, 1}}));
    CHECK(flat[1] == 180.0);
}

TEST_CASE("interior angles sum to (n - 2) * 180") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 3 + trial % 9;
        const auto poly = random_star(rng, n);
        double sum = 0.0;
        for (double a : interior_angles(poly)) {
            CHECK(a > 0.0);
            CHECK(a < 360.0);
            sum += a;
        }
        CHECK(sum == doctest::Approx((n - 2) * 180.0).epsilon(1e-9));
    }
}

TEST_CASE("segment crossings") {
    auto c = segment_polygon_crossings({-1, 0.5}, {2, 0.5}, kSquare);
    REQUIRE(c.size() == 2);
    CHECK(c[0].t == doctest::Approx(1.0 / 3));
    CHECK(c[1].t == doctest::Approx(2.0 / 3));
    CHECK(c[0].angle_deg == doctest::Approx(90.0));
    CHECK(c[1].angle_deg == doctest::Approx(90.0));
    CHECK(c[0].edge == 3);
    CHECK(c[1].edge == 1);

    CHECK(segment_polygon_crossings({0.2, 0.2}, {0.8, 0.7}, kSquare).empty());

    c = segment_polygon_crossings({-1, -1}, {2, 2}, kSquare);
    REQUIRE(c.size() == 2);
    CHECK(c[0].t == doctest::Approx(1.0 / 3));
    CHECK(c[1].t == doctest::Approx(2.0 / 3));
    CHECK(c[0].angle_deg == doctest::Approx(45.0));
    CHECK(c[1].angle_deg == doctest::Approx(45.0));

    CHECK_THROWS_AS(segment_polygon_crossings({-1, 0}, {2, 0}, kSquare), GrazingContactError);
}

TEST_CASE("crossing parity matches containment") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto poly = random_star(rng, 3 + trial % 7);
        for (int k = 0; k < 50; ++k) {
            const Point a{u(rng), u(rng)}, b{u(rng), u(rng)};
            if (point_polygon_boundary_distance(a, poly) < 1e-6 || point_polygon_boundary_distance(b, poly) < 1e-6)
                continue;
            const auto hits = segment_polygon_crossings(a, b, poly);
            CHECK((hits.size() % 2 == 1) == (contains(poly, a) != contains(poly, b)));
            for (std::size_t i = 1; i < hits.size(); ++i) CHECK(hits[i - 1].t <= hits[i].t);
            for (const auto& h : hits) {
                CHECK(h.angle_deg > 0.0);
                CHECK(h.angle_deg <= 90.0);
            }
        }
    }
}

TEST_CASE("inside intervals") {
    const auto iv = segment_inside_intervals({-1, 0.5}, {2, 0.5}, kSquare);
    REQUIRE(iv.size() == 1);
    CHECK(iv[0].first == doctest::Approx(1.0 / 3));
    CHECK(iv[0].second == doctest::Approx(2.0 / 3));
    // Two visits through the notch of the L.
    const auto two = segment_inside_intervals({0.25, 1.5}, {0.75, -0.5}, kL);
    CHECK(!two.empty());
    CHECK(segment_inside_intervals({2, 2}, {3, 3}, kSquare).empty());
}

TEST_CASE("distances") {
    CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == doctest::Approx(1.0));
    CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == doctest::Approx(2.0));
    CHECK(segment_segment_distance({0, 0}, {1, 0}, {0, 1}, {1, 1}) == doctest::Approx(1.0));
    CHECK(segment_segment_distance({0, 0}, {1, 1}, {0, 1}, {1, 0}) == 0.0);
    CHECK(point_polygon_boundary_distance({0.5, 0.5}, kSquare) == doctest::Approx(0.5));
    CHECK(polygon_distance(kSquare, Polygon({{2, 0}, {3, 0}, {3, 1}, {2, 1}})) == doctest::Approx(1.0));
    CHECK(polygon_distance(kSquare, Polygon({{0.5, 0.5}, {3, 0}, {3, 1}})) == 0.0);
}

TEST_CASE("convex hull and clipping") {
    const auto hull = convex_hull(kL.vertices());
    CHECK(hull.size() == 5);
    CHECK(signed_area(hull) == doctest::Approx(0.875));
    const auto clipped = clip_to_convex(Polygon({{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}}).vertices(),
                                        kSquare.vertices());
    CHECK(signed_area(clipped) == doctest::Approx(0.25));
    const auto half = clip_half_plane(kSquare.vertices(), {1, 0}, 0.25);
    CHECK(signed_area(half) == doctest::Approx(0.25));
}

TEST_CASE("point to boundary distance over a subdivision") {
    const auto whole = fixtures::from_loops({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2, 3}});
    CHECK(point_to_boundary_distance({0.5, 0.5}, whole) == doctest::Approx(0.5));
    CHECK(point_to_boundary_distance({1, 0.3}, whole) == 0.0);
    CHECK(point_to_boundary_distance({0.25, 0.5}, fixtures::two_rectangles()) == doctest::Approx(0.25));
}
