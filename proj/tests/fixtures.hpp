#pragma once

#include <map>
#include <random>
#include <utility>
#include <vector>

#include "sectoropt/cost_model.hpp"
#include "sectoropt/local_search.hpp"
#include "sectoropt/scenario.hpp"
#include "sectoropt/subdivision.hpp"

namespace fixtures {

using namespace sectoropt;

// Derives edges from the face loops; an edge used by one face is outer.
inline PlanarSubdivision from_loops(std::vector<Point> points, std::vector<std::vector<std::size_t>> loops) {
    std::map<std::pair<std::size_t, std::size_t>, int> uses;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (const auto& loop : loops) {
        for (std::size_t i = 0; i < loop.size(); ++i) {
            auto a = loop[i], b = loop[(i + 1) % loop.size()];
            auto key = std::minmax(a, b);
            if (uses[key]++ == 0) order.push_back({a, b});
        }
    }
    std::vector<SubdivisionEdge> edges;
    for (const auto& [a, b] : order) edges.push_back({a, b, uses[std::minmax(a, b)] == 1});
    std::vector<Sector> sectors;
    for (std::size_t i = 0; i < loops.size(); ++i) sectors.push_back({"S" + std::to_string(i + 1), loops[i]});
    return PlanarSubdivision(std::move(points), std::move(edges), std::move(sectors));
}

// Unit square split by a vertical cut at x = c.
//  3---4---5
//  | 0 | 1 |
//  0---1---2
inline PlanarSubdivision two_rectangles(double c = 0.5, double width = 1.0, double height = 1.0) {
    return from_loops({{0, 0}, {c, 0}, {width, 0}, {0, height}, {c, height}, {width, height}},
                      {{0, 1, 4, 3}, {1, 2, 5, 4}});
}

// Four sectors in [0,2]^2 around the interior edge u=(0.8,1) -> v=(1.2,1).
// Both endpoints have degree 3, so the edge can be flipped.
inline PlanarSubdivision flip_pinwheel() {
    std::vector<Point> p{{0, 0}, {0.8, 0}, {2, 0}, {2, 2}, {1.2, 2}, {0, 2}, {0, 1}, {2, 1}, {0.8, 1}, {1.2, 1}};
    // 0 BL, 1 BR, 2 TR, 3 TL
    return from_loops(std::move(p), {{0, 1, 8, 6}, {1, 2, 7, 9, 8}, {9, 7, 3, 4}, {6, 8, 9, 4, 5}});
}

// nx x ny grid of rectangles over [x0, x0+w] x [y0, y0+h].
inline PlanarSubdivision grid(std::size_t nx, std::size_t ny, double x0 = 0, double y0 = 0, double w = 1,
                              double h = 1) {
    std::vector<Point> pts;
    for (std::size_t j = 0; j <= ny; ++j)
        for (std::size_t i = 0; i <= nx; ++i) pts.push_back({x0 + w * i / nx, y0 + h * j / ny});
    auto id = [&](std::size_t i, std::size_t j) { return j * (nx + 1) + i; };
    std::vector<std::vector<std::size_t>> loops;
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i) loops.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    return from_loops(std::move(pts), std::move(loops));
}

// Moves every interior vertex by up to `amount` in each axis; keeps the
// subdivision valid as long as amount is under half a cell.
inline PlanarSubdivision jitter(PlanarSubdivision sub, double amount, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-amount, amount);
    for (std::size_t v = 0; v < sub.vertices().size(); ++v) {
        if (sub.role(v) != VertexRole::Interior) continue;
        const Point p = sub.vertices()[v];
        const double dx = u(rng);
        const double dy = u(rng);
        sub = sub.with_vertex_position(v, {p.x + dx, p.y + dy});
    }
    return sub;
}

// Straight two-sample track.
inline Trajectory line_track(const std::string& id, Point a, Point b, double t0, double t1) {
    return Trajectory(id, {{t0, a}, {t1, b}});
}

// Random straight tracks with endpoints in [lo, hi]^2 and times in [0, horizon].
inline std::vector<Trajectory> random_tracks(std::mt19937_64& rng, std::size_t n, double lo, double hi,
                                             double horizon) {
    std::uniform_real_distribution<double> pos(lo, hi);
    std::uniform_real_distribution<double> time(0.0, horizon);
    std::vector<Trajectory> out;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a{pos(rng), pos(rng)};
        const Point b{pos(rng), pos(rng)};
        double t0 = time(rng), t1 = time(rng);
        if (t0 > t1) std::swap(t0, t1);
        if (t1 - t0 < 1.0) t1 = t0 + 1.0;
        out.push_back(line_track("F" + std::to_string(i), a, b, t0, t1));
    }
    return out;
}

// Constraint table with every weight zero.
inline ConstraintTable silent_table() {
    auto t = default_constraint_table();
    for (auto& c : t) c.weight = 0.0;
    return t;
}

}  // namespace fixtures
