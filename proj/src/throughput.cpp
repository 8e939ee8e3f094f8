#include "sectoropt/throughput.hpp"

#include <algorithm>
#include <limits>

namespace sectoropt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coordinates in the flow frame: x along the flow, y to its left.
std::vector<Point> to_frame(std::span<const Point> ring, Point dir) {
    const Point left{-dir.y, dir.x};
    std::vector<Point> out;
    out.reserve(ring.size());
    for (const auto& p : ring) out.push_back({dot(p, dir), dot(p, left)});
    return out;
}

struct Section {
    double lo = kInf;
    double hi = -kInf;
    bool empty() const { return lo > hi; }
};

Section section_at(std::span<const Point> ring, double u) {
    Section s;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = ring[i];
        const Point b = ring[(i + 1) % n];
        const double lo = std::min(a.x, b.x);
        const double hi = std::max(a.x, b.x);
        if (u < lo - kEpsilon || u > hi + kEpsilon) continue;
        if (hi - lo <= kEpsilon) {
            s.lo = std::min({s.lo, a.y, b.y});
            s.hi = std::max({s.hi, a.y, b.y});
            continue;
        }
        const double t = std::clamp((u - a.x) / (b.x - a.x), 0.0, 1.0);
        const double v = a.y + t * (b.y - a.y);
        s.lo = std::min(s.lo, v);
        s.hi = std::max(s.hi, v);
    }
    return s;
}

bool rings_overlap(std::span<const Point> a, std::span<const Point> b) {
    if (ring_contains_strict(a, b[0]) || ring_contains_strict(b, a[0])) return true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (intersect_segments(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()]).kind !=
                IntersectionKind::None)
                return true;
        }
    }
    return false;
}

double ring_distance(std::span<const Point> a, std::span<const Point> b) {
    if (rings_overlap(a, b)) return 0.0;
    double best = kInf;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            best = std::min(best, segment_segment_distance(a[i], a[(i + 1) % a.size()], b[j],
                                                           b[(j + 1) % b.size()]));
        }
    }
    return best;
}

std::vector<Point> drop_near_duplicates(std::vector<Point> ring) {
    std::vector<Point> out;
    for (const auto& p : ring) {
        if (out.empty() || distance(out.back(), p) > kEpsilon) out.push_back(p);
    }
    while (out.size() > 1 && distance(out.front(), out.back()) <= kEpsilon) out.pop_back();
    return out;
}

// Perpendicular gap between an obstacle and one bank of the hull section.
double bank_gap(std::span<const Point> hull_f, std::span<const Point> obstacle_f, bool left_bank) {
    double umin = kInf, umax = -kInf;
    for (const auto& p : obstacle_f) {
        umin = std::min(umin, p.x);
        umax = std::max(umax, p.x);
    }
    std::vector<double> us;
    for (const auto& p : obstacle_f) us.push_back(p.x);
    for (const auto& p : hull_f) {
        if (p.x >= umin && p.x <= umax) us.push_back(p.x);
    }
    double best = kInf;
    for (double u : us) {
        const Section hull = section_at(hull_f, u);
        const Section obs = section_at(obstacle_f, u);
        if (hull.empty() || obs.empty()) continue;
        const double gap = left_bank ? hull.hi - obs.hi : obs.lo - hull.lo;
        best = std::min(best, std::max(0.0, gap));
    }
    return best;
}

}  // namespace

std::optional<FlowFrame> flow_frame(const Polygon& sector, std::span<const Point> flow) {
    std::vector<Point> inside;
    for (std::size_t i = 0; i + 1 < flow.size(); ++i) {
        Point a = flow[i];
        Point b = flow[i + 1];
        std::vector<std::pair<double, double>> pieces;
        try {
            pieces = segment_inside_intervals(a, b, sector);
        } catch (const GrazingContactError&) {
            const Point d = b - a;
            const Point shift = Point{-d.y, d.x} * (1e-7 / norm(d));
            a = a + shift;
            b = b + shift;
            pieces = segment_inside_intervals(a, b, sector);
        }
        for (const auto& [lo, hi] : pieces) {
            inside.push_back(lerp(a, b, lo));
            inside.push_back(lerp(a, b, hi));
        }
    }
    if (inside.size() < 2) return std::nullopt;
    const Point chord = inside.back() - inside.front();
    const double len = norm(chord);
    if (len <= kEpsilon) return std::nullopt;
    FlowFrame frame{chord * (1.0 / len), kInf, -kInf};
    for (const auto& p : inside) {
        const double u = dot(p, frame.direction);
        frame.span_start = std::min(frame.span_start, u);
        frame.span_end = std::max(frame.span_end, u);
    }
    return frame;
}

CutGraph build_cut_graph(const Polygon& sector, Point direction, std::span<const Polygon> obstacles,
                         std::optional<std::pair<double, double>> span) {
    const double len = norm(direction);
    if (len <= kEpsilon) throw GeometryError("flow direction is degenerate");
    const Point dir = direction * (1.0 / len);

    // Non-convex sectors are approximated by their hull.
    const auto hull = convex_hull(sector.vertices());
    const auto hull_f = to_frame(hull, dir);
    double s0 = kInf, s1 = -kInf;
    for (const auto& p : hull_f) {
        s0 = std::min(s0, p.x);
        s1 = std::max(s1, p.x);
    }
    if (span) {
        s0 = std::max(s0, span->first);
        s1 = std::min(s1, span->second);
    }

    CutGraph graph;
    for (const auto& obstacle : obstacles) {
        auto clipped = clip_to_convex(obstacle.vertices(), hull);
        clipped = clip_half_plane(clipped, dir * -1.0, -s0);
        clipped = clip_half_plane(clipped, dir, s1);
        clipped = drop_near_duplicates(std::move(clipped));
        if (clipped.size() < 3 || signed_area(clipped) <= 1e-12) continue;
        graph.obstacles.push_back(std::move(clipped));
    }

    const std::size_t n = graph.obstacles.size() + 2;
    graph.clearance.assign(n, std::vector<double>(n, 0.0));

    double width = kInf;
    std::vector<double> us{s0, s1};
    for (const auto& p : hull_f) {
        if (p.x > s0 && p.x < s1) us.push_back(p.x);
    }
    for (double u : us) {
        const Section s = section_at(hull_f, u);
        if (!s.empty()) width = std::min(width, s.hi - s.lo);
    }
    if (!std::isfinite(width)) width = 0.0;
    graph.clearance[0][1] = graph.clearance[1][0] = width;

    std::vector<std::vector<Point>> frames;
    for (const auto& ring : graph.obstacles) frames.push_back(to_frame(ring, dir));
    for (std::size_t i = 0; i < frames.size(); ++i) {
        const double left = bank_gap(hull_f, frames[i], true);
        const double right = bank_gap(hull_f, frames[i], false);
        graph.clearance[0][i + 2] = graph.clearance[i + 2][0] = left;
        graph.clearance[1][i + 2] = graph.clearance[i + 2][1] = right;
        for (std::size_t j = i + 1; j < frames.size(); ++j) {
            const double d = ring_distance(graph.obstacles[i], graph.obstacles[j]);
            graph.clearance[i + 2][j + 2] = graph.clearance[j + 2][i + 2] = d;
        }
    }
    return graph;
}

int lanes_in_gap(double width, double lane_width) {
    if (!(lane_width > 0.0)) throw InputError("lane width must be positive");
    if (!(width > 0.0)) return 0;
    // Tolerance keeps exact multiples (0.2 / 0.1) from rounding down.
    return static_cast<int>(std::floor(width / lane_width + 1e-9));
}

int min_cut_lanes(const CutGraph& graph, double lane_width) {
    const std::size_t n = graph.node_count();
    std::vector<long long> dist(n, std::numeric_limits<long long>::max());
    std::vector<bool> done(n, false);
    dist[CutGraph::kLeftBank] = 0;
    for (std::size_t iter = 0; iter < n; ++iter) {
        std::size_t u = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!done[i] && (u == n || dist[i] < dist[u])) u = i;
        }
        if (u == n || dist[u] == std::numeric_limits<long long>::max()) break;
        done[u] = true;
        if (u == CutGraph::kRightBank) break;
        for (std::size_t v = 0; v < n; ++v) {
            if (v == u || done[v]) continue;
            const long long w = lanes_in_gap(graph.clearance[u][v], lane_width);
            dist[v] = std::min(dist[v], dist[u] + w);
        }
    }
    return static_cast<int>(dist[CutGraph::kRightBank]);
}

std::optional<int> lane_count(const Polygon& sector, std::span<const Point> flow,
                              std::span<const WeatherObstacle> obstacles, double lane_width,
                              std::optional<Horizon> horizon) {
    if (!(lane_width > 0.0)) throw InputError("lane width must be positive");
    const auto frame = flow_frame(sector, flow);
    if (!frame) return std::nullopt;
    std::vector<Polygon> active;
    for (const auto& o : obstacles) {
        if (!horizon || o.active_during(*horizon)) active.push_back(o.shape);
    }
    const auto graph = build_cut_graph(sector, frame->direction, active,
                                       std::pair{frame->span_start, frame->span_end});
    return min_cut_lanes(graph, lane_width);
}

}  // namespace sectoropt
