#include "sectoropt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace sectoropt {

namespace {

struct Segment {
    Point a, b;
};

std::vector<std::pair<double, double>> inside_with_retry(Point& a, Point& b, const Polygon& poly) {
    try {
        return segment_inside_intervals(a, b, poly);
    } catch (const GrazingContactError&) {
        const Point d = b - a;
        const Point shift = Point{-d.y, d.x} * (1e-7 / norm(d));
        a = a + shift;
        b = b + shift;
        return segment_inside_intervals(a, b, poly);
    }
}

std::vector<Segment> clipped_segments(const Polygon& poly, std::span<const Trajectory> tracks) {
    std::vector<Segment> out;
    for (const auto& track : tracks) {
        const auto& s = track.samples();
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            Point a = s[i].position;
            Point b = s[i + 1].position;
            if (distance(a, b) <= kEpsilon) continue;
            for (const auto& [lo, hi] : inside_with_retry(a, b, poly)) {
                if (hi > lo) out.push_back({lerp(a, b, lo), lerp(a, b, hi)});
            }
        }
    }
    return out;
}

// Length of the segments on the side dot(p, dir) <= s.
double length_below(std::span<const Segment> segs, Point dir, double s) {
    double total = 0.0;
    for (const auto& seg : segs) {
        const double sa = dot(seg.a, dir);
        const double sb = dot(seg.b, dir);
        const double len = distance(seg.a, seg.b);
        const double lo = std::min(sa, sb);
        const double hi = std::max(sa, sb);
        if (hi - lo <= 0.0) {
            if (lo <= s) total += len;
            continue;
        }
        total += len * std::clamp((s - lo) / (hi - lo), 0.0, 1.0);
    }
    return total;
}

Point random_in(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    const double x = u(rng);
    return {x, u(rng)};
}

}  // namespace

void ScenarioParams::validate() const {
    if (!(outer_side > 0.0)) throw InputError("outer_side must be positive");
    if (!(region_side > 0.0) || !(region_side < outer_side))
        throw InputError("region_side must be positive and smaller than outer_side");
    if (flight_count > 0 && airport_count < 2)
        throw InputError("flights need at least two airports");
    if (!(weight_stddev >= 0.0)) throw InputError("weight_stddev must be >= 0");
    if (!(horizon_s > 0.0)) throw InputError("horizon_s must be positive");
    if (!(speed_deg_per_min > 0.0)) throw InputError("speed_deg_per_min must be positive");
    if (!(weather_radius_min > 0.0) || weather_radius_max < weather_radius_min)
        throw InputError("weather radius range is invalid");
    if (weather_cells > 0 && 2 * weather_radius_max >= region_side)
        throw InputError("weather cells do not fit in the region");
}

Polygon square(double x0, double y0, double side) {
    return Polygon({{x0, y0}, {x0 + side, y0}, {x0 + side, y0 + side}, {x0, y0 + side}});
}

Scenario generate_scenario(const ScenarioParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    const double margin = (params.outer_side - params.region_side) / 2.0;
    Scenario sc{{}, square(margin, margin, params.region_side), {}, {}, {}, {}, {0.0, params.horizon_s}};

    std::normal_distribution<double> weight(params.weight_mean, params.weight_stddev);
    for (std::size_t i = 0; i < params.airport_count; ++i) {
        const Point p = random_in(rng, 0.0, params.outer_side);
        sc.airports.push_back({fmt::format("AP{:03}", i), p, std::max(weight(rng), 0.1)});
    }

    std::vector<double> weights;
    for (const auto& a : sc.airports) weights.push_back(a.weight);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::uniform_real_distribution<double> departure(0.0, params.horizon_s);
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> pair_counts;
    for (std::size_t f = 0; f < params.flight_count; ++f) {
        const std::size_t o = pick(rng);
        std::size_t d = pick(rng);
        while (d == o) d = pick(rng);
        const Point from = sc.airports[o].position;
        const Point to = sc.airports[d].position;
        const double t0 = departure(rng);
        const double duration = distance(from, to) / params.speed_deg_per_min * 60.0;
        sc.tracks.emplace_back(fmt::format("F{:05}", f),
                               std::vector<TrackSample>{{t0, from}, {t0 + duration, to}});
        ++pair_counts[{o, d}];
    }

    std::uniform_real_distribution<double> radius(params.weather_radius_min, params.weather_radius_max);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> corners(5, 8);
    for (std::size_t w = 0; w < params.weather_cells; ++w) {
        const double r = radius(rng);
        const Point c = random_in(rng, margin + r, margin + params.region_side - r);
        std::vector<double> angles(static_cast<std::size_t>(corners(rng)));
        for (auto& a : angles) a = angle(rng);
        std::sort(angles.begin(), angles.end());
        std::vector<Point> ring;
        for (double a : angles) {
            const Point p{c.x + r * std::cos(a), c.y + r * std::sin(a)};
            if (ring.empty() || distance(ring.back(), p) > 1e-6) ring.push_back(p);
        }
        if (auto poly = Polygon::try_make(convex_hull(ring))) sc.weather.push_back({*poly, std::nullopt});
    }

    for (const auto& a : sc.airports) {
        if (contains(sc.region, a.position)) sc.critical_points.push_back({a.id, a.position});
    }

    std::vector<std::pair<std::pair<std::size_t, std::size_t>, std::size_t>> busiest(pair_counts.begin(),
                                                                                     pair_counts.end());
    std::stable_sort(busiest.begin(), busiest.end(),
                     [](const auto& x, const auto& y) { return x.second > y.second; });
    for (std::size_t i = 0; i < std::min(params.flow_count, busiest.size()); ++i) {
        const auto [o, d] = busiest[i].first;
        sc.flows.push_back({fmt::format("{}-{}", sc.airports[o].id, sc.airports[d].id),
                            {sc.airports[o].position, sc.airports[d].position},
                            static_cast<double>(busiest[i].second)});
    }
    return sc;
}

double clipped_length(const Polygon& poly, std::span<const Trajectory> tracks) {
    double total = 0.0;
    for (const auto& s : clipped_segments(poly, tracks)) total += distance(s.a, s.b);
    return total;
}

PlanarSubdivision sweep_seed(const Polygon& domain, std::span<const Trajectory> tracks, std::size_t k,
                             Point direction) {
    if (k == 0) throw InputError("sector count must be at least 1");
    if (convexity_ratio(domain) < 1.0) throw UnsupportedDomainError("sweep seeding needs a convex domain");
    const double dlen = norm(direction);
    if (!(dlen > kEpsilon)) throw InputError("sweep direction must be non-zero");
    const Point dir = direction * (1.0 / dlen);

    const auto& ring = domain.vertices();
    const std::size_t n = ring.size();
    std::vector<std::size_t> corner_ids(n);
    for (std::size_t i = 0; i < n; ++i) corner_ids[i] = i;

    if (k == 1) {
        std::vector<SubdivisionEdge> edges;
        for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, true});
        return PlanarSubdivision(ring, std::move(edges), {Sector{"S1", corner_ids}});
    }

    const auto segs = clipped_segments(domain, tracks);
    double smin = std::numeric_limits<double>::infinity();
    double smax = -smin;
    for (const auto& p : ring) {
        smin = std::min(smin, dot(p, dir));
        smax = std::max(smax, dot(p, dir));
    }
    const double total = length_below(segs, dir, smax);
    if (!(total > 0.0)) throw InputError("no trajectory length inside the sweep domain");

    std::vector<double> cuts;
    for (std::size_t i = 1; i < k; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(k);
        double lo = smin, hi = smax;
        for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            (length_below(segs, dir, mid) < target ? lo : hi) = mid;
        }
        const double s = hi;
        const double scale = std::max(1.0, smax - smin);
        if (s <= smin + 1e-9 * scale || s >= smax - 1e-9 * scale ||
            (!cuts.empty() && s <= cuts.back() + 1e-9 * scale))
            throw InputError(fmt::format("cut {} of the sweep is degenerate", i));
        cuts.push_back(s);
    }

    // Outer loop with cut endpoints inserted; level marks which cut a vertex
    // lies on (or -1 for a domain corner strictly between cuts).
    std::vector<Point> verts;
    std::vector<int> level;
    std::vector<std::size_t> loop;
    auto cut_of = [&](double s) -> int {
        const double tol = 1e-12 * std::max(1.0, smax - smin);
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            if (std::abs(s - cuts[c]) <= tol) return static_cast<int>(c);
        }
        return -1;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = ring[i];
        const Point q = ring[(i + 1) % n];
        verts.push_back(p);
        level.push_back(cut_of(dot(p, dir)));
        loop.push_back(verts.size() - 1);
        const double sp = dot(p, dir);
        const double sq = dot(q, dir);
        std::vector<std::pair<double, int>> hits;
        for (std::size_t c = 0; c < cuts.size(); ++c) {
            if (cut_of(sp) == static_cast<int>(c) || cut_of(sq) == static_cast<int>(c)) continue;
            if ((cuts[c] - sp) * (cuts[c] - sq) < 0.0)
                hits.push_back({(cuts[c] - sp) / (sq - sp), static_cast<int>(c)});
        }
        std::sort(hits.begin(), hits.end());
        for (const auto& [t, c] : hits) {
            verts.push_back(lerp(p, q, t));
            level.push_back(c);
            loop.push_back(verts.size() - 1);
        }
    }

    std::vector<SubdivisionEdge> edges;
    for (std::size_t i = 0; i < loop.size(); ++i) edges.push_back({loop[i], loop[(i + 1) % loop.size()], true});
    for (std::size_t c = 0; c < cuts.size(); ++c) {
        std::vector<std::size_t> ends;
        for (std::size_t v = 0; v < verts.size(); ++v) {
            if (level[v] == static_cast<int>(c)) ends.push_back(v);
        }
        if (ends.size() != 2) throw InputError(fmt::format("cut {} of the sweep is degenerate", c + 1));
        edges.push_back({ends[0], ends[1], false});
    }

    std::vector<Sector> sectors;
    for (std::size_t j = 0; j < k; ++j) {
        const double lo = j == 0 ? -std::numeric_limits<double>::infinity() : cuts[j - 1];
        const double hi = j + 1 == k ? std::numeric_limits<double>::infinity() : cuts[j];
        Sector sector{fmt::format("S{}", j + 1), {}};
        for (auto v : loop) {
            const int c = level[v];
            const bool on_bounding_cut =
                c >= 0 && (static_cast<std::size_t>(c) + 1 == j || static_cast<std::size_t>(c) == j);
            const double s = dot(verts[v], dir);
            if (on_bounding_cut || (c < 0 && s > lo && s < hi)) sector.loop.push_back(v);
        }
        sectors.push_back(std::move(sector));
    }
    return PlanarSubdivision(std::move(verts), std::move(edges), std::move(sectors));
}

}  // namespace sectoropt
