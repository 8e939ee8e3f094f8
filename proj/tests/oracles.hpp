#pragma once

// Brute-force reference computations used to cross-check the library. They
// share no code with it beyond the Point and Trajectory types.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sectoropt/traffic.hpp"

namespace oracles {

using sectoropt::Horizon;
using sectoropt::Point;
using sectoropt::Trajectory;

// Real roots of a x^2 + b x + c, larger first.
inline std::optional<std::pair<double, double>> quadratic_roots(double a, double b, double c) {
    const long double A = a, B = b, C = c;
    const long double disc = B * B - 4 * A * C;
    if (disc < 0) return std::nullopt;
    const long double s = std::sqrt(disc);
    // Stable form avoids cancellation for the small-magnitude root.
    const long double q = -0.5L * (B + (B >= 0 ? s : -s));
    long double r1 = q / A, r2 = C / q;
    if (r1 < r2) std::swap(r1, r2);
    return std::pair{static_cast<double>(r1), static_cast<double>(r2)};
}

// Closed point-in-polygon by ray casting with an explicit boundary test.
inline bool inside_closed(const std::vector<Point>& ring, Point p) {
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = ring[i], b = ring[(i + 1) % n];
        const double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        if (std::abs(cr) <= 1e-12 * len && p.x >= std::min(a.x, b.x) - 1e-12 && p.x <= std::max(a.x, b.x) + 1e-12 &&
            p.y >= std::min(a.y, b.y) - 1e-12 && p.y <= std::max(a.y, b.y) + 1e-12)
            return true;
    }
    bool in = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point a = ring[i], b = ring[j];
        if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
    }
    return in;
}

inline bool inside_at(const std::vector<Point>& ring, const Trajectory& t, double time) {
    const auto p = t.position_at(time);
    return p && inside_closed(ring, *p);
}

// Containment intervals of one flight sampled every dt over [t0, t1], with
// each transition refined by bisection.
inline std::vector<std::pair<double, double>> sampled_intervals(const std::vector<Point>& ring, const Trajectory& t,
                                                                double t0, double t1, double dt) {
    auto refine = [&](double lo, double hi, bool lo_inside) {
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (inside_at(ring, t, mid) == lo_inside ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    std::vector<std::pair<double, double>> out;
    const auto steps = static_cast<long long>(std::ceil((t1 - t0) / dt));
    bool prev = inside_at(ring, t, t0);
    double prev_t = t0;
    double open = t0;
    for (long long i = 1; i <= steps; ++i) {
        const double now = std::min(t1, t0 + static_cast<double>(i) * dt);
        const bool cur = inside_at(ring, t, now);
        if (cur != prev) {
            const double edge = refine(prev_t, now, prev);
            if (cur) open = edge;
            else out.push_back({open, edge});
        }
        prev = cur;
        prev_t = now;
    }
    if (prev) out.push_back({open, t1});
    return out;
}

struct SampledProfile {
    Horizon horizon;
    std::vector<std::pair<double, int>> steps;  // count holds from each time on
    int max = 0;
    double avg = 0.0;

    double delay(double capacity) const {
        double total = 0.0;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const double end = i + 1 < steps.size() ? steps[i + 1].first : horizon.end;
            total += std::max(0.0, steps[i].second - capacity) * (end - steps[i].first);
        }
        return total;
    }
};

inline SampledProfile sampled_profile(const sectoropt::Polygon& poly, const std::vector<Trajectory>& tracks,
                                      Horizon h, double dt) {
    const auto& ring = poly.vertices();
    std::map<double, int> delta;
    delta[h.start] += 0;
    for (const auto& t : tracks) {
        for (const auto& [a, b] : sampled_intervals(ring, t, h.start, h.end, dt)) {
            if (b <= a) continue;
            delta[a] += 1;
            delta[b] -= 1;
        }
    }
    SampledProfile out;
    out.horizon = h;
    int count = 0;
    for (const auto& [time, d] : delta) {
        if (time >= h.end) break;
        count += d;
        out.steps.push_back({time, count});
        out.max = std::max(out.max, count);
    }
    double area = 0.0;
    for (std::size_t i = 0; i < out.steps.size(); ++i) {
        const double end = i + 1 < out.steps.size() ? out.steps[i + 1].first : h.end;
        area += out.steps[i].second * (end - out.steps[i].first);
    }
    out.avg = area / h.length();
    return out;
}

// All visit durations of the flights, sampled over each flight's own span.
inline std::vector<double> sampled_dwell(const sectoropt::Polygon& poly, const std::vector<Trajectory>& tracks,
                                         double dt) {
    std::vector<double> out;
    for (const auto& t : tracks) {
        for (const auto& [a, b] : sampled_intervals(poly.vertices(), t, t.start_time(), t.end_time(), dt))
            if (b > a) out.push_back(b - a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace oracles
