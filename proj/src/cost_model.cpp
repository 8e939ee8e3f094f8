#include "sectoropt/cost_model.hpp"

#include <algorithm>
#include <fmt/format.h>

namespace sectoropt {

namespace {

constexpr std::array<std::string_view, kConstraintCount> kKeys = {
    "ac_avg",        "ac_max",   "delay",     "throughput", "dwell_time", "crossing_angle",
    "flow_distance", "critical_point_distance", "min_angle", "max_angle", "convexity",
    "edge_length",
};

struct Needs {
    bool traffic = true;
    bool flows = true;
    bool critical_points = true;
};

Needs needs_for(const ConstraintTable& table) {
    auto on = [&](ConstraintId id) { return table[index_of(id)].weight > 0.0; };
    Needs n;
    n.traffic = on(ConstraintId::AcAvg) || on(ConstraintId::AcMax) || on(ConstraintId::Delay) ||
                on(ConstraintId::DwellTime);
    n.flows = on(ConstraintId::Throughput) || on(ConstraintId::CrossingAngle) ||
              on(ConstraintId::FlowDistance);
    n.critical_points = on(ConstraintId::CriticalPointDistance);
    return n;
}

Horizon resolve_horizon(const TrafficScene& scene, const EvaluationSettings& settings) {
    return settings.horizon ? *settings.horizon : data_horizon(scene.tracks);
}

SectorContext build_context(const PlanarSubdivision& sub, std::size_t sector, const TrafficScene& scene,
                            const EvaluationSettings& settings, Horizon horizon, Needs needs) {
    SectorContext ctx{&sub, sector, sub.sector_polygon(sector), {}, horizon, {}, {}, std::nullopt,
                      {}, {}, {}, settings.lane_width};
    for (auto e : sub.sector_edges(sector)) ctx.interior_edge.push_back(!sub.edges()[e].outer);
    ctx.profile.horizon = horizon;
    ctx.profile.breakpoints.push_back({horizon.start, 0});

    if (needs.traffic) {
        ctx.profile = count_profile(ctx.polygon, scene.tracks, horizon);
        ctx.visits = dwell_times(ctx.polygon, scene.tracks);
        if (!ctx.visits.empty()) {
            const double mean = mean_dwell_seconds(ctx.visits);
            if (settings.capacity_method == CapacityMethod::Welch) {
                const double scale = settings.nmi_per_degree;
                const double volume = polygon_area(ctx.polygon) * scale * scale * settings.altitude_slab_nmi;
                ctx.capacity = capacity_welch(volume, mean, false);
            } else {
                ctx.capacity = capacity_map(mean / 60.0);
            }
        }
    }
    if (needs.flows) {
        ctx.flows = scene.flows;
        ctx.weather = scene.weather;
    }
    if (needs.critical_points) {
        const auto box = bounding_box(ctx.polygon.vertices());
        for (const auto& cp : scene.critical_points) {
            const Point p = cp.position;
            if (!box.overlaps(BoundingBox{p.x, p.y, p.x, p.y})) continue;
            if (!contains(ctx.polygon, p)) continue;
            // Boundary points belong to the lowest-index sector containing them.
            if (owning_sector(sub, p) == sector) ctx.critical_points.push_back(cp);
        }
    }
    return ctx;
}

// Inside pieces of a polyline, shifted sideways once on grazing contact.
struct PolylinePiece {
    Point a, b;
};

std::vector<PolylinePiece> polyline_segments(std::span<const Point> line) {
    std::vector<PolylinePiece> out;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        if (distance(line[i], line[i + 1]) > kEpsilon) out.push_back({line[i], line[i + 1]});
    }
    return out;
}

std::vector<Crossing> crossings_with_retry(PolylinePiece& seg, const Polygon& poly) {
    try {
        return segment_polygon_crossings(seg.a, seg.b, poly);
    } catch (const GrazingContactError&) {
        const Point d = seg.b - seg.a;
        const Point shift = Point{-d.y, d.x} * (1e-7 / norm(d));
        seg.a = seg.a + shift;
        seg.b = seg.b + shift;
        return segment_polygon_crossings(seg.a, seg.b, poly);
    }
}

bool polyline_enters(std::span<const PolylinePiece> segs, const Polygon& poly) {
    for (const auto& s : segs) {
        if (contains(poly, s.a) || contains(poly, s.b)) return true;
        if (!segment_polygon_crossings(s.a, s.b, poly).empty()) return true;
    }
    return false;
}

}  // namespace

std::string_view constraint_key(ConstraintId id) { return kKeys[index_of(id)]; }

std::optional<ConstraintId> constraint_from_key(std::string_view key) {
    for (std::size_t i = 0; i < kKeys.size(); ++i) {
        if (kKeys[i] == key) return constraint_at(i);
    }
    return std::nullopt;
}

ConstraintTable default_constraint_table() {
    using C = ConstraintId;
    auto row = [](C id, std::optional<double> t, double l, Bound b) {
        return ConstraintSpec{id, t, l, 1.0, b};
    };
    return {
        row(C::AcAvg, std::nullopt, kUnbounded, Bound::Upper),
        row(C::AcMax, std::nullopt, kUnbounded, Bound::Upper),
        row(C::Delay, 0.0, kUnbounded, Bound::Upper),
        row(C::Throughput, 2.0, 0.0, Bound::Lower),
        row(C::DwellTime, 300.0, 0.0, Bound::Lower),
        row(C::CrossingAngle, 45.0, 90.0, Bound::Upper),
        row(C::FlowDistance, 0.3, 0.0, Bound::Lower),
        row(C::CriticalPointDistance, 0.4, 0.0, Bound::Lower),
        row(C::MinAngle, 80.0, 0.0, Bound::Lower),
        row(C::MaxAngle, 180.0, 360.0, Bound::Upper),
        row(C::Convexity, 0.90, 0.0, Bound::Lower),
        row(C::EdgeLength, 0.4, 0.0, Bound::Lower),
    };
}

void validate_constraint_table(const ConstraintTable& table) {
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& c = table[i];
        const auto key = constraint_key(c.id);
        if (c.id != constraint_at(i)) throw InputError("constraint table is out of order");
        if (!(c.weight >= 0.0) || !std::isfinite(c.weight))
            throw InputError(fmt::format("constraint {}: weight must be finite and >= 0", key));
        if (!c.threshold) {
            if (c.weight > 0.0)
                throw InputError(fmt::format("constraint {}: threshold must be set explicitly", key));
            continue;
        }
        const double t = *c.threshold;
        if (!std::isfinite(t)) throw InputError(fmt::format("constraint {}: threshold must be finite", key));
        if (c.unbounded()) {
            if (c.bound != Bound::Upper)
                throw InputError(fmt::format("constraint {}: unbounded limit needs an upper bound", key));
            continue;
        }
        const bool ok = c.bound == Bound::Upper ? t < c.limit : t > c.limit;
        if (!ok)
            throw InputError(fmt::format("constraint {}: threshold {} is not on the feasible side of limit {}",
                                         key, t, c.limit));
    }
}

double penalty(double p, const ConstraintSpec& spec) {
    if (!spec.threshold)
        throw InputError(fmt::format("constraint {} has no threshold", constraint_key(spec.id)));
    const double t = *spec.threshold;
    const double l = spec.limit;
    if (spec.unbounded()) return p >= t ? (p - t) * (p - t) + 1.0 : 0.0;
    if (spec.bound == Bound::Upper) {
        if (p < t) return 0.0;
        if (p >= l) return std::numeric_limits<double>::infinity();
    } else {
        if (p > t) return 0.0;
        if (p <= l) return std::numeric_limits<double>::infinity();
    }
    return (t - l) / (p - l);
}

SectorContext make_sector_context(const PlanarSubdivision& sub, std::size_t sector,
                                  const TrafficScene& scene, const EvaluationSettings& settings) {
    return build_context(sub, sector, scene, settings, resolve_horizon(scene, settings), Needs{});
}

ParameterMap evaluate_parameters(const SectorContext& ctx) {
    using C = ConstraintId;
    ParameterMap params;
    auto& p = params;
    const Polygon& poly = ctx.polygon;

    p[index_of(C::AcAvg)] = {ac_avg(ctx.profile)};
    p[index_of(C::AcMax)] = {static_cast<double>(ac_max(ctx.profile))};
    p[index_of(C::Delay)] = {ctx.capacity ? estimated_delay(ctx.profile, *ctx.capacity) : 0.0};
    for (const auto& v : ctx.visits) p[index_of(C::DwellTime)].push_back(v.duration());

    for (const auto& flow : ctx.flows) {
        auto segs = polyline_segments(flow.points);
        if (segs.empty()) continue;

        if (auto lanes = lane_count(poly, flow.points, ctx.weather, ctx.lane_width, ctx.horizon))
            p[index_of(C::Throughput)].push_back(*lanes);

        std::vector<bool> crossed(poly.size(), false);
        for (std::size_t k = 0; k < segs.size(); ++k) {
            for (const auto& c : crossings_with_retry(segs[k], poly)) {
                // A polyline vertex on the boundary shows up at t=1 and t=0.
                if (c.t >= 1.0 - 1e-12 && k + 1 < segs.size()) continue;
                if (!ctx.interior_edge[c.edge]) continue;
                crossed[c.edge] = true;
                p[index_of(C::CrossingAngle)].push_back(90.0 - c.angle_deg);
            }
        }

        if (!polyline_enters(segs, poly)) continue;
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < poly.size(); ++e) {
            if (!ctx.interior_edge[e] || crossed[e]) continue;
            for (const auto& s : segs) {
                nearest = std::min(nearest, segment_segment_distance(s.a, s.b, poly.edge_start(e),
                                                                     poly.edge_end(e)));
            }
        }
        if (std::isfinite(nearest)) p[index_of(C::FlowDistance)].push_back(nearest);
    }

    for (const auto& cp : ctx.critical_points) {
        p[index_of(C::CriticalPointDistance)].push_back(
            ctx.subdivision ? point_to_boundary_distance(cp.position, *ctx.subdivision)
                            : point_polygon_boundary_distance(cp.position, poly));
    }

    const auto angles = interior_angles(poly);
    p[index_of(C::MinAngle)] = angles;
    p[index_of(C::MaxAngle)] = angles;
    p[index_of(C::Convexity)] = {convexity_ratio(poly)};
    for (std::size_t i = 0; i < poly.size(); ++i) {
        p[index_of(C::EdgeLength)].push_back(distance(poly.edge_start(i), poly.edge_end(i)));
    }
    return params;
}

CostReport sector_cost(const SectorContext& ctx, const ConstraintTable& table) {
    const auto params = evaluate_parameters(ctx);
    CostReport report;
    report.sector = ctx.sector;
    for (std::size_t i = 0; i < kConstraintCount; ++i) {
        auto& row = report.constraints[i];
        row.values = params[i];
        const auto& spec = table[i];
        if (spec.weight == 0.0) continue;
        for (double v : row.values) row.penalty += penalty(v, spec);
        row.weighted = spec.weight * row.penalty;
        report.total += row.weighted;
    }
    return report;
}

SectorEvaluator::SectorEvaluator(TrafficScene scene, EvaluationSettings settings, ConstraintTable table)
    : scene_(std::move(scene)), settings_(std::move(settings)), table_(table) {
    validate_constraint_table(table_);
    if (!(settings_.lane_width > 0.0)) throw InputError("lane width must be positive");
    if (!settings_.horizon) settings_.horizon = data_horizon(scene_.tracks);
    if (!(settings_.horizon->length() > 0.0)) throw InputError("evaluation horizon must have positive length");
}

CostReport SectorEvaluator::report(const PlanarSubdivision& sub, std::size_t sector) const {
    const auto ctx = build_context(sub, sector, scene_, settings_, *settings_.horizon, needs_for(table_));
    return sector_cost(ctx, table_);
}

}  // namespace sectoropt
