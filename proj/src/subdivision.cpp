#include "sectoropt/subdivision.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace sectoropt {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::uint64_t edge_key(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

bool collinear_pass(Point prev, Point cur, Point next) {
    const Point a = cur - prev;
    const Point b = next - cur;
    return std::abs(cross(a, b)) <= 1e-12 * norm(a) * norm(b) && dot(a, b) > 0.0;
}

}  // namespace

PlanarSubdivision::PlanarSubdivision(std::vector<Point> vertices,
                                     std::vector<SubdivisionEdge> edges,
                                     std::vector<Sector> sectors)
    : vertices_(std::move(vertices)), edges_(std::move(edges)), sectors_(std::move(sectors)) {
    rebuild();
}

void PlanarSubdivision::rebuild() {
    const std::size_t nv = vertices_.size();
    vertex_edges_.assign(nv, {});
    vertex_sectors_.assign(nv, {});
    edge_sides_.assign(edges_.size(), {kNoSector, kNoSector});
    roles_.assign(nv, VertexRole::Interior);
    outer_position_.assign(nv, npos);
    outer_loop_.clear();
    edge_lookup_.clear();

    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto& ed = edges_[e];
        if (ed.v1 >= nv || ed.v2 >= nv || ed.v1 == ed.v2) continue;
        vertex_edges_[ed.v1].push_back(e);
        vertex_edges_[ed.v2].push_back(e);
        edge_lookup_.emplace(edge_key(ed.v1, ed.v2), e);
    }

    for (std::size_t s = 0; s < sectors_.size(); ++s) {
        const auto& loop = sectors_[s].loop;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const std::size_t a = loop[i];
            const std::size_t b = loop[(i + 1) % loop.size()];
            if (a >= nv) continue;
            auto& inc = vertex_sectors_[a];
            if (std::find(inc.begin(), inc.end(), s) == inc.end()) inc.push_back(s);
            if (auto e = edge_between(a, b)) edge_sides_[*e][edges_[*e].v1 == a ? 0 : 1] = s;
        }
    }

    // Chain the outer edges into one loop.
    std::vector<std::vector<std::size_t>> outer_adj(nv);
    std::size_t outer_edge_count = 0;
    for (const auto& ed : edges_) {
        if (!ed.outer || ed.v1 >= nv || ed.v2 >= nv || ed.v1 == ed.v2) continue;
        outer_adj[ed.v1].push_back(ed.v2);
        outer_adj[ed.v2].push_back(ed.v1);
        ++outer_edge_count;
    }
    std::size_t start = npos;
    bool chainable = outer_edge_count >= 3;
    for (std::size_t v = 0; v < nv && chainable; ++v) {
        if (outer_adj[v].empty()) continue;
        if (outer_adj[v].size() != 2) chainable = false;
        if (start == npos) start = v;
    }
    if (chainable && start != npos) {
        std::vector<std::size_t> loop{start};
        std::size_t prev = start;
        std::size_t cur = outer_adj[start][0];
        while (cur != start && loop.size() <= outer_edge_count) {
            loop.push_back(cur);
            const std::size_t next = outer_adj[cur][0] == prev ? outer_adj[cur][1] : outer_adj[cur][0];
            prev = cur;
            cur = next;
        }
        if (cur == start && loop.size() == outer_edge_count) {
            std::vector<Point> ring;
            ring.reserve(loop.size());
            for (auto v : loop) ring.push_back(vertices_[v]);
            if (signed_area(ring) < 0.0) std::reverse(loop.begin() + 1, loop.end());
            outer_loop_ = std::move(loop);
        }
    }

    const std::size_t m = outer_loop_.size();
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t v = outer_loop_[i];
        outer_position_[v] = i;
        const Point prev = vertices_[outer_loop_[(i + m - 1) % m]];
        const Point next = vertices_[outer_loop_[(i + 1) % m]];
        roles_[v] = collinear_pass(prev, vertices_[v], next) ? VertexRole::Slider : VertexRole::Corner;
    }
    // Vertices on outer edges that failed to chain are still pinned.
    if (outer_loop_.empty()) {
        for (const auto& ed : edges_) {
            if (!ed.outer || ed.v1 >= nv || ed.v2 >= nv) continue;
            roles_[ed.v1] = VertexRole::Corner;
            roles_[ed.v2] = VertexRole::Corner;
        }
    }
}

std::optional<std::size_t> PlanarSubdivision::edge_between(std::size_t a, std::size_t b) const {
    auto it = edge_lookup_.find(edge_key(a, b));
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::size_t> PlanarSubdivision::sector_edges(std::size_t s) const {
    const auto& loop = sectors_.at(s).loop;
    std::vector<std::size_t> out;
    out.reserve(loop.size());
    for (std::size_t i = 0; i < loop.size(); ++i) {
        auto e = edge_between(loop[i], loop[(i + 1) % loop.size()]);
        if (!e) throw Error("sector " + std::to_string(s) + " references a missing edge");
        out.push_back(*e);
    }
    return out;
}

std::vector<Point> PlanarSubdivision::sector_ring(std::size_t s) const {
    const auto& loop = sectors_.at(s).loop;
    std::vector<Point> ring;
    ring.reserve(loop.size());
    for (auto v : loop) ring.push_back(vertices_.at(v));
    return ring;
}

Polygon PlanarSubdivision::sector_polygon(std::size_t s) const { return Polygon(sector_ring(s)); }

Polygon PlanarSubdivision::outer_polygon() const {
    if (outer_loop_.empty()) throw GeometryError("outer boundary is not a closed chain");
    std::vector<Point> ring;
    ring.reserve(outer_loop_.size());
    for (auto v : outer_loop_) ring.push_back(vertices_[v]);
    return Polygon(std::move(ring));
}

std::pair<std::size_t, std::size_t> PlanarSubdivision::outer_neighbours(std::size_t v) const {
    const std::size_t i = outer_position_.at(v);
    if (i == npos) throw Error("vertex " + std::to_string(v) + " is not on the outer boundary");
    const std::size_t m = outer_loop_.size();
    return {outer_loop_[(i + m - 1) % m], outer_loop_[(i + 1) % m]};
}

std::pair<std::size_t, std::size_t> PlanarSubdivision::slider_run(std::size_t v) const {
    if (roles_.at(v) != VertexRole::Slider)
        throw Error("vertex " + std::to_string(v) + " is not a boundary slider");
    const std::size_t m = outer_loop_.size();
    const std::size_t i = outer_position_[v];
    std::size_t back = i;
    do {
        back = (back + m - 1) % m;
    } while (roles_[outer_loop_[back]] != VertexRole::Corner && back != i);
    std::size_t fwd = i;
    do {
        fwd = (fwd + 1) % m;
    } while (roles_[outer_loop_[fwd]] != VertexRole::Corner && fwd != i);
    return {outer_loop_[back], outer_loop_[fwd]};
}

PlanarSubdivision PlanarSubdivision::with_vertex_position(std::size_t v, Point p) const {
    PlanarSubdivision out = *this;
    out.vertices_.at(v) = p;
    // Roles only depend on collinearity of the outer loop, which a slider
    // move along its run preserves; incidences are unchanged.
    return out;
}

PlanarSubdivision PlanarSubdivision::with_topology(std::vector<Point> vertices,
                                                   std::vector<SubdivisionEdge> edges,
                                                   std::vector<Sector> sectors) const {
    return PlanarSubdivision(std::move(vertices), std::move(edges), std::move(sectors));
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::Structure: return "structure";
        case ViolationKind::Planarity: return "planarity";
        case ViolationKind::SectorGeometry: return "sector-geometry";
        case ViolationKind::Incidence: return "incidence";
        case ViolationKind::OuterBoundary: return "outer-boundary";
        case ViolationKind::Coverage: return "coverage";
    }
    return "unknown";
}

std::vector<Violation> validate_subdivision(const PlanarSubdivision& sub) {
    std::vector<Violation> out;
    const auto& verts = sub.vertices();
    const auto& edges = sub.edges();
    const auto& sectors = sub.sectors();
    const std::size_t nv = verts.size();

    for (std::size_t v = 0; v < nv; ++v) {
        if (!std::isfinite(verts[v].x) || !std::isfinite(verts[v].y))
            out.push_back({ViolationKind::Structure, "vertex " + std::to_string(v) + " is not finite", {}, {}});
    }
    std::set<std::uint64_t> seen;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto& ed = edges[e];
        if (ed.v1 >= nv || ed.v2 >= nv || ed.v1 == ed.v2) {
            out.push_back({ViolationKind::Structure, "edge " + std::to_string(e) + " has invalid endpoints", {e}, {}});
            continue;
        }
        if (!seen.insert(edge_key(ed.v1, ed.v2)).second)
            out.push_back({ViolationKind::Structure, "edge " + std::to_string(e) + " duplicates another edge", {e}, {}});
    }
    for (std::size_t v = 0; v < nv; ++v) {
        if (sub.degree(v) == 0)
            out.push_back({ViolationKind::Structure, "vertex " + std::to_string(v) + " is isolated", {}, {}});
    }
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& loop = sectors[s].loop;
        if (loop.size() < 3) {
            out.push_back({ViolationKind::Structure, "sector " + std::to_string(s) + " has fewer than 3 vertices", {}, {s}});
            continue;
        }
        std::set<std::size_t> uniq(loop.begin(), loop.end());
        if (uniq.size() != loop.size())
            out.push_back({ViolationKind::Structure, "sector " + std::to_string(s) + " repeats a vertex", {}, {s}});
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const std::size_t a = loop[i];
            const std::size_t b = loop[(i + 1) % loop.size()];
            if (a >= nv || b >= nv) {
                out.push_back({ViolationKind::Structure, "sector " + std::to_string(s) + " references a missing vertex", {}, {s}});
                break;
            }
            if (!sub.edge_between(a, b))
                out.push_back({ViolationKind::Structure,
                               "sector " + std::to_string(s) + " boundary " + std::to_string(a) + "-" +
                                   std::to_string(b) + " is not an edge",
                               {}, {s}});
        }
    }
    if (!out.empty()) return out;

    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Point a = verts[edges[e].v1];
        const Point b = verts[edges[e].v2];
        if (distance(a, b) <= kEpsilon)
            out.push_back({ViolationKind::Planarity, "edge " + std::to_string(e) + " has zero length", {e}, {}});
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const auto& ei = edges[i];
        const Point a = verts[ei.v1];
        const Point b = verts[ei.v2];
        const BoundingBox bi = bounding_box(std::array{a, b});
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            const auto& ej = edges[j];
            const Point c = verts[ej.v1];
            const Point d = verts[ej.v2];
            if (!bi.overlaps(bounding_box(std::array{c, d}))) continue;
            const auto hit = intersect_segments(a, b, c, d);
            if (hit.kind == IntersectionKind::None) continue;
            const bool shares = ei.v1 == ej.v1 || ei.v1 == ej.v2 || ei.v2 == ej.v1 || ei.v2 == ej.v2;
            if (shares && hit.kind == IntersectionKind::Point) {
                // Must meet exactly at the shared endpoint.
                const std::size_t shared = (ei.v1 == ej.v1 || ei.v1 == ej.v2) ? ei.v1 : ei.v2;
                if (distance(lerp(a, b, hit.t), verts[shared]) <= kEpsilon) continue;
            }
            out.push_back({ViolationKind::Planarity,
                           "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect",
                           {i, j}, {}});
        }
    }

    double area_sum = 0.0;
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto ring = sub.sector_ring(s);
        const double area = signed_area(ring);
        area_sum += area;
        if (area <= 0.0)
            out.push_back({ViolationKind::SectorGeometry, "sector " + std::to_string(s) + " is not counterclockwise with positive area", {}, {s}});
        else if (!is_simple_ring(ring))
            out.push_back({ViolationKind::SectorGeometry, "sector " + std::to_string(s) + " is not simple", {}, {s}});
    }

    std::vector<std::array<int, 2>> uses(edges.size(), {0, 0});
    for (std::size_t s = 0; s < sectors.size(); ++s) {
        const auto& loop = sectors[s].loop;
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const std::size_t a = loop[i];
            const auto e = *sub.edge_between(a, loop[(i + 1) % loop.size()]);
            ++uses[e][edges[e].v1 == a ? 0 : 1];
        }
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int total = uses[e][0] + uses[e][1];
        const bool ok = edges[e].outer ? total == 1 : (uses[e][0] == 1 && uses[e][1] == 1);
        if (!ok)
            out.push_back({ViolationKind::Incidence,
                           "edge " + std::to_string(e) + (edges[e].outer ? " (outer)" : " (interior)") +
                               " is bounded by " + std::to_string(total) + " sector side(s)",
                           {e}, {}});
    }

    if (sub.outer_loop().empty()) {
        out.push_back({ViolationKind::OuterBoundary, "outer edges do not form one closed loop", {}, {}});
        return out;
    }
    std::vector<Point> outer_ring;
    for (auto v : sub.outer_loop()) outer_ring.push_back(verts[v]);
    const double outer_area = signed_area(outer_ring);
    if (outer_area <= 0.0 || !is_simple_ring(outer_ring)) {
        out.push_back({ViolationKind::OuterBoundary, "outer boundary is not a simple polygon", {}, {}});
        return out;
    }
    if (std::abs(area_sum - outer_area) > 1e-9 * outer_area) {
        out.push_back({ViolationKind::Coverage,
                       "sector areas sum to " + std::to_string(area_sum) + " but outer area is " +
                           std::to_string(outer_area),
                       {}, {}});
    }
    return out;
}

double point_to_boundary_distance(Point p, const PlanarSubdivision& sub) {
    double best = std::numeric_limits<double>::infinity();
    const auto& verts = sub.vertices();
    for (const auto& e : sub.edges()) {
        best = std::min(best, point_segment_distance(p, verts[e.v1], verts[e.v2]));
    }
    return best;
}

std::size_t owning_sector(const PlanarSubdivision& sub, Point p) {
    for (std::size_t s = 0; s < sub.sector_count(); ++s) {
        const auto ring = sub.sector_ring(s);
        if (!bounding_box(ring).overlaps(BoundingBox{p.x, p.y, p.x, p.y})) continue;
        if (contains(Polygon(ring), p)) return s;
    }
    return kNoSector;
}

}  // namespace sectoropt
