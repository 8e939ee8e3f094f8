#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sectoropt/geometry.hpp"

namespace sectoropt {

inline constexpr std::size_t kNoSector = static_cast<std::size_t>(-1);

struct SubdivisionEdge {
    std::size_t v1 = 0;
    std::size_t v2 = 0;
    bool outer = false;

    friend bool operator==(const SubdivisionEdge&, const SubdivisionEdge&) = default;
};

/// One bounded face. The loop lists vertex indices counterclockwise.
struct Sector {
    std::string name;
    std::vector<std::size_t> loop;

    friend bool operator==(const Sector&, const Sector&) = default;
};

/// How a vertex may move during local search.
enum class VertexRole {
    Corner,    ///< vertex of the outer polygon; immutable
    Slider,    ///< on the outer boundary between corners; moves along it
    Interior,
};

/// Planar straight-line subdivision of a region into simple sectors. The
/// outer boundary is the chain of edges flagged `outer`.
///
/// Construction only derives topology (incidences, outer loop, vertex
/// roles). Call validate_subdivision() to check geometric invariants.
class PlanarSubdivision {
public:
    PlanarSubdivision() = default;
    PlanarSubdivision(std::vector<Point> vertices, std::vector<SubdivisionEdge> edges,
                      std::vector<Sector> sectors);

    const std::vector<Point>& vertices() const noexcept { return vertices_; }
    const std::vector<SubdivisionEdge>& edges() const noexcept { return edges_; }
    const std::vector<Sector>& sectors() const noexcept { return sectors_; }
    std::size_t sector_count() const noexcept { return sectors_.size(); }

    /// Outer boundary as counterclockwise vertex indices; empty when the
    /// outer edges do not form one closed chain.
    const std::vector<std::size_t>& outer_loop() const noexcept { return outer_loop_; }

    std::optional<std::size_t> edge_between(std::size_t a, std::size_t b) const;
    const std::vector<std::size_t>& incident_edges(std::size_t v) const { return vertex_edges_[v]; }
    const std::vector<std::size_t>& incident_sectors(std::size_t v) const {
        return vertex_sectors_[v];
    }
    std::size_t degree(std::size_t v) const { return vertex_edges_[v].size(); }

    /// Sectors on the left / right of the directed edge v1 -> v2; kNoSector
    /// marks the unbounded side.
    std::size_t left_sector(std::size_t e) const { return edge_sides_[e][0]; }
    std::size_t right_sector(std::size_t e) const { return edge_sides_[e][1]; }

    /// Edge indices around a sector, in loop order.
    std::vector<std::size_t> sector_edges(std::size_t s) const;

    std::vector<Point> sector_ring(std::size_t s) const;
    /// Throws GeometryError when the sector ring is not a valid polygon.
    Polygon sector_polygon(std::size_t s) const;
    Polygon outer_polygon() const;

    VertexRole role(std::size_t v) const { return roles_[v]; }
    bool on_outer_boundary(std::size_t v) const { return roles_[v] != VertexRole::Interior; }

    /// For a slider: the two corners bounding its straight boundary run.
    std::pair<std::size_t, std::size_t> slider_run(std::size_t v) const;
    /// For a slider: its outer-loop neighbours (previous, next).
    std::pair<std::size_t, std::size_t> outer_neighbours(std::size_t v) const;

    /// Copies with a vertex relocated. Topology is unchanged.
    PlanarSubdivision with_vertex_position(std::size_t v, Point p) const;

    /// Low-level rewiring used by edge flips; rebuilds derived topology.
    PlanarSubdivision with_topology(std::vector<Point> vertices, std::vector<SubdivisionEdge> edges,
                                    std::vector<Sector> sectors) const;

    friend bool operator==(const PlanarSubdivision& a, const PlanarSubdivision& b) {
        return a.vertices_ == b.vertices_ && a.edges_ == b.edges_ && a.sectors_ == b.sectors_;
    }

private:
    void rebuild();

    std::vector<Point> vertices_;
    std::vector<SubdivisionEdge> edges_;
    std::vector<Sector> sectors_;

    std::vector<std::size_t> outer_loop_;
    std::vector<std::size_t> outer_position_;  // index in outer_loop_ or npos
    std::vector<std::vector<std::size_t>> vertex_edges_;
    std::vector<std::vector<std::size_t>> vertex_sectors_;
    std::vector<std::array<std::size_t, 2>> edge_sides_;
    std::vector<VertexRole> roles_;
    std::unordered_map<std::uint64_t, std::size_t> edge_lookup_;
};

enum class ViolationKind { Structure, Planarity, SectorGeometry, Incidence, OuterBoundary, Coverage };

struct Violation {
    ViolationKind kind;
    std::string message;
    std::vector<std::size_t> edges;
    std::vector<std::size_t> sectors;
};

std::string to_string(ViolationKind kind);

/// Checks every structural and geometric invariant; an empty result means
/// the subdivision is valid.
std::vector<Violation> validate_subdivision(const PlanarSubdivision& sub);

/// Minimum distance from p to any edge, interior or outer.
double point_to_boundary_distance(Point p, const PlanarSubdivision& sub);

/// Lowest-index sector containing p (closed), or kNoSector.
std::size_t owning_sector(const PlanarSubdivision& sub, Point p);

}  // namespace sectoropt
