#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sectoropt/geometry.hpp"
#include "sectoropt/traffic.hpp"

namespace sectoropt {

struct WeatherObstacle {
    Polygon shape;
    std::optional<TimeInterval> active;  ///< whole horizon when absent

    bool active_during(const Horizon& h) const {
        return !active || (active->end >= h.start && active->start <= h.end);
    }
};

/// Flow-aligned frame for one sector: unit direction of the flow's chord
/// through the sector and the projection range the flow traverses.
struct FlowFrame {
    Point direction;
    double span_start = 0.0;
    double span_end = 0.0;
};

/// Nullopt when the flow never enters the sector (or only touches it).
std::optional<FlowFrame> flow_frame(const Polygon& sector, std::span<const Point> flow);

/// Clearance graph between the left bank, the right bank and each obstacle
/// clipped to the sector. Node 0 is the left bank, node 1 the right bank.
///
/// Bank distances are perpendicular gaps measured across the flow; the
/// bank-to-bank weight is the narrowest cross-section over the traversed
/// span. Obstacle pairs use Euclidean clearance.
struct CutGraph {
    static constexpr std::size_t kLeftBank = 0;
    static constexpr std::size_t kRightBank = 1;

    std::vector<std::vector<Point>> obstacles;     ///< clipped rings, node i + 2
    std::vector<std::vector<double>> clearance;    ///< symmetric, degrees

    std::size_t node_count() const { return clearance.size(); }
    std::size_t edge_count() const { return node_count() * (node_count() - 1) / 2; }
};

CutGraph build_cut_graph(const Polygon& sector, Point direction, std::span<const Polygon> obstacles,
                         std::optional<std::pair<double, double>> span = std::nullopt);

/// Lanes that fit side by side in a gap; gaps narrower than one lane give 0.
int lanes_in_gap(double width, double lane_width);

/// Cheapest bank-to-bank path where each hop costs lanes_in_gap(clearance).
int min_cut_lanes(const CutGraph& graph, double lane_width);

/// Lane count N_L along `flow`, or nullopt when the flow misses the sector.
/// Obstacles active anywhere in `horizon` are merged into one static set.
std::optional<int> lane_count(const Polygon& sector, std::span<const Point> flow,
                              std::span<const WeatherObstacle> obstacles, double lane_width,
                              std::optional<Horizon> horizon = std::nullopt);

}  // namespace sectoropt
