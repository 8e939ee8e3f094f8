#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "sectoropt/subdivision.hpp"

namespace sectoropt {

class ContractViolation : public Error {
public:
    using Error::Error;
};

struct SearchConfig {
    double grid_radius = 0.4;  ///< degrees
    double grid_step = 0.15;   ///< degrees
    /// Edge-flip lengths as multiples of the flipped edge's length.
    std::vector<double> flip_length_factors{0.5, 1.0, 1.5};
    /// Absolute edge-flip lengths in degrees; overrides the factors when set.
    std::optional<std::vector<double>> flip_lengths;
    std::size_t max_iterations = 10000;
    unsigned threads = 1;

    /// Throws InputError on a non-positive radius or step, or step > radius.
    void validate() const;
};

/// Relocates one vertex. Sliders stay on their straight boundary run.
struct VertexMove {
    std::size_t vertex = 0;
    Point target;
};

/// Replaces an interior edge by a perpendicular one through its midpoint.
/// `left_end` lies on the side of the edge's left sector.
struct EdgeFlip {
    std::size_t edge = 0;
    Point left_end;
    Point right_end;
};

struct Adjustment {
    std::variant<VertexMove, EdgeFlip> change;
    std::vector<std::size_t> affected;  ///< sorted sector indices
};

/// Symmetric half-step offsets +-(k + 1/2) * step with |offset| <= radius.
std::vector<double> grid_offsets(const SearchConfig& cfg);

/// Grid relocations of v; empty for outer-boundary corners.
std::vector<Adjustment> candidate_vertex_moves(const PlanarSubdivision& sub, std::size_t v,
                                               const SearchConfig& cfg);

/// Nullopt when the flip is unsupported: the edge is on the outer boundary,
/// an endpoint is not an interior degree-3 vertex, or the four sectors
/// around the edge are not distinct.
std::optional<std::vector<Adjustment>> candidate_edge_flips(const PlanarSubdivision& sub,
                                                            std::size_t e, const SearchConfig& cfg);

/// Every vertex move and edge flip that changes sector s, in a fixed order.
std::vector<Adjustment> candidate_adjustments(const PlanarSubdivision& sub, std::size_t s,
                                              const SearchConfig& cfg);

bool is_feasible(const PlanarSubdivision& sub, const Adjustment& adj);

/// Throws ContractViolation when the adjustment is infeasible.
PlanarSubdivision apply(const PlanarSubdivision& sub, const Adjustment& adj);

/// Cost of one sector of a snapshot. Must be safe to call concurrently.
using SectorCostFn = std::function<double(const PlanarSubdivision&, std::size_t)>;

struct LogEntry {
    std::size_t iteration = 0;
    std::size_t target_sector = 0;
    Adjustment adjustment;
    std::vector<double> costs_before;  ///< per affected sector
    std::vector<double> costs_after;
    double max_before = 0.0;           ///< over affected sectors
    double max_after = 0.0;
    double global_max_after = 0.0;     ///< over all sectors
    double total_after = 0.0;
};

struct OptimizationResult {
    PlanarSubdivision sectorization;
    std::vector<LogEntry> log;
    std::vector<double> final_costs;
    bool truncated = false;
    std::size_t candidates_evaluated = 0;
};

/// Prioritized descent: repeatedly take sectors in decreasing cost order and
/// apply the adjustment minimizing the largest cost among the sectors it
/// touches, provided that maximum drops strictly below the popped sector's
/// cost. Stops when no sector admits such an adjustment or after
/// cfg.max_iterations accepted adjustments.
OptimizationResult lrm_optimize(PlanarSubdivision sub, const SectorCostFn& cost,
                                const SearchConfig& cfg);

}  // namespace sectoropt
