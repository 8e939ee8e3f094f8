#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sectoropt/subdivision.hpp"
#include "sectoropt/throughput.hpp"
#include "sectoropt/traffic.hpp"

namespace sectoropt {

/// Rows of the constraint table, numbered as in the table.
enum class ConstraintId : int {
    AcAvg = 1,
    AcMax,
    Delay,
    Throughput,
    DwellTime,
    CrossingAngle,
    FlowDistance,
    CriticalPointDistance,
    MinAngle,
    MaxAngle,
    Convexity,
    EdgeLength,
};

inline constexpr std::size_t kConstraintCount = 12;
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline std::size_t index_of(ConstraintId id) { return static_cast<std::size_t>(id) - 1; }
inline ConstraintId constraint_at(std::size_t index) { return static_cast<ConstraintId>(index + 1); }

/// Config key for a row, e.g. "ac_avg" or "min_angle".
std::string_view constraint_key(ConstraintId id);
std::optional<ConstraintId> constraint_from_key(std::string_view key);

enum class Bound { Upper, Lower };

struct ConstraintSpec {
    ConstraintId id = ConstraintId::AcAvg;
    std::optional<double> threshold;  ///< T_c; rows 1-2 have no default
    double limit = kUnbounded;        ///< L_c
    double weight = 1.0;              ///< w_c
    Bound bound = Bound::Upper;

    bool unbounded() const { return std::isinf(limit); }
};

using ConstraintTable = std::array<ConstraintSpec, kConstraintCount>;

/// The table's default thresholds and limits, all weights 1.
ConstraintTable default_constraint_table();

/// Throws InputError when a threshold is missing for a weighted row, sits on
/// the wrong side of its limit, or a weight is negative.
void validate_constraint_table(const ConstraintTable& table);

/// Penalty of one parameter value. Zero on the feasible side of T_c, exactly
/// 1 at T_c, (T-L)/(p-L) toward a finite limit and (p-T)^2 + 1 past T_c for
/// an unbounded one. Returns +infinity at or beyond a finite limit.
double penalty(double p, const ConstraintSpec& spec);

struct DominantFlow {
    std::string name;
    std::vector<Point> points;
    double weight = 1.0;
};

struct CriticalPoint {
    std::string id;
    Point position;
};

/// Everything besides the sectorization that the objective depends on.
struct TrafficScene {
    std::vector<Trajectory> tracks;
    std::vector<DominantFlow> flows;
    std::vector<CriticalPoint> critical_points;
    std::vector<WeatherObstacle> weather;
};

struct EvaluationSettings {
    CapacityMethod capacity_method = CapacityMethod::Map;
    double lane_width = 0.13;             ///< degrees
    std::optional<Horizon> horizon;       ///< defaults to the track data span
    double nmi_per_degree = 60.0;
    double altitude_slab_nmi = 6.0;
};

/// One sector of one sectorization snapshot with its traffic-derived inputs.
struct SectorContext {
    const PlanarSubdivision* subdivision = nullptr;
    std::size_t sector = 0;
    Polygon polygon;
    std::vector<bool> interior_edge;  ///< per polygon edge: shared with another sector
    Horizon horizon;
    CountProfile profile;
    std::vector<Visit> visits;
    std::optional<SectorCapacity> capacity;  ///< absent when nothing visits
    std::span<const DominantFlow> flows;
    std::vector<CriticalPoint> critical_points;  ///< those attributed to this sector
    std::span<const WeatherObstacle> weather;
    double lane_width = 0.13;
};

SectorContext make_sector_context(const PlanarSubdivision& sub, std::size_t sector,
                                  const TrafficScene& scene, const EvaluationSettings& settings);

/// Parameter instances per row, indexed by index_of(id).
using ParameterMap = std::array<std::vector<double>, kConstraintCount>;

ParameterMap evaluate_parameters(const SectorContext& ctx);

struct ConstraintCost {
    std::vector<double> values;
    double penalty = 0.0;   ///< sum over instances
    double weighted = 0.0;  ///< weight * penalty
};

struct CostReport {
    std::size_t sector = 0;
    std::array<ConstraintCost, kConstraintCount> constraints;
    double total = 0.0;

    bool infeasible() const { return std::isinf(total); }
};

CostReport sector_cost(const SectorContext& ctx, const ConstraintTable& table);

/// Scores sectors of arbitrary snapshots against one fixed scene. Rows with
/// zero weight are skipped.
class SectorEvaluator {
public:
    SectorEvaluator(TrafficScene scene, EvaluationSettings settings, ConstraintTable table);

    CostReport report(const PlanarSubdivision& sub, std::size_t sector) const;
    double cost(const PlanarSubdivision& sub, std::size_t sector) const {
        return report(sub, sector).total;
    }

    const TrafficScene& scene() const noexcept { return scene_; }
    const EvaluationSettings& settings() const noexcept { return settings_; }
    const ConstraintTable& table() const noexcept { return table_; }

private:
    TrafficScene scene_;
    EvaluationSettings settings_;
    ConstraintTable table_;
};

}  // namespace sectoropt
