#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sectoropt/cost_model.hpp"
#include "sectoropt/subdivision.hpp"

namespace sectoropt {

class UnsupportedDomainError : public InputError {
public:
    using InputError::InputError;
};

struct ScenarioParams {
    std::uint64_t seed = 1;
    std::size_t airport_count = 20;
    double weight_mean = 1.0;
    double weight_stddev = 0.3;
    double outer_side = 12.0;   ///< degrees
    double region_side = 9.0;   ///< degrees, centered in the outer square
    std::size_t flight_count = 200;
    std::size_t weather_cells = 0;
    double weather_radius_min = 0.3;
    double weather_radius_max = 0.8;
    double horizon_s = 7200.0;
    double speed_deg_per_min = 0.13;
    /// Busiest origin-destination pairs to emit as dominant flows.
    std::size_t flow_count = 0;

    void validate() const;
};

struct Airport {
    std::string id;
    Point position;
    double weight = 1.0;
};

struct Scenario {
    std::vector<Airport> airports;
    Polygon region;  ///< region of interest
    std::vector<Trajectory> tracks;
    std::vector<DominantFlow> flows;
    std::vector<CriticalPoint> critical_points;  ///< airports inside the region
    std::vector<WeatherObstacle> weather;
    Horizon horizon;
};

/// Deterministic in params (including the seed).
Scenario generate_scenario(const ScenarioParams& params);

/// Axis-aligned square [x0, x0 + side] x [y0, y0 + side].
Polygon square(double x0, double y0, double side);

/// Cuts a convex domain into k slabs perpendicular to `direction`, each
/// holding an equal share of the clipped trajectory length.
PlanarSubdivision sweep_seed(const Polygon& domain, std::span<const Trajectory> tracks, std::size_t k,
                             Point direction);

/// Trajectory length inside the closed polygon.
double clipped_length(const Polygon& poly, std::span<const Trajectory> tracks);

}  // namespace sectoropt
