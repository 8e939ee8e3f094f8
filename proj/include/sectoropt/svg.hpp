#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectoropt/cost_model.hpp"

namespace sectoropt {

struct SvgOverlays {
    std::span<const Trajectory> tracks;
    std::span<const DominantFlow> flows;
    std::span<const CriticalPoint> critical_points;
    std::span<const WeatherObstacle> weather;
};

/// Deterministic SVG drawing. When `totals` is given, each sector gets a
/// text label holding its total cost, formatted for exact round-trip.
std::string render_svg(const PlanarSubdivision& sub, const SvgOverlays& overlays,
                       std::optional<std::span<const double>> totals = std::nullopt);

void render_svg(const PlanarSubdivision& sub, const SvgOverlays& overlays,
                std::optional<std::span<const double>> totals, const std::filesystem::path& path);

}  // namespace sectoropt
