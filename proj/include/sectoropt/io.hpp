#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sectoropt/cost_model.hpp"
#include "sectoropt/local_search.hpp"
#include "sectoropt/scenario.hpp"

namespace sectoropt {

/// A sectorization file that parsed but breaks subdivision invariants.
class ValidationError : public InputError {
public:
    explicit ValidationError(std::vector<Violation> violations);
    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Sectorization: {"vertices": [{id, x, y}], "edges": [{id, v1, v2, outer}],
// "faces": [{id, name, loop}]}. Vertex references use vertex ids.
PlanarSubdivision parse_sectorization(const std::string& text, const std::string& origin = "<string>");
PlanarSubdivision load_sectorization(const std::filesystem::path& path);
std::string format_sectorization(const PlanarSubdivision& sub);
void save_sectorization(const PlanarSubdivision& sub, const std::filesystem::path& path);

// Tracks CSV with header flight_id,time_s,lon_deg,lat_deg. Flights come back
// ordered by id, samples by time.
std::vector<Trajectory> parse_tracks(const std::string& text, const std::string& origin = "<string>");
std::vector<Trajectory> load_tracks(const std::filesystem::path& path);
void save_tracks(std::span<const Trajectory> tracks, const std::filesystem::path& path);

// {"flows": [{"name", "weight"?, "points": [[x, y], ...]}]}
std::vector<DominantFlow> load_flows(const std::filesystem::path& path);
void save_flows(std::span<const DominantFlow> flows, const std::filesystem::path& path);

// CSV with header id,lon_deg,lat_deg.
std::vector<CriticalPoint> load_critical_points(const std::filesystem::path& path);
void save_critical_points(std::span<const CriticalPoint> points, const std::filesystem::path& path);

// {"cells": [{"polygon": [[x, y], ...], "active": [start_s, end_s]?}]}
std::vector<WeatherObstacle> load_weather(const std::filesystem::path& path);
void save_weather(std::span<const WeatherObstacle> cells, const std::filesystem::path& path);

struct RunConfig {
    ConstraintTable constraints = default_constraint_table();
    SearchConfig search;
    EvaluationSettings evaluation;
};

/// Unknown keys are rejected; anything absent keeps its default.
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");
RunConfig load_config(const std::filesystem::path& path);
/// Canonical pretty-printed form of every setting.
std::string dump_config(const RunConfig& cfg);

/// CSV: sector,name,total and one weighted column per constraint key.
std::string format_cost_report(const PlanarSubdivision& sub, std::span<const CostReport> reports);
std::string format_optimization_log(std::span<const LogEntry> log);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace sectoropt
