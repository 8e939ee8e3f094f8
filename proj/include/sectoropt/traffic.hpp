#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sectoropt/geometry.hpp"
#include "sectoropt/subdivision.hpp"

namespace sectoropt {

class InputError : public Error {
public:
    using Error::Error;
};

/// Entry/exit events could not be resolved even after perturbing the
/// offending segment.
class EventAmbiguityError : public Error {
public:
    EventAmbiguityError(const std::string& flight, const std::string& detail)
        : Error("ambiguous sector events for flight " + flight + ": " + detail), flight_(flight) {}
    const std::string& flight() const noexcept { return flight_; }

private:
    std::string flight_;
};

struct TrackSample {
    double time = 0.0;  ///< seconds
    Point position;

    friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

/// Piecewise-linear aircraft motion through time-stamped samples.
class Trajectory {
public:
    /// Requires at least two samples with strictly increasing times.
    Trajectory(std::string flight_id, std::vector<TrackSample> samples);

    const std::string& flight_id() const noexcept { return flight_id_; }
    const std::vector<TrackSample>& samples() const noexcept { return samples_; }
    double start_time() const { return samples_.front().time; }
    double end_time() const { return samples_.back().time; }
    const BoundingBox& bounds() const noexcept { return bounds_; }

    /// Interpolated position, or nullopt outside [start_time, end_time].
    std::optional<Point> position_at(double t) const;

private:
    std::string flight_id_;
    std::vector<TrackSample> samples_;
    BoundingBox bounds_;
};

struct Horizon {
    double start = 0.0;
    double end = 0.0;

    double length() const { return end - start; }
};

/// Time span [start, end) of trajectory data; Horizon{0, 1} when empty.
Horizon data_horizon(std::span<const Trajectory> tracks);

struct TimeInterval {
    double start = 0.0;
    double end = 0.0;
};

/// Maximal time intervals during which the aircraft is inside the closed
/// polygon. Zero-length touches are dropped.
std::vector<TimeInterval> inside_intervals(const Polygon& sector, const Trajectory& track);

/// Piecewise-constant aircraft count. Each breakpoint's count holds until the
/// next breakpoint (or the horizon end). The first breakpoint sits at
/// horizon.start.
struct CountProfile {
    struct Breakpoint {
        double time;
        int count;
    };
    std::vector<Breakpoint> breakpoints;
    Horizon horizon;

    int count_at(double t) const;
};

CountProfile count_profile(const Polygon& sector, std::span<const Trajectory> tracks, Horizon horizon);

int ac_max(const CountProfile& profile);

/// Time-weighted mean count. Throws InputError on a zero-length horizon.
double ac_avg(const CountProfile& profile);

struct Visit {
    std::string flight_id;
    double entry = 0.0;
    double exit = 0.0;
    double duration() const { return exit - entry; }
};

std::vector<Visit> dwell_times(const Polygon& sector, std::span<const Trajectory> tracks);

double mean_dwell_seconds(std::span<const Visit> visits);

enum class CapacityMethod { Map, Welch, MapFallback };

struct SectorCapacity {
    double value = 0.0;
    CapacityMethod method = CapacityMethod::Map;
    std::string warning;  ///< set when the Welch estimate fell back to MAP
    /// Root the Welch formula produced, kept even when it was rejected.
    std::optional<double> welch_root;
};

/// MAP value: 5/3 of the average dwell time in minutes.
SectorCapacity capacity_map(double avg_dwell_minutes);

/// Quadratic-root estimate with a = 6.8/V, b = a + 0.025 + 7/T, c = 0.7,
/// evaluated literally. Falls back to the MAP value when the root is not a
/// positive real; the fallback is logged unless `log_fallback` is false.
SectorCapacity capacity_welch(double volume_nmi3, double avg_dwell_seconds, bool log_fallback = true);

/// Integral over the horizon of max(AC(t) - K, 0), in aircraft-seconds.
double estimated_delay(const CountProfile& profile, const SectorCapacity& capacity);

/// Aircraft per sector at time t with boundary aircraft assigned to the
/// lowest-index containing sector.
std::vector<int> sector_counts_at(const PlanarSubdivision& sub, std::span<const Trajectory> tracks,
                                  double t);

}  // namespace sectoropt
