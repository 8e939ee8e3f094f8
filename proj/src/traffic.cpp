#include "sectoropt/traffic.hpp"

#include <algorithm>
#include <spdlog/spdlog.h>

namespace sectoropt {

namespace {

constexpr double kTimeEps = 1e-9;
constexpr double kGrazingShift = 1e-7;

std::vector<std::pair<double, double>> segment_intervals_with_retry(Point a, Point b,
                                                                    const Polygon& sector,
                                                                    const std::string& flight) {
    try {
        return segment_inside_intervals(a, b, sector);
    } catch (const GrazingContactError&) {
        // Shift the segment sideways once; a repeat contact is unresolvable.
        const Point d = b - a;
        const double len = norm(d);
        const Point shift = len > 0.0 ? Point{-d.y / len, d.x / len} * kGrazingShift
                                      : Point{kGrazingShift, kGrazingShift};
        try {
            return segment_inside_intervals(a + shift, b + shift, sector);
        } catch (const GrazingContactError& again) {
            throw EventAmbiguityError(flight, again.what());
        }
    }
}

}  // namespace

Trajectory::Trajectory(std::string flight_id, std::vector<TrackSample> samples)
    : flight_id_(std::move(flight_id)), samples_(std::move(samples)) {
    if (samples_.size() < 2)
        throw InputError("trajectory " + flight_id_ + " needs at least 2 samples");
    std::vector<Point> pts;
    pts.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.time) || !std::isfinite(s.position.x) || !std::isfinite(s.position.y))
            throw InputError("trajectory " + flight_id_ + " has a non-finite sample");
        if (i > 0 && !(s.time > samples_[i - 1].time))
            throw InputError("trajectory " + flight_id_ + " times are not strictly increasing");
        pts.push_back(s.position);
    }
    bounds_ = bounding_box(pts);
}

std::optional<Point> Trajectory::position_at(double t) const {
    if (t < start_time() || t > end_time()) return std::nullopt;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const TrackSample& s) { return v < s.time; });
    if (it == samples_.end()) return samples_.back().position;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    return lerp(lo.position, hi.position, (t - lo.time) / (hi.time - lo.time));
}

Horizon data_horizon(std::span<const Trajectory> tracks) {
    if (tracks.empty()) return {0.0, 1.0};
    Horizon h{tracks[0].start_time(), tracks[0].end_time()};
    for (const auto& t : tracks) {
        h.start = std::min(h.start, t.start_time());
        h.end = std::max(h.end, t.end_time());
    }
    return h;
}

std::vector<TimeInterval> inside_intervals(const Polygon& sector, const Trajectory& track) {
    std::vector<TimeInterval> out;
    if (!track.bounds().overlaps(bounding_box(sector.vertices()))) return out;
    const auto sector_box = bounding_box(sector.vertices());
    const auto& samples = track.samples();
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        const auto& s0 = samples[k];
        const auto& s1 = samples[k + 1];
        if (!bounding_box(std::array{s0.position, s1.position}).overlaps(sector_box)) continue;
        const double dt = s1.time - s0.time;
        for (const auto& [lo, hi] :
             segment_intervals_with_retry(s0.position, s1.position, sector, track.flight_id())) {
            const double start = lo <= 0.0 ? s0.time : s0.time + lo * dt;
            const double end = hi >= 1.0 ? s1.time : s0.time + hi * dt;
            if (!out.empty() && start - out.back().end <= kTimeEps) {
                out.back().end = std::max(out.back().end, end);
            } else {
                out.push_back({start, end});
            }
        }
    }
    std::erase_if(out, [](const TimeInterval& iv) { return iv.end - iv.start <= kTimeEps; });
    return out;
}

int CountProfile::count_at(double t) const {
    if (breakpoints.empty() || t < horizon.start || t > horizon.end) return 0;
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t,
                               [](double v, const Breakpoint& b) { return v < b.time; });
    return (it - 1)->count;
}

CountProfile count_profile(const Polygon& sector, std::span<const Trajectory> tracks, Horizon horizon) {
    if (!(horizon.end >= horizon.start)) throw InputError("horizon end precedes start");
    std::vector<std::pair<double, int>> events;
    for (const auto& track : tracks) {
        for (const auto& iv : inside_intervals(sector, track)) {
            const double s = std::max(iv.start, horizon.start);
            const double e = std::min(iv.end, horizon.end);
            if (e - s <= 0.0) continue;
            events.emplace_back(s, +1);
            events.emplace_back(e, -1);
        }
    }
    std::sort(events.begin(), events.end());

    CountProfile profile;
    profile.horizon = horizon;
    profile.breakpoints.push_back({horizon.start, 0});
    int count = 0;
    for (std::size_t i = 0; i < events.size();) {
        const double t = events[i].first;
        int delta = 0;
        for (; i < events.size() && events[i].first == t; ++i) delta += events[i].second;
        if (delta == 0) continue;
        count += delta;
        if (t >= horizon.end) continue;
        if (t <= horizon.start) {
            profile.breakpoints.front().count = count;
        } else {
            profile.breakpoints.push_back({t, count});
        }
    }
    return profile;
}

int ac_max(const CountProfile& profile) {
    int best = 0;
    for (const auto& b : profile.breakpoints) best = std::max(best, b.count);
    return best;
}

double ac_avg(const CountProfile& profile) {
    const double len = profile.horizon.length();
    if (!(len > 0.0)) throw InputError("average aircraft count needs a positive-length horizon");
    double integral = 0.0;
    const auto& bp = profile.breakpoints;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const double next = i + 1 < bp.size() ? bp[i + 1].time : profile.horizon.end;
        integral += bp[i].count * (next - bp[i].time);
    }
    return integral / len;
}

std::vector<Visit> dwell_times(const Polygon& sector, std::span<const Trajectory> tracks) {
    std::vector<Visit> visits;
    for (const auto& track : tracks) {
        for (const auto& iv : inside_intervals(sector, track)) {
            visits.push_back({track.flight_id(), iv.start, iv.end});
        }
    }
    return visits;
}

double mean_dwell_seconds(std::span<const Visit> visits) {
    if (visits.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& v : visits) sum += v.duration();
    return sum / static_cast<double>(visits.size());
}

SectorCapacity capacity_map(double avg_dwell_minutes) {
    if (!(avg_dwell_minutes > 0.0) || !std::isfinite(avg_dwell_minutes))
        throw InputError("MAP capacity needs a positive average dwell time");
    return {5.0 / 3.0 * avg_dwell_minutes, CapacityMethod::Map, {}, std::nullopt};
}

SectorCapacity capacity_welch(double volume_nmi3, double avg_dwell_seconds, bool log_fallback) {
    if (!(volume_nmi3 > 0.0) || !(avg_dwell_seconds > 0.0))
        throw InputError("Welch capacity needs positive volume and dwell time");
    const double a = 6.8 / volume_nmi3;
    const double b = a + 0.025 + 7.0 / avg_dwell_seconds;
    const double c = 0.7;
    const double disc = b * b - 4.0 * a * c;
    std::optional<double> root;
    if (disc >= 0.0) {
        // Larger root, in the cancellation-free form.
        const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
        const double k = b >= 0.0 ? c / q : q / a;
        if (k > 0.0 && std::isfinite(k)) return {k, CapacityMethod::Welch, {}, k};
        root = k;
    }
    auto fallback = capacity_map(avg_dwell_seconds / 60.0);
    fallback.method = CapacityMethod::MapFallback;
    fallback.welch_root = root;
    fallback.warning = fmt::format(
        "Welch capacity has no positive root (V={} nmi^3, T={} s, discriminant={}); using MAP value {}",
        volume_nmi3, avg_dwell_seconds, disc, fallback.value);
    if (log_fallback) spdlog::warn("{}", fallback.warning);
    return fallback;
}

double estimated_delay(const CountProfile& profile, const SectorCapacity& capacity) {
    double delay = 0.0;
    const auto& bp = profile.breakpoints;
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const double next = i + 1 < bp.size() ? bp[i + 1].time : profile.horizon.end;
        const double over = bp[i].count - capacity.value;
        if (over > 0.0) delay += over * (next - bp[i].time);
    }
    return delay;
}

std::vector<int> sector_counts_at(const PlanarSubdivision& sub, std::span<const Trajectory> tracks,
                                  double t) {
    std::vector<int> counts(sub.sector_count(), 0);
    for (const auto& track : tracks) {
        const auto p = track.position_at(t);
        if (!p) continue;
        const auto s = owning_sector(sub, *p);
        if (s != kNoSector) ++counts[s];
    }
    return counts;
}

}  // namespace sectoropt
