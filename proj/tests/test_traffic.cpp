#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace sectoropt;
using fixtures::line_track;

namespace {
const Polygon kSquare({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
}

TEST_CASE("single crossing gives 0 -> 1 -> 0") {
    const std::vector<Trajectory> tracks{line_track("A", {-1, 0.5}, {2, 0.5}, 0, 30)};
    const auto prof = count_profile(kSquare, tracks, {0, 30});
    CHECK(ac_max(prof) == 1);
    CHECK(prof.count_at(5) == 0);
    CHECK(prof.count_at(15) == 1);
    CHECK(prof.count_at(25) == 0);
    CHECK(ac_avg(prof) == doctest::Approx(1.0 / 3));
}

TEST_CASE("empty traffic") {
    const auto prof = count_profile(kSquare, {}, {0, 100});
    CHECK(ac_max(prof) == 0);
    CHECK(ac_avg(prof) == 0.0);
    CHECK(dwell_times(kSquare, std::vector<Trajectory>{}).empty());
}

TEST_CASE("ac_avg examples") {
    // Inside for the first half of the horizon only.
    const std::vector<Trajectory> half{line_track("A", {0.5, 0.5}, {0.5, 0.6}, 0, 50)};
    CHECK(ac_avg(count_profile(kSquare, half, {0, 100})) == doctest::Approx(0.5));
    std::vector<Trajectory> three;
    for (int i = 0; i < 3; ++i) three.push_back(line_track(std::to_string(i), {0.2, 0.2}, {0.8, 0.8}, -10, 200));
    CHECK(ac_avg(count_profile(kSquare, three, {0, 100})) == doctest::Approx(3.0));
    CHECK_THROWS_AS(ac_avg(count_profile(kSquare, three, {5, 5})), InputError);
}

TEST_CASE("dwell times") {
    // 0.1 deg/s through the centre of the unit square.
    const std::vector<Trajectory> center{line_track("A", {-1, 0.5}, {2, 0.5}, 0, 30)};
    const auto visits = dwell_times(kSquare, center);
    REQUIRE(visits.size() == 1);
    CHECK(visits[0].duration() == doctest::Approx(10.0));
    CHECK(dwell_times(kSquare, std::vector<Trajectory>{line_track("B", {2, 2}, {3, 3}, 0, 10)}).empty());

    // Corner clip: the chord from (0.8, 0) to (1, 0.2) at speed 0.01 deg/s.
    const Point a{0.6, -0.2}, b{1.2, 0.4};
    const double speed = 0.01;
    const auto clip = dwell_times(kSquare, std::vector<Trajectory>{line_track("C", a, b, 0, distance(a, b) / speed)});
    REQUIRE(clip.size() == 1);
    CHECK(clip[0].duration() == doctest::Approx(distance({0.8, 0}, {1, 0.2}) / speed).epsilon(1e-12));
}

TEST_CASE("capacity estimates") {
    CHECK(capacity_map(6).value == doctest::Approx(10.0));
    CHECK(capacity_map(3).value == doctest::Approx(5.0));
    CHECK(capacity_map(9.9).value == doctest::Approx(16.5));
    CHECK_THROWS_AS(capacity_map(0), InputError);

    const auto w = capacity_welch(60000, 600, false);
    CHECK(w.method == CapacityMethod::MapFallback);
    CHECK(w.value == doctest::Approx(capacity_map(10).value));
    CHECK_FALSE(w.warning.empty());
    REQUIRE(w.welch_root);
    const auto roots = oracles::quadratic_roots(6.8 / 60000, 6.8 / 60000 + 0.025 + 7.0 / 600, 0.7);
    REQUIRE(roots);
    CHECK(*w.welch_root == doctest::Approx(roots->first).epsilon(1e-9));
    CHECK(*w.welch_root < 0.0);

    // Large volume: a -> 0 and the root tends to -c / b.
    const auto big = capacity_welch(1e12, 600, false);
    CHECK(big.method == CapacityMethod::MapFallback);
    REQUIRE(big.welch_root);
    CHECK(*big.welch_root == doctest::Approx(-0.7 / (0.025 + 7.0 / 600)).epsilon(1e-6));
}

TEST_CASE("estimated delay") {
    std::vector<Trajectory> five;
    for (int i = 0; i < 5; ++i) five.push_back(line_track(std::to_string(i), {0.2, 0.2}, {0.8, 0.8}, -1, 700));
    const auto prof = count_profile(kSquare, five, {0, 600});
    CHECK(estimated_delay(prof, {3.0, CapacityMethod::Map, {}, std::nullopt}) == doctest::Approx(1200.0));
    CHECK(estimated_delay(prof, {5.0, CapacityMethod::Map, {}, std::nullopt}) == 0.0);
}

TEST_CASE("event profile matches refined sampling on random instances") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        const auto tracks = fixtures::random_tracks(rng, 3 + trial, -0.5, 1.5, 600);
        const Horizon h{0, 600};
        const auto prof = count_profile(kSquare, tracks, h);
        const auto oracle = oracles::sampled_profile(kSquare, tracks, h, 0.1);
        CHECK(ac_max(prof) == oracle.max);
        CHECK(ac_avg(prof) == doctest::Approx(oracle.avg).epsilon(1e-6));
        const double cap = 1.5;
        CHECK(estimated_delay(prof, {cap, CapacityMethod::Map, {}, std::nullopt}) ==
              doctest::Approx(oracle.delay(cap)).epsilon(1e-6));
        for (const auto& p : prof.breakpoints) {
            CHECK(ac_avg(prof) >= 0.0);
            CHECK(p.count >= 0);
        }
    }
}

TEST_CASE("visits across a partition add up to domain time") {
    std::mt19937_64 rng(3);
    const auto sub = fixtures::jitter(fixtures::grid(3, 3), 0.1, rng);
    const auto tracks = fixtures::random_tracks(rng, 15, -0.3, 1.3, 1000);
    const auto domain = sub.outer_polygon();
    for (const auto& t : tracks) {
        const std::vector<Trajectory> one{t};
        double across = 0.0;
        for (std::size_t s = 0; s < sub.sector_count(); ++s)
            for (const auto& v : dwell_times(sub.sector_polygon(s), one)) across += v.duration();
        double inside = 0.0;
        for (const auto& v : dwell_times(domain, one)) inside += v.duration();
        CHECK(across == doctest::Approx(inside).epsilon(1e-9));
    }
}

TEST_CASE("trajectory validation") {
    CHECK_THROWS_AS(Trajectory("x", {{0, {0, 0}}}), InputError);
    CHECK_THROWS_AS(Trajectory("x", {{0, {0, 0}}, {0, {1, 1}}}), InputError);
    const Trajectory t("x", {{0, {0, 0}}, {10, {1, 0}}});
    CHECK(t.position_at(5)->x == doctest::Approx(0.5));
    CHECK_FALSE(t.position_at(11));
}
