#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "sectoropt/cli.hpp"
#include "sectoropt/io.hpp"
#include "sectoropt/svg.hpp"

using namespace sectoropt;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SECTOROPT_TEST_DATA;

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() / fmt::format("sectoropt_io_{}_{}", ::getpid(), counter++);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

constexpr const char* kCrossing = R"({
  "vertices": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0},
               {"id": 2, "x": 1, "y": 1}, {"id": 3, "x": 0, "y": 1}],
  "edges": [{"id": 0, "v1": 0, "v2": 1, "outer": true}, {"id": 1, "v1": 1, "v2": 2, "outer": true},
            {"id": 2, "v1": 2, "v2": 3, "outer": true}, {"id": 3, "v1": 3, "v2": 0, "outer": true},
            {"id": 4, "v1": 0, "v2": 2}, {"id": 5, "v1": 1, "v2": 3}],
  "faces": [{"id": 0, "loop": [0, 1, 2]}, {"id": 1, "loop": [0, 2, 3]}]
})";

}  // namespace

TEST_CASE("load the two-rectangle file") {
    const auto sub = load_sectorization(kData / "two_rectangles.json");
    CHECK(sub.vertices().size() == 6);
    CHECK(sub.edges().size() == 7);
    CHECK(sub.sector_count() == 2);
    CHECK(sub.sectors()[1].name == "EAST");
    CHECK(sub.sectors()[0].loop == std::vector<std::size_t>{0, 1, 4, 3});
    CHECK(validate_subdivision(sub).empty());
}

TEST_CASE("crossing edges fail validation naming both") {
    try {
        (void)parse_sectorization(kCrossing);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const auto& v = e.violations();
        const auto it = std::find_if(v.begin(), v.end(), [](const Violation& x) { return x.kind == ViolationKind::Planarity; });
        REQUIRE(it != v.end());
        CHECK(it->edges == std::vector<std::size_t>{4, 5});
        const std::string msg = e.what();
        CHECK(msg.find('4') != std::string::npos);
        CHECK(msg.find('5') != std::string::npos);
    }
}

TEST_CASE("malformed sectorization input") {
    CHECK_THROWS_AS(parse_sectorization("{"), InputError);
    CHECK_THROWS_AS(parse_sectorization(R"({"vertices": []})"), InputError);
    CHECK_THROWS_AS(load_sectorization(kData / "missing.json"), InputError);
    const std::string dangling = R"({"vertices": [{"id": 0, "x": 0, "y": 0}], "edges": [{"id": 0, "v1": 0, "v2": 7}], "faces": []})";
    CHECK_THROWS_AS(parse_sectorization(dangling), InputError);
}

TEST_CASE("sectorization round trip") {
    std::mt19937_64 rng(71);
    const auto sub = fixtures::jitter(fixtures::grid(3, 2), 0.1, rng);
    const auto text = format_sectorization(sub);
    const auto back = parse_sectorization(text);
    CHECK(back == sub);
    CHECK(format_sectorization(back) == text);
}

TEST_CASE("track csv parsing") {
    const auto one = parse_tracks("flight_id,time_s,lon_deg,lat_deg\nA,0,1,2\nA,10,3,4\n");
    REQUIRE(one.size() == 1);
    CHECK(one[0].flight_id() == "A");
    CHECK(one[0].samples().size() == 2);
    CHECK(one[0].samples()[1].position == Point{3, 4});

    CHECK(parse_tracks("").empty());
    CHECK(parse_tracks("flight_id,time_s,lon_deg,lat_deg\n").empty());

    const auto shuffled = parse_tracks(
        "flight_id,time_s,lon_deg,lat_deg\nB,5,0,0\nA,10,3,4\nB,0,1,1\nA,0,1,2\nB,9,2,2\n");
    REQUIRE(shuffled.size() == 2);
    CHECK(shuffled[0].flight_id() == "A");
    CHECK(shuffled[1].samples().size() == 3);
    CHECK(shuffled[1].samples()[0].time == 0.0);
    CHECK(shuffled[1].samples()[2].time == 9.0);

    CHECK_THROWS_AS(parse_tracks("flight_id,time_s,lon_deg,lat_deg\nA,0,1,2\nA,0,3,4\n"), InputError);
    CHECK_THROWS_AS(parse_tracks("flight_id,time_s,lon_deg,lat_deg\nA,0,1,2\n"), InputError);
    CHECK_THROWS_AS(parse_tracks("flight_id,time_s,lon_deg,lat_deg\nA,x,1,2\nA,1,1,2\n"), InputError);
    CHECK_THROWS_AS(parse_tracks("id,t,x,y\nA,0,1,2\nA,1,1,2\n"), InputError);
}

TEST_CASE("track and overlay files round trip") {
    TempDir dir;
    std::mt19937_64 rng(73);
    const auto tracks = fixtures::random_tracks(rng, 5, 0, 1, 100);
    save_tracks(tracks, dir.path / "t.csv");
    const auto back = load_tracks(dir.path / "t.csv");
    REQUIRE(back.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(back[i].samples() == tracks[i].samples());

    const std::vector<DominantFlow> flows{{"F", {{0, 0}, {1, 1}, {2, 1}}, 3.0}};
    save_flows(flows, dir.path / "f.json");
    const auto f = load_flows(dir.path / "f.json");
    REQUIRE(f.size() == 1);
    CHECK(f[0].points == flows[0].points);
    CHECK(f[0].weight == 3.0);

    const std::vector<CriticalPoint> cps{{"X", {0.25, 0.75}}};
    save_critical_points(cps, dir.path / "c.csv");
    const auto c = load_critical_points(dir.path / "c.csv");
    REQUIRE(c.size() == 1);
    CHECK(c[0].position == cps[0].position);

    const std::vector<WeatherObstacle> wx{{square(0, 0, 0.5), TimeInterval{10, 20}}};
    save_weather(wx, dir.path / "w.json");
    const auto w = load_weather(dir.path / "w.json");
    REQUIRE(w.size() == 1);
    CHECK(w[0].shape.vertices() == wx[0].shape.vertices());
    REQUIRE(w[0].active);
    CHECK(w[0].active->end == 20.0);
}

TEST_CASE("empty config gives the defaults") {
    const auto cfg = parse_config("");
    CHECK(dump_config(cfg) == read_text(kData / "default_config.json"));
    CHECK(dump_config(parse_config("{}")) == dump_config(cfg));
    CHECK_FALSE(cfg.constraints[0].threshold);
    CHECK(cfg.search.grid_radius == 0.4);
    CHECK(cfg.search.grid_step == 0.15);
}

TEST_CASE("config overrides and rejection") {
    const auto cfg = load_config(kData / "sample_config.json");
    CHECK(*cfg.constraints[0].threshold == 8.0);
    CHECK(*cfg.constraints[1].threshold == 18.0);
    CHECK(cfg.search.threads == 2);
    CHECK(dump_config(parse_config(dump_config(cfg))) == dump_config(cfg));

    CHECK_THROWS_AS(parse_config(R"({"colour": 1})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"constraints": {"nope": {"threshold": 1}}})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"constraints": {"min_angle": {"thresh": 1}}})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"constraints": {"min_angle": {"threshold": -5}}})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"search": {"grid_step": 2}})"), InputError);
    CHECK_THROWS_AS(parse_config(R"({"capacity_method": "guess"})"), InputError);
}

TEST_CASE("svg rendering") {
    const auto sub = fixtures::two_rectangles();
    const auto plain = render_svg(sub, {}, std::nullopt);
    CHECK(plain == render_svg(sub, {}, std::nullopt));
    CHECK(plain.find("<polygon data-sector=\"0\"") != std::string::npos);
    CHECK(plain.find("<polygon data-sector=\"1\"") != std::string::npos);
    CHECK(plain.find("<text") == std::string::npos);
    CHECK(plain.find("<polyline") == std::string::npos);

    const std::vector<double> totals{1.5, 0.0};
    const auto labelled = render_svg(sub, {}, std::span<const double>(totals));
    CHECK(labelled.find(">1.5</text>") != std::string::npos);
    CHECK(labelled.find("data-sector=\"1\"") != std::string::npos);
    CHECK(labelled.find(">0</text>") != std::string::npos);
    const std::vector<double> wrong{1.0};
    CHECK_THROWS_AS(render_svg(sub, {}, std::span<const double>(wrong)), InputError);
}

TEST_CASE("cost report columns") {
    const auto sub = fixtures::two_rectangles();
    const SectorEvaluator eval(TrafficScene{}, EvaluationSettings{}, fixtures::silent_table());
    std::vector<CostReport> reports{eval.report(sub, 0), eval.report(sub, 1)};
    const auto csv = format_cost_report(sub, reports);
    CHECK(csv.rfind("sector,name,total,ac_avg,ac_max,delay,throughput,dwell_time,crossing_angle,flow_distance,"
                    "critical_point_distance,min_angle,max_angle,convexity,edge_length\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("cli exit codes") {
    TempDir dir;
    const auto sectors = (kData / "two_rectangles.json").string();
    const auto out = (dir.path / "out").string();
    write_text(dir.path / "tracks.csv", "flight_id,time_s,lon_deg,lat_deg\nA,0,5,5\nA,10,6,6\n");
    write_text(dir.path / "cfg.json", R"({"constraints": {"ac_avg": {"threshold": 5}, "ac_max": {"threshold": 5}, "delay": {"weight": 0}}})");
    const auto tracks = (dir.path / "tracks.csv").string();
    const auto cfg = (dir.path / "cfg.json").string();

    SUBCASE("feasible input is left alone") {
        CHECK(run_cli({"optimize", "--sectors", sectors, "--tracks", tracks, "--config", cfg, "--out-dir", out,
                       "--svg"}) == kExitOk);
        CHECK(load_sectorization(fs::path(out) / "sectors_optimized.json") == load_sectorization(sectors));
        CHECK(read_text(fs::path(out) / "optimization_log.csv").find('\n') ==
              read_text(fs::path(out) / "optimization_log.csv").size() - 1);
        CHECK(fs::exists(fs::path(out) / "before.svg"));
        CHECK(fs::exists(fs::path(out) / "after.svg"));
        CHECK(read_text(fs::path(out) / "costs_before.csv") == read_text(fs::path(out) / "costs_after.csv"));
    }
    SUBCASE("missing traffic file") {
        CHECK(run_cli({"optimize", "--sectors", sectors, "--tracks", (dir.path / "none.csv").string(), "--out-dir",
                       out}) == kExitInputError);
    }
    SUBCASE("bad arguments") {
        CHECK(run_cli({"optimize", "--sectors", sectors}) == kExitInputError);
        CHECK(run_cli({"frobnicate"}) == kExitInputError);
        CHECK(run_cli({}) == kExitInputError);
    }
    SUBCASE("evaluate and render") {
        CHECK(run_cli({"evaluate", "--sectors", sectors, "--tracks", tracks, "--out-dir", out}) == kExitInputError);
        CHECK(run_cli({"evaluate", "--sectors", sectors, "--tracks", tracks, "--config", cfg, "--out-dir", out,
                       "--svg"}) == kExitOk);
        CHECK(fs::exists(fs::path(out) / "costs.csv"));
        CHECK(run_cli({"render", "--sectors", sectors, "--out-dir", out}) == kExitOk);
        CHECK(fs::exists(fs::path(out) / "sectors.svg"));
    }
    SUBCASE("generate then seed") {
        CHECK(run_cli({"generate", "--seed", "4", "--flights", "60", "--out-dir", out}) == kExitOk);
        CHECK(run_cli({"seed-sweep", "--tracks", (fs::path(out) / "tracks.csv").string(), "--count", "3",
                       "--out-dir", out}) == kExitOk);
        const auto seed = load_sectorization(fs::path(out) / "sectors_seed.json");
        CHECK(seed.sector_count() == 3);
        CHECK(validate_subdivision(seed).empty());
    }
}
