#include "sectoropt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "sectoropt/io.hpp"
#include "sectoropt/scenario.hpp"
#include "sectoropt/svg.hpp"

namespace sectoropt {

namespace {

namespace fs = std::filesystem;

struct Inputs {
    std::string sectors;
    std::string tracks;
    std::string flows;
    std::string critical_points;
    std::string weather;
    std::string config;
    std::string out_dir;
    bool svg = false;
};

void add_scene_options(CLI::App& cmd, Inputs& in, bool tracks_required) {
    cmd.add_option("--sectors", in.sectors, "Sectorization JSON")->required();
    auto* tracks = cmd.add_option("--tracks", in.tracks, "Track CSV");
    if (tracks_required) tracks->required();
    cmd.add_option("--flows", in.flows, "Dominant flows JSON");
    cmd.add_option("--critical-points", in.critical_points, "Critical point CSV");
    cmd.add_option("--weather", in.weather, "Weather cells JSON");
    cmd.add_option("--config", in.config, "Run configuration JSON");
}

TrafficScene load_scene(const Inputs& in) {
    TrafficScene scene;
    if (!in.tracks.empty()) scene.tracks = load_tracks(in.tracks);
    if (!in.flows.empty()) scene.flows = load_flows(in.flows);
    if (!in.critical_points.empty()) scene.critical_points = load_critical_points(in.critical_points);
    if (!in.weather.empty()) scene.weather = load_weather(in.weather);
    return scene;
}

RunConfig load_run_config(const Inputs& in) { return in.config.empty() ? RunConfig{} : load_config(in.config); }

fs::path prepare_out_dir(const std::string& dir) {
    fs::path p(dir);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw InputError(fmt::format("cannot create output directory {}: {}", dir, ec.message()));
    return p;
}

std::vector<CostReport> report_all(const SectorEvaluator& eval, const PlanarSubdivision& sub) {
    std::vector<CostReport> out;
    for (std::size_t s = 0; s < sub.sector_count(); ++s) out.push_back(eval.report(sub, s));
    return out;
}

std::vector<double> totals_of(std::span<const CostReport> reports) {
    std::vector<double> out;
    for (const auto& r : reports) out.push_back(r.total);
    return out;
}

SvgOverlays overlays_of(const TrafficScene& scene) {
    return {scene.tracks, scene.flows, scene.critical_points, scene.weather};
}

int cmd_optimize(const Inputs& in) {
    auto sub = load_sectorization(in.sectors);
    const auto cfg = load_run_config(in);
    const SectorEvaluator eval(load_scene(in), cfg.evaluation, cfg.constraints);
    const auto out = prepare_out_dir(in.out_dir);

    const auto before = report_all(eval, sub);
    spdlog::info("optimizing {} sectors", sub.sector_count());
    const auto result = lrm_optimize(
        sub, [&](const PlanarSubdivision& s, std::size_t i) { return eval.cost(s, i); }, cfg.search);
    const auto after = report_all(eval, result.sectorization);

    save_sectorization(result.sectorization, out / "sectors_optimized.json");
    write_text(out / "costs_before.csv", format_cost_report(sub, before));
    write_text(out / "costs_after.csv", format_cost_report(result.sectorization, after));
    write_text(out / "optimization_log.csv", format_optimization_log(result.log));
    if (in.svg) {
        const auto overlays = overlays_of(eval.scene());
        const auto tb = totals_of(before);
        const auto ta = totals_of(after);
        render_svg(sub, overlays, std::span<const double>(tb), out / "before.svg");
        render_svg(result.sectorization, overlays, std::span<const double>(ta), out / "after.svg");
    }
    spdlog::info("accepted {} adjustments", result.log.size());
    return result.truncated ? kExitTruncated : kExitOk;
}

int cmd_evaluate(const Inputs& in) {
    const auto sub = load_sectorization(in.sectors);
    const auto cfg = load_run_config(in);
    const SectorEvaluator eval(load_scene(in), cfg.evaluation, cfg.constraints);
    const auto out = prepare_out_dir(in.out_dir);
    const auto reports = report_all(eval, sub);
    write_text(out / "costs.csv", format_cost_report(sub, reports));
    if (in.svg) {
        const auto totals = totals_of(reports);
        render_svg(sub, overlays_of(eval.scene()), std::span<const double>(totals), out / "sectors.svg");
    }
    return kExitOk;
}

int cmd_render(const Inputs& in) {
    const auto sub = load_sectorization(in.sectors);
    const auto scene = load_scene(in);
    const auto out = prepare_out_dir(in.out_dir);
    if (in.tracks.empty()) {
        render_svg(sub, overlays_of(scene), std::nullopt, out / "sectors.svg");
        return kExitOk;
    }
    const auto cfg = load_run_config(in);
    const SectorEvaluator eval(scene, cfg.evaluation, cfg.constraints);
    const auto totals = totals_of(report_all(eval, sub));
    render_svg(sub, overlays_of(eval.scene()), std::span<const double>(totals), out / "sectors.svg");
    return kExitOk;
}

struct SweepOptions {
    std::size_t k = 4;
    double angle_deg = 0.0;
};

int cmd_seed_sweep(const Inputs& in, const SweepOptions& opt) {
    const auto tracks = load_tracks(in.tracks);
    const ScenarioParams defaults;
    const double margin = (defaults.outer_side - defaults.region_side) / 2.0;
    const Polygon domain = in.sectors.empty() ? square(margin, margin, defaults.region_side)
                                              : load_sectorization(in.sectors).outer_polygon();
    const double a = opt.angle_deg * std::numbers::pi / 180.0;
    const auto sub = sweep_seed(domain, tracks, opt.k, {std::cos(a), std::sin(a)});
    const auto out = prepare_out_dir(in.out_dir);
    save_sectorization(sub, out / "sectors_seed.json");
    if (in.svg) render_svg(sub, SvgOverlays{tracks, {}, {}, {}}, std::nullopt, out / "sectors_seed.svg");
    return kExitOk;
}

int cmd_generate(const ScenarioParams& params, const Inputs& in) {
    const auto sc = generate_scenario(params);
    const auto out = prepare_out_dir(in.out_dir);
    save_tracks(sc.tracks, out / "tracks.csv");
    save_flows(sc.flows, out / "flows.json");
    save_critical_points(sc.critical_points, out / "critical_points.csv");
    save_weather(sc.weather, out / "weather.json");

    const auto& ring = sc.region.vertices();
    std::vector<SubdivisionEdge> edges;
    std::vector<std::size_t> loop;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        edges.push_back({i, (i + 1) % ring.size(), true});
        loop.push_back(i);
    }
    save_sectorization(PlanarSubdivision(ring, edges, {Sector{"region", loop}}), out / "region.json");
    return kExitOk;
}

void init_logging() {
    static std::once_flag once;
    std::call_once(once, [] {
        auto logger = spdlog::stderr_color_mt("sectoropt");
        logger->set_pattern("[%l] %v");
        spdlog::set_default_logger(logger);
    });
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    init_logging();
    CLI::App app{"Local-redesign optimizer for airspace sectorizations"};
    app.require_subcommand(1);

    Inputs in;
    SweepOptions sweep;
    ScenarioParams params;

    auto* optimize = app.add_subcommand("optimize", "Run local search on a seed sectorization");
    add_scene_options(*optimize, in, true);
    optimize->add_option("--out-dir", in.out_dir, "Output directory")->required();
    optimize->add_flag("--svg", in.svg, "Also write before/after SVG drawings");

    auto* evaluate = app.add_subcommand("evaluate", "Write the per-sector cost report");
    add_scene_options(*evaluate, in, true);
    evaluate->add_option("--out-dir", in.out_dir, "Output directory")->required();
    evaluate->add_flag("--svg", in.svg, "Also write an SVG drawing");

    auto* render = app.add_subcommand("render", "Draw a sectorization as SVG");
    add_scene_options(*render, in, false);
    render->add_option("--out-dir", in.out_dir, "Output directory")->required();

    auto* seed = app.add_subcommand("seed-sweep", "Partition a convex domain by sweeping");
    seed->add_option("--tracks", in.tracks, "Track CSV")->required();
    seed->add_option("--sectors", in.sectors, "Sectorization whose outer boundary is the domain");
    seed->add_option("--count", sweep.k, "Number of sectors")->check(CLI::PositiveNumber);
    seed->add_option("--angle", sweep.angle_deg, "Sweep direction in degrees from the x axis");
    seed->add_option("--out-dir", in.out_dir, "Output directory")->required();
    seed->add_flag("--svg", in.svg, "Also write an SVG drawing");

    auto* generate = app.add_subcommand("generate", "Write a synthetic traffic scenario");
    generate->add_option("--seed", params.seed, "Random seed");
    generate->add_option("--airports", params.airport_count, "Airport count");
    generate->add_option("--flights", params.flight_count, "Flight count");
    generate->add_option("--weather-cells", params.weather_cells, "Weather cell count");
    generate->add_option("--flow-count", params.flow_count, "Busiest routes emitted as dominant flows");
    generate->add_option("--horizon", params.horizon_s, "Horizon length in seconds");
    generate->add_option("--out-dir", in.out_dir, "Output directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (*optimize) return cmd_optimize(in);
        if (*evaluate) return cmd_evaluate(in);
        if (*render) return cmd_render(in);
        if (*seed) return cmd_seed_sweep(in, sweep);
        if (*generate) return cmd_generate(params, in);
    } catch (const InputError& e) {
        spdlog::error("{}", e.what());
        return kExitInputError;
    } catch (const GeometryError& e) {
        spdlog::error("{}", e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace sectoropt
