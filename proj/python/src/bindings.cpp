#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sectoropt/cli.hpp"
#include "sectoropt/io.hpp"
#include "sectoropt/svg.hpp"

namespace py = pybind11;
using namespace sectoropt;

namespace {

using XY = std::pair<double, double>;

std::vector<Point> to_points(const std::vector<XY>& xy) {
    std::vector<Point> out;
    out.reserve(xy.size());
    for (const auto& [x, y] : xy) out.push_back({x, y});
    return out;
}

std::vector<XY> to_xy(std::span<const Point> pts) {
    std::vector<XY> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.emplace_back(p.x, p.y);
    return out;
}

py::dict log_entry(const LogEntry& e) {
    py::dict d;
    d["iteration"] = e.iteration;
    d["target_sector"] = e.target_sector;
    if (const auto* m = std::get_if<VertexMove>(&e.adjustment.change)) {
        d["kind"] = "vertex_move";
        d["vertex"] = m->vertex;
        d["target"] = XY{m->target.x, m->target.y};
    } else {
        const auto& f = std::get<EdgeFlip>(e.adjustment.change);
        d["kind"] = "edge_flip";
        d["edge"] = f.edge;
        d["ends"] = std::pair{XY{f.left_end.x, f.left_end.y}, XY{f.right_end.x, f.right_end.y}};
    }
    d["affected"] = e.adjustment.affected;
    d["max_before"] = e.max_before;
    d["max_after"] = e.max_after;
    d["global_max_after"] = e.global_max_after;
    d["total_after"] = e.total_after;
    return d;
}

py::dict report_dict(const CostReport& r) {
    py::dict constraints;
    for (std::size_t i = 0; i < kConstraintCount; ++i) {
        const auto& c = r.constraints[i];
        py::dict row;
        row["values"] = c.values;
        row["penalty"] = c.penalty;
        row["weighted"] = c.weighted;
        constraints[py::str(std::string(constraint_key(constraint_at(i))))] = row;
    }
    py::dict d;
    d["sector"] = r.sector;
    d["total"] = r.total;
    d["constraints"] = constraints;
    return d;
}

struct Evaluator {
    RunConfig config;
    SectorEvaluator eval;

    Evaluator(std::vector<Trajectory> tracks, const std::string& config_json,
              const std::vector<std::tuple<std::string, std::vector<XY>, double>>& flows,
              const std::vector<std::pair<std::string, XY>>& critical_points,
              const std::vector<std::vector<XY>>& weather)
        : config(parse_config(config_json)), eval(make_scene(std::move(tracks), flows, critical_points, weather),
                                                  config.evaluation, config.constraints) {}

    static TrafficScene make_scene(std::vector<Trajectory> tracks,
                                   const std::vector<std::tuple<std::string, std::vector<XY>, double>>& flows,
                                   const std::vector<std::pair<std::string, XY>>& cps,
                                   const std::vector<std::vector<XY>>& weather) {
        TrafficScene scene;
        scene.tracks = std::move(tracks);
        for (const auto& [name, pts, w] : flows) scene.flows.push_back({name, to_points(pts), w});
        for (const auto& [id, p] : cps) scene.critical_points.push_back({id, {p.first, p.second}});
        for (const auto& ring : weather) scene.weather.push_back({Polygon::from_any_orientation(to_points(ring)), {}});
        return scene;
    }
};

}  // namespace

PYBIND11_MODULE(_sectoropt, m) {
    m.doc() = "Local-redesign optimizer for airspace sectorizations";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InputError>(m, "InputError", base.ptr());
    py::register_exception<GeometryError>(m, "GeometryError", base.ptr());
    py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());

    py::class_<Trajectory>(m, "Trajectory")
        .def(py::init([](std::string id, const std::vector<std::tuple<double, double, double>>& samples) {
                 std::vector<TrackSample> s;
                 for (const auto& [t, x, y] : samples) s.push_back({t, {x, y}});
                 return Trajectory(std::move(id), std::move(s));
             }),
             py::arg("flight_id"), py::arg("samples"))
        .def_property_readonly("flight_id", &Trajectory::flight_id)
        .def_property_readonly("samples",
                               [](const Trajectory& t) {
                                   std::vector<std::tuple<double, double, double>> out;
                                   for (const auto& s : t.samples()) out.emplace_back(s.time, s.position.x, s.position.y);
                                   return out;
                               })
        .def("position_at", [](const Trajectory& t, double time) -> std::optional<XY> {
            const auto p = t.position_at(time);
            if (!p) return std::nullopt;
            return XY{p->x, p->y};
        });

    py::class_<PlanarSubdivision>(m, "Subdivision")
        .def_static("from_json", [](const std::string& text) { return parse_sectorization(text); })
        .def_static("load", &load_sectorization)
        .def("to_json", &format_sectorization)
        .def("save", &save_sectorization)
        .def_property_readonly("vertices", [](const PlanarSubdivision& s) { return to_xy(s.vertices()); })
        .def_property_readonly("sector_names",
                               [](const PlanarSubdivision& s) {
                                   std::vector<std::string> out;
                                   for (const auto& sec : s.sectors()) out.push_back(sec.name);
                                   return out;
                               })
        .def_property_readonly("sector_count", &PlanarSubdivision::sector_count)
        .def("sector_ring", [](const PlanarSubdivision& s, std::size_t i) { return to_xy(s.sector_ring(i)); })
        .def("sector_area", [](const PlanarSubdivision& s, std::size_t i) { return polygon_area(s.sector_polygon(i)); })
        .def_property_readonly("outer_ring", [](const PlanarSubdivision& s) { return to_xy(s.outer_polygon().vertices()); })
        .def("violations",
             [](const PlanarSubdivision& s) {
                 std::vector<std::string> out;
                 for (const auto& v : validate_subdivision(s)) out.push_back(to_string(v.kind) + ": " + v.message);
                 return out;
             })
        .def("__eq__", [](const PlanarSubdivision& a, const PlanarSubdivision& b) { return a == b; });

    m.def("load_tracks", &load_tracks, py::arg("path"));
    m.def("save_tracks", [](const std::vector<Trajectory>& t, const std::filesystem::path& p) { save_tracks(t, p); },
          py::arg("tracks"), py::arg("path"));

    m.def(
        "penalty",
        [](double value, const std::string& key, const std::string& config_json) {
            const auto id = constraint_from_key(key);
            if (!id) throw InputError("unknown constraint key " + key);
            return penalty(value, parse_config(config_json).constraints[index_of(*id)]);
        },
        py::arg("value"), py::arg("key"), py::arg("config") = "");
    m.def("default_config", [] { return dump_config(RunConfig{}); });

    m.def(
        "sector_traffic",
        [](const std::vector<XY>& ring, const std::vector<Trajectory>& tracks, std::optional<XY> horizon) {
            const auto poly = Polygon::from_any_orientation(to_points(ring));
            const Horizon h = horizon ? Horizon{horizon->first, horizon->second} : data_horizon(tracks);
            const auto prof = count_profile(poly, tracks, h);
            std::vector<double> dwell;
            for (const auto& v : dwell_times(poly, tracks)) dwell.push_back(v.duration());
            py::dict d;
            d["ac_max"] = ac_max(prof);
            d["ac_avg"] = ac_avg(prof);
            d["dwell"] = dwell;
            return d;
        },
        py::arg("ring"), py::arg("tracks"), py::arg("horizon") = std::nullopt);

    m.def(
        "generate_scenario",
        [](std::uint64_t seed, std::size_t flights, std::size_t airports, std::size_t weather_cells,
           std::size_t flow_count, double horizon_s) {
            ScenarioParams p;
            p.seed = seed;
            p.flight_count = flights;
            p.airport_count = airports;
            p.weather_cells = weather_cells;
            p.flow_count = flow_count;
            p.horizon_s = horizon_s;
            const auto sc = generate_scenario(p);
            py::dict d;
            d["region"] = to_xy(sc.region.vertices());
            d["tracks"] = sc.tracks;
            py::list flows, cps, weather;
            for (const auto& f : sc.flows) flows.append(py::make_tuple(f.name, to_xy(f.points), f.weight));
            for (const auto& c : sc.critical_points) cps.append(py::make_tuple(c.id, XY{c.position.x, c.position.y}));
            for (const auto& w : sc.weather) weather.append(to_xy(w.shape.vertices()));
            d["flows"] = flows;
            d["critical_points"] = cps;
            d["weather"] = weather;
            return d;
        },
        py::arg("seed") = 1, py::arg("flights") = 200, py::arg("airports") = 20, py::arg("weather_cells") = 0,
        py::arg("flow_count") = 0, py::arg("horizon_s") = 7200.0);

    m.def(
        "sweep_seed",
        [](const std::vector<XY>& domain, const std::vector<Trajectory>& tracks, std::size_t k, double angle_deg) {
            const double a = angle_deg * 3.14159265358979323846 / 180.0;
            return sweep_seed(Polygon::from_any_orientation(to_points(domain)), tracks, k,
                              {std::cos(a), std::sin(a)});
        },
        py::arg("domain"), py::arg("tracks"), py::arg("k"), py::arg("angle_deg") = 0.0);

    py::class_<Evaluator>(m, "Evaluator")
        .def(py::init<std::vector<Trajectory>, const std::string&,
                      const std::vector<std::tuple<std::string, std::vector<XY>, double>>&,
                      const std::vector<std::pair<std::string, XY>>&, const std::vector<std::vector<XY>>&>(),
             py::arg("tracks"), py::arg("config") = "", py::arg("flows") = py::list(),
             py::arg("critical_points") = py::list(), py::arg("weather") = py::list())
        .def("cost", [](const Evaluator& e, const PlanarSubdivision& s, std::size_t i) { return e.eval.cost(s, i); })
        .def("costs",
             [](const Evaluator& e, const PlanarSubdivision& s) {
                 std::vector<double> out;
                 for (std::size_t i = 0; i < s.sector_count(); ++i) out.push_back(e.eval.cost(s, i));
                 return out;
             })
        .def("report", [](const Evaluator& e, const PlanarSubdivision& s, std::size_t i) {
            return report_dict(e.eval.report(s, i));
        });

    m.def(
        "optimize",
        [](const PlanarSubdivision& sub, const Evaluator& e) {
            OptimizationResult res;
            {
                py::gil_scoped_release release;
                res = lrm_optimize(
                    sub, [&](const PlanarSubdivision& s, std::size_t i) { return e.eval.cost(s, i); },
                    e.config.search);
            }
            py::list log;
            for (const auto& entry : res.log) log.append(log_entry(entry));
            py::dict d;
            d["sectorization"] = res.sectorization;
            d["log"] = log;
            d["final_costs"] = res.final_costs;
            d["truncated"] = res.truncated;
            return d;
        },
        py::arg("sectorization"), py::arg("evaluator"));

    m.def(
        "render_svg",
        [](const PlanarSubdivision& sub, std::optional<std::vector<double>> totals) {
            if (!totals) return render_svg(sub, {}, std::nullopt);
            return render_svg(sub, {}, std::span<const double>(*totals));
        },
        py::arg("sectorization"), py::arg("totals") = std::nullopt);

    m.def("run_cli", &run_cli, py::arg("args"), "Run a CLI subcommand; returns the exit code.");
}
