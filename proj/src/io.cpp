#include "sectoropt/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

namespace sectoropt {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string describe_violations(const std::vector<Violation>& violations) {
    std::string out = "sectorization is invalid:";
    for (const auto& v : violations) out += fmt::format("\n  [{}] {}", to_string(v.kind), v.message);
    return out;
}

json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw InputError(fmt::format("{}: {}", origin, e.what()));
    }
}

template <class T>
T field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw InputError(fmt::format("{}: missing field '{}'", where, key));
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(fmt::format("{}: field '{}' has the wrong type", where, key));
    }
}

const json& array_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key) || !obj.at(key).is_array())
        throw InputError(fmt::format("{}: '{}' must be an array", where, key));
    return obj.at(key);
}

Point parse_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw InputError(fmt::format("{}: expected [x, y]", where));
    return {j[0].get<double>(), j[1].get<double>()};
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

struct CsvRow {
    std::size_t line;
    std::vector<std::string> cells;
};

std::vector<CsvRow> parse_csv(const std::string& text, const std::vector<std::string>& header,
                              const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    std::vector<CsvRow> rows;
    bool have_header = false;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::string_view rest = line;
        while (true) {
            const auto comma = rest.find(',');
            cells.emplace_back(trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (!have_header) {
            if (cells != header)
                throw InputError(fmt::format("{}:{}: expected header '{}'", origin, number, fmt::join(header, ",")));
            have_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw InputError(fmt::format("{}:{}: expected {} fields, got {}", origin, number, header.size(),
                                         cells.size()));
        rows.push_back({number, std::move(cells)});
    }
    return rows;
}

double parse_number(const std::string& cell, const std::string& origin, std::size_t line, const char* name) {
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw InputError(fmt::format("{}:{}: field {} is not a finite number: '{}'", origin, line, name, cell));
    return value;
}

std::string num(double v) { return fmt::format("{}", v); }

void reject_unknown(const json& obj, std::initializer_list<std::string_view> known, const std::string& where) {
    if (!obj.is_object()) throw InputError(fmt::format("{} must be an object", where));
    for (const auto& [key, _] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InputError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

std::string adjustment_kind(const Adjustment& adj) {
    return std::holds_alternative<VertexMove>(adj.change) ? "vertex_move" : "edge_flip";
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : InputError(describe_violations(violations)), violations_(std::move(violations)) {}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(fmt::format("cannot read {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(fmt::format("cannot write {}", path.string()));
    out << text;
    if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

PlanarSubdivision parse_sectorization(const std::string& text, const std::string& origin) {
    const json doc = parse_json(text, origin);
    std::map<long long, std::size_t> vertex_index;
    std::vector<Point> vertices;
    const auto& jv = array_field(doc, "vertices", origin);
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const auto where = fmt::format("{}: vertices[{}]", origin, i);
        const auto id = field<long long>(jv[i], "id", where);
        if (!vertex_index.emplace(id, vertices.size()).second)
            throw InputError(fmt::format("{}: duplicate vertex id {}", where, id));
        vertices.push_back({field<double>(jv[i], "x", where), field<double>(jv[i], "y", where)});
    }
    auto vertex_ref = [&](long long id, const std::string& where) {
        const auto it = vertex_index.find(id);
        if (it == vertex_index.end()) throw InputError(fmt::format("{}: unknown vertex id {}", where, id));
        return it->second;
    };

    std::vector<SubdivisionEdge> edges;
    std::set<long long> edge_ids;
    const auto& je = array_field(doc, "edges", origin);
    for (std::size_t i = 0; i < je.size(); ++i) {
        const auto where = fmt::format("{}: edges[{}]", origin, i);
        const auto id = field<long long>(je[i], "id", where);
        if (!edge_ids.insert(id).second) throw InputError(fmt::format("{}: duplicate edge id {}", where, id));
        edges.push_back({vertex_ref(field<long long>(je[i], "v1", where), where),
                         vertex_ref(field<long long>(je[i], "v2", where), where),
                         je[i].contains("outer") ? field<bool>(je[i], "outer", where) : false});
    }

    std::vector<Sector> sectors;
    std::set<long long> face_ids;
    const auto& jf = array_field(doc, "faces", origin);
    for (std::size_t i = 0; i < jf.size(); ++i) {
        const auto where = fmt::format("{}: faces[{}]", origin, i);
        const auto id = field<long long>(jf[i], "id", where);
        if (!face_ids.insert(id).second) throw InputError(fmt::format("{}: duplicate face id {}", where, id));
        Sector s;
        s.name = jf[i].contains("name") ? field<std::string>(jf[i], "name", where) : fmt::format("S{}", id);
        for (auto v : field<std::vector<long long>>(jf[i], "loop", where)) s.loop.push_back(vertex_ref(v, where));
        sectors.push_back(std::move(s));
    }

    PlanarSubdivision sub(std::move(vertices), std::move(edges), std::move(sectors));
    if (auto violations = validate_subdivision(sub); !violations.empty()) throw ValidationError(std::move(violations));
    return sub;
}

PlanarSubdivision load_sectorization(const std::filesystem::path& path) {
    return parse_sectorization(read_text(path), path.string());
}

std::string format_sectorization(const PlanarSubdivision& sub) {
    ordered_json doc;
    doc["vertices"] = ordered_json::array();
    for (std::size_t i = 0; i < sub.vertices().size(); ++i) {
        doc["vertices"].push_back({{"id", i}, {"x", sub.vertices()[i].x}, {"y", sub.vertices()[i].y}});
    }
    doc["edges"] = ordered_json::array();
    for (std::size_t i = 0; i < sub.edges().size(); ++i) {
        const auto& e = sub.edges()[i];
        doc["edges"].push_back({{"id", i}, {"v1", e.v1}, {"v2", e.v2}, {"outer", e.outer}});
    }
    doc["faces"] = ordered_json::array();
    for (std::size_t i = 0; i < sub.sectors().size(); ++i) {
        const auto& s = sub.sectors()[i];
        doc["faces"].push_back({{"id", i}, {"name", s.name}, {"loop", s.loop}});
    }
    return doc.dump(2) + "\n";
}

void save_sectorization(const PlanarSubdivision& sub, const std::filesystem::path& path) {
    write_text(path, format_sectorization(sub));
}

std::vector<Trajectory> parse_tracks(const std::string& text, const std::string& origin) {
    const auto rows = parse_csv(text, {"flight_id", "time_s", "lon_deg", "lat_deg"}, origin);
    std::map<std::string, std::vector<std::pair<TrackSample, std::size_t>>> by_flight;
    for (const auto& row : rows) {
        if (row.cells[0].empty()) throw InputError(fmt::format("{}:{}: empty flight_id", origin, row.line));
        const TrackSample s{parse_number(row.cells[1], origin, row.line, "time_s"),
                            {parse_number(row.cells[2], origin, row.line, "lon_deg"),
                             parse_number(row.cells[3], origin, row.line, "lat_deg")}};
        by_flight[row.cells[0]].push_back({s, row.line});
    }
    std::vector<Trajectory> out;
    for (auto& [id, samples] : by_flight) {
        std::sort(samples.begin(), samples.end(),
                  [](const auto& a, const auto& b) { return a.first.time < b.first.time; });
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (samples[i].first.time == samples[i - 1].first.time)
                throw InputError(fmt::format("{}:{}: flight {} repeats time {} (also line {})", origin,
                                             std::max(samples[i].second, samples[i - 1].second), id,
                                             samples[i].first.time,
                                             std::min(samples[i].second, samples[i - 1].second)));
        }
        if (samples.size() < 2)
            throw InputError(fmt::format("{}:{}: flight {} has a single sample", origin, samples[0].second, id));
        std::vector<TrackSample> pts;
        for (const auto& s : samples) pts.push_back(s.first);
        out.emplace_back(id, std::move(pts));
    }
    return out;
}

std::vector<Trajectory> load_tracks(const std::filesystem::path& path) {
    return parse_tracks(read_text(path), path.string());
}

void save_tracks(std::span<const Trajectory> tracks, const std::filesystem::path& path) {
    std::string out = "flight_id,time_s,lon_deg,lat_deg\n";
    for (const auto& t : tracks) {
        for (const auto& s : t.samples())
            out += fmt::format("{},{},{},{}\n", t.flight_id(), num(s.time), num(s.position.x), num(s.position.y));
    }
    write_text(path, out);
}

std::vector<DominantFlow> load_flows(const std::filesystem::path& path) {
    const auto origin = path.string();
    const json doc = parse_json(read_text(path), origin);
    std::vector<DominantFlow> out;
    const auto& flows = array_field(doc, "flows", origin);
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const auto where = fmt::format("{}: flows[{}]", origin, i);
        DominantFlow f;
        f.name = field<std::string>(flows[i], "name", where);
        if (flows[i].contains("weight")) f.weight = field<double>(flows[i], "weight", where);
        const auto& pts = array_field(flows[i], "points", where);
        for (const auto& p : pts) f.points.push_back(parse_point(p, where));
        if (f.points.size() < 2) throw InputError(fmt::format("{}: a flow needs at least two points", where));
        out.push_back(std::move(f));
    }
    return out;
}

void save_flows(std::span<const DominantFlow> flows, const std::filesystem::path& path) {
    ordered_json doc;
    doc["flows"] = ordered_json::array();
    for (const auto& f : flows) {
        ordered_json pts = ordered_json::array();
        for (const auto& p : f.points) pts.push_back({p.x, p.y});
        doc["flows"].push_back({{"name", f.name}, {"weight", f.weight}, {"points", pts}});
    }
    write_text(path, doc.dump(2) + "\n");
}

std::vector<CriticalPoint> load_critical_points(const std::filesystem::path& path) {
    const auto origin = path.string();
    std::vector<CriticalPoint> out;
    for (const auto& row : parse_csv(read_text(path), {"id", "lon_deg", "lat_deg"}, origin)) {
        out.push_back({row.cells[0],
                       {parse_number(row.cells[1], origin, row.line, "lon_deg"),
                        parse_number(row.cells[2], origin, row.line, "lat_deg")}});
    }
    return out;
}

void save_critical_points(std::span<const CriticalPoint> points, const std::filesystem::path& path) {
    std::string out = "id,lon_deg,lat_deg\n";
    for (const auto& p : points) out += fmt::format("{},{},{}\n", p.id, num(p.position.x), num(p.position.y));
    write_text(path, out);
}

std::vector<WeatherObstacle> load_weather(const std::filesystem::path& path) {
    const auto origin = path.string();
    const json doc = parse_json(read_text(path), origin);
    std::vector<WeatherObstacle> out;
    const auto& cells = array_field(doc, "cells", origin);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto where = fmt::format("{}: cells[{}]", origin, i);
        std::vector<Point> ring;
        for (const auto& p : array_field(cells[i], "polygon", where)) ring.push_back(parse_point(p, where));
        auto poly = Polygon::try_make(ring);
        if (!poly) {
            std::reverse(ring.begin(), ring.end());
            poly = Polygon::try_make(ring);
        }
        if (!poly) throw InputError(fmt::format("{}: polygon is not simple", where));
        std::optional<TimeInterval> active;
        if (cells[i].contains("active") && !cells[i]["active"].is_null()) {
            const Point a = parse_point(cells[i]["active"], where + ".active");
            if (!(a.x <= a.y)) throw InputError(fmt::format("{}: active interval is reversed", where));
            active = TimeInterval{a.x, a.y};
        }
        out.push_back({std::move(*poly), active});
    }
    return out;
}

void save_weather(std::span<const WeatherObstacle> cells, const std::filesystem::path& path) {
    ordered_json doc;
    doc["cells"] = ordered_json::array();
    for (const auto& c : cells) {
        ordered_json ring = ordered_json::array();
        for (const auto& p : c.shape.vertices()) ring.push_back({p.x, p.y});
        ordered_json cell{{"polygon", ring}};
        if (c.active) cell["active"] = {c.active->start, c.active->end};
        doc["cells"].push_back(std::move(cell));
    }
    write_text(path, doc.dump(2) + "\n");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    if (trim(text).empty()) return cfg;
    const json doc = parse_json(text, origin);
    reject_unknown(doc,
                   {"constraints", "search", "capacity_method", "lane_width", "horizon", "nmi_per_degree",
                    "altitude_slab_nmi"},
                   origin);
    if (doc.contains("constraints")) {
        const auto& cons = doc["constraints"];
        if (!cons.is_object()) throw InputError(fmt::format("{}: constraints must be an object", origin));
        for (const auto& [key, value] : cons.items()) {
            const auto id = constraint_from_key(key);
            if (!id) throw InputError(fmt::format("{}: unknown constraint '{}'", origin, key));
            const auto where = fmt::format("{}: constraints.{}", origin, key);
            reject_unknown(value, {"threshold", "limit", "weight"}, where);
            auto& spec = cfg.constraints[index_of(*id)];
            if (value.contains("threshold")) {
                if (value["threshold"].is_null()) spec.threshold.reset();
                else spec.threshold = field<double>(value, "threshold", where);
            }
            if (value.contains("limit")) {
                spec.limit = value["limit"].is_null() ? kUnbounded : field<double>(value, "limit", where);
            }
            if (value.contains("weight")) spec.weight = field<double>(value, "weight", where);
        }
    }
    if (doc.contains("search")) {
        const auto& s = doc["search"];
        const auto where = origin + ": search";
        reject_unknown(s, {"grid_radius", "grid_step", "flip_length_factors", "flip_lengths", "max_iterations",
                           "threads"},
                       where);
        if (s.contains("grid_radius")) cfg.search.grid_radius = field<double>(s, "grid_radius", where);
        if (s.contains("grid_step")) cfg.search.grid_step = field<double>(s, "grid_step", where);
        if (s.contains("flip_length_factors"))
            cfg.search.flip_length_factors = field<std::vector<double>>(s, "flip_length_factors", where);
        if (s.contains("flip_lengths") && !s["flip_lengths"].is_null())
            cfg.search.flip_lengths = field<std::vector<double>>(s, "flip_lengths", where);
        if (s.contains("max_iterations")) cfg.search.max_iterations = field<std::size_t>(s, "max_iterations", where);
        if (s.contains("threads")) cfg.search.threads = field<unsigned>(s, "threads", where);
    }
    if (doc.contains("capacity_method")) {
        const auto m = field<std::string>(doc, "capacity_method", origin);
        if (m == "map") cfg.evaluation.capacity_method = CapacityMethod::Map;
        else if (m == "welch") cfg.evaluation.capacity_method = CapacityMethod::Welch;
        else throw InputError(fmt::format("{}: capacity_method must be 'map' or 'welch'", origin));
    }
    if (doc.contains("lane_width")) cfg.evaluation.lane_width = field<double>(doc, "lane_width", origin);
    if (doc.contains("horizon") && !doc["horizon"].is_null()) {
        const Point h = parse_point(doc["horizon"], origin + ": horizon");
        cfg.evaluation.horizon = Horizon{h.x, h.y};
    }
    if (doc.contains("nmi_per_degree")) cfg.evaluation.nmi_per_degree = field<double>(doc, "nmi_per_degree", origin);
    if (doc.contains("altitude_slab_nmi"))
        cfg.evaluation.altitude_slab_nmi = field<double>(doc, "altitude_slab_nmi", origin);

    // Unset thresholds are allowed here; evaluation insists on them for
    // weighted rows.
    auto shape = cfg.constraints;
    for (auto& spec : shape) {
        if (!spec.threshold && spec.weight >= 0.0) spec.weight = 0.0;
    }
    validate_constraint_table(shape);
    cfg.search.validate();
    if (!(cfg.evaluation.lane_width > 0.0)) throw InputError(fmt::format("{}: lane_width must be positive", origin));
    if (cfg.evaluation.horizon && !(cfg.evaluation.horizon->length() > 0.0))
        throw InputError(fmt::format("{}: horizon must have positive length", origin));
    if (!(cfg.evaluation.nmi_per_degree > 0.0) || !(cfg.evaluation.altitude_slab_nmi > 0.0))
        throw InputError(fmt::format("{}: unit scales must be positive", origin));
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path), path.string()); }

std::string dump_config(const RunConfig& cfg) {
    ordered_json doc;
    ordered_json cons = ordered_json::object();
    for (const auto& spec : cfg.constraints) {
        ordered_json row;
        row["threshold"] = spec.threshold ? ordered_json(*spec.threshold) : ordered_json(nullptr);
        row["limit"] = spec.unbounded() ? ordered_json(nullptr) : ordered_json(spec.limit);
        row["weight"] = spec.weight;
        cons[std::string(constraint_key(spec.id))] = std::move(row);
    }
    doc["constraints"] = std::move(cons);
    ordered_json search;
    search["grid_radius"] = cfg.search.grid_radius;
    search["grid_step"] = cfg.search.grid_step;
    search["flip_length_factors"] = cfg.search.flip_length_factors;
    search["flip_lengths"] = cfg.search.flip_lengths ? ordered_json(*cfg.search.flip_lengths) : ordered_json(nullptr);
    search["max_iterations"] = cfg.search.max_iterations;
    search["threads"] = cfg.search.threads;
    doc["search"] = std::move(search);
    doc["capacity_method"] = cfg.evaluation.capacity_method == CapacityMethod::Welch ? "welch" : "map";
    doc["lane_width"] = cfg.evaluation.lane_width;
    doc["horizon"] = cfg.evaluation.horizon
                         ? ordered_json::array({cfg.evaluation.horizon->start, cfg.evaluation.horizon->end})
                         : ordered_json(nullptr);
    doc["nmi_per_degree"] = cfg.evaluation.nmi_per_degree;
    doc["altitude_slab_nmi"] = cfg.evaluation.altitude_slab_nmi;
    return doc.dump(2) + "\n";
}

std::string format_cost_report(const PlanarSubdivision& sub, std::span<const CostReport> reports) {
    std::string out = "sector,name,total";
    for (std::size_t i = 0; i < kConstraintCount; ++i) out += fmt::format(",{}", constraint_key(constraint_at(i)));
    out += "\n";
    for (const auto& r : reports) {
        out += fmt::format("{},{},{}", r.sector, sub.sectors()[r.sector].name, num(r.total));
        for (const auto& c : r.constraints) out += "," + num(c.weighted);
        out += "\n";
    }
    return out;
}

std::string format_optimization_log(std::span<const LogEntry> log) {
    std::string out =
        "iteration,target_sector,kind,element,x1,y1,x2,y2,affected,max_before,max_after,global_max_after,total_after\n";
    for (const auto& e : log) {
        std::size_t element = 0;
        Point p1, p2;
        if (const auto* m = std::get_if<VertexMove>(&e.adjustment.change)) {
            element = m->vertex;
            p1 = p2 = m->target;
        } else {
            const auto& f = std::get<EdgeFlip>(e.adjustment.change);
            element = f.edge;
            p1 = f.left_end;
            p2 = f.right_end;
        }
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", e.iteration, e.target_sector,
                           adjustment_kind(e.adjustment), element, num(p1.x), num(p1.y), num(p2.x), num(p2.y),
                           fmt::join(e.adjustment.affected, ";"), num(e.max_before), num(e.max_after),
                           num(e.global_max_after), num(e.total_after));
    }
    return out;
}

}  // namespace sectoropt
