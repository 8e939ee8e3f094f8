#include "sectoropt/svg.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "sectoropt/io.hpp"

namespace sectoropt {

namespace {

constexpr double kCanvas = 800.0;
constexpr double kPad = 20.0;

struct Viewport {
    BoundingBox box;
    double scale = 1.0;

    std::string xy(Point p) const {
        return fmt::format("{:.3f},{:.3f}", kPad + (p.x - box.min_x) * scale, kPad + (box.max_y - p.y) * scale);
    }
    double width() const { return 2 * kPad + (box.max_x - box.min_x) * scale; }
    double height() const { return 2 * kPad + (box.max_y - box.min_y) * scale; }
};

std::string points_attr(std::span<const Point> pts, const Viewport& vp) {
    std::string out;
    for (const auto& p : pts) {
        if (!out.empty()) out += ' ';
        out += vp.xy(p);
    }
    return out;
}

Point area_centroid(std::span<const Point> ring) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < ring.size(); ++i) {
        const Point p = ring[i];
        const Point q = ring[(i + 1) % ring.size()];
        const double w = cross(p, q);
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (3 * a), cy / (3 * a)};
}

}  // namespace

std::string render_svg(const PlanarSubdivision& sub, const SvgOverlays& overlays,
                       std::optional<std::span<const double>> totals) {
    if (totals && totals->size() != sub.sector_count())
        throw InputError("one cost total per sector is required for labels");
    Viewport vp{bounding_box(sub.vertices()), 1.0};
    const double extent = std::max(vp.box.max_x - vp.box.min_x, vp.box.max_y - vp.box.min_y);
    vp.scale = extent > 0.0 ? kCanvas / extent : 1.0;

    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.3f}\" height=\"{:.3f}\" viewBox=\"0 0 {:.3f} {:.3f}\">\n",
        vp.width(), vp.height(), vp.width(), vp.height());
    out +=
        "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"8\" height=\"8\">"
        "<path d=\"M0,8 L8,0\" stroke=\"#3b6fb6\" stroke-width=\"1\"/></pattern></defs>\n";

    out += "<g id=\"sectors\" fill=\"#f4f4f0\" stroke=\"#222\" stroke-width=\"1.5\">\n";
    for (std::size_t s = 0; s < sub.sector_count(); ++s) {
        out += fmt::format("<polygon data-sector=\"{}\" points=\"{}\"/>\n", s,
                           points_attr(sub.sector_ring(s), vp));
    }
    out += "</g>\n";

    if (!overlays.weather.empty()) {
        out += "<g id=\"weather\" fill=\"url(#hatch)\" stroke=\"#3b6fb6\">\n";
        for (const auto& w : overlays.weather)
            out += fmt::format("<polygon points=\"{}\"/>\n", points_attr(w.shape.vertices(), vp));
        out += "</g>\n";
    }
    if (!overlays.tracks.empty()) {
        out += "<g id=\"tracks\" fill=\"none\" stroke=\"#999\" stroke-width=\"0.5\">\n";
        for (const auto& t : overlays.tracks) {
            std::vector<Point> pts;
            for (const auto& s : t.samples()) pts.push_back(s.position);
            out += fmt::format("<polyline points=\"{}\"/>\n", points_attr(pts, vp));
        }
        out += "</g>\n";
    }
    if (!overlays.flows.empty()) {
        out += "<g id=\"flows\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\">\n";
        for (const auto& f : overlays.flows)
            out += fmt::format("<polyline points=\"{}\"/>\n", points_attr(f.points, vp));
        out += "</g>\n";
    }
    if (!overlays.critical_points.empty()) {
        out += "<g id=\"critical-points\" fill=\"#27ae60\">\n";
        for (const auto& cp : overlays.critical_points) {
            const auto at = vp.xy(cp.position);
            const auto comma = at.find(',');
            out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"4\"/>\n", at.substr(0, comma), at.substr(comma + 1));
        }
        out += "</g>\n";
    }
    if (totals) {
        out += "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">\n";
        for (std::size_t s = 0; s < sub.sector_count(); ++s) {
            const auto at = vp.xy(area_centroid(sub.sector_ring(s)));
            const auto comma = at.find(',');
            out += fmt::format("<text class=\"cost\" data-sector=\"{}\" x=\"{}\" y=\"{}\">{}</text>\n", s,
                               at.substr(0, comma), at.substr(comma + 1), fmt::format("{}", (*totals)[s]));
        }
        out += "</g>\n";
    }
    out += "</svg>\n";
    return out;
}

void render_svg(const PlanarSubdivision& sub, const SvgOverlays& overlays,
                std::optional<std::span<const double>> totals, const std::filesystem::path& path) {
    write_text(path, render_svg(sub, overlays, totals));
}

}  // namespace sectoropt
