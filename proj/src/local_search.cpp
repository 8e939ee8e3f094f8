#include "sectoropt/local_search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "sectoropt/traffic.hpp"

namespace sectoropt {

namespace {

constexpr double kMinRelativeGain = 1e-9;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Neighbourhood of an interior edge u->v shared by four distinct sectors.
struct FlipFrame {
    std::size_t u, v;
    std::size_t left, right, fu, fv;
    std::size_t a_left, b_left, a_right, b_right;
};

std::size_t position_in(const std::vector<std::size_t>& loop, std::size_t v) {
    const auto it = std::find(loop.begin(), loop.end(), v);
    return it == loop.end() ? loop.size() : static_cast<std::size_t>(it - loop.begin());
}

std::optional<FlipFrame> flip_frame(const PlanarSubdivision& sub, std::size_t e) {
    if (e >= sub.edges().size()) return std::nullopt;
    const auto& edge = sub.edges()[e];
    if (edge.outer) return std::nullopt;
    FlipFrame f{};
    f.u = edge.v1;
    f.v = edge.v2;
    for (auto w : {f.u, f.v}) {
        if (sub.role(w) != VertexRole::Interior || sub.degree(w) != 3) return std::nullopt;
        if (sub.incident_sectors(w).size() != 3) return std::nullopt;
    }
    f.left = sub.left_sector(e);
    f.right = sub.right_sector(e);
    if (f.left == kNoSector || f.right == kNoSector || f.left == f.right) return std::nullopt;

    const auto& ll = sub.sectors()[f.left].loop;
    const auto& rl = sub.sectors()[f.right].loop;
    if (ll.size() < 4 || rl.size() < 4) return std::nullopt;
    const std::size_t iu = position_in(ll, f.u);
    const std::size_t iv = position_in(rl, f.v);
    if (iu == ll.size() || iv == rl.size()) return std::nullopt;
    // Left loop runs a_L, u, v, b_L; right loop runs b_R, v, u, a_R.
    if (ll[(iu + 1) % ll.size()] != f.v || rl[(iv + 1) % rl.size()] != f.u) return std::nullopt;
    f.a_left = ll[(iu + ll.size() - 1) % ll.size()];
    f.b_left = ll[(iu + 2) % ll.size()];
    f.b_right = rl[(iv + rl.size() - 1) % rl.size()];
    f.a_right = rl[(iv + 2) % rl.size()];

    auto third = [&](std::size_t w) {
        for (auto s : sub.incident_sectors(w)) {
            if (s != f.left && s != f.right) return s;
        }
        return kNoSector;
    };
    f.fu = third(f.u);
    f.fv = third(f.v);
    if (f.fu == kNoSector || f.fv == kNoSector || f.fu == f.fv) return std::nullopt;
    return f;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

// Position of p along the straight run a->b, as a fraction.
double run_parameter(Point a, Point b, Point p) {
    const Point d = b - a;
    return dot(p - a, d) / dot(d, d);
}

bool slider_target_ok(const PlanarSubdivision& sub, std::size_t v, Point target) {
    const auto [a, b] = sub.slider_run(v);
    const Point pa = sub.vertices()[a];
    const Point pb = sub.vertices()[b];
    const Point d = pb - pa;
    const double len = norm(d);
    if (std::abs(cross(d, target - pa)) / len > kEpsilon) return false;
    const auto [prev, next] = sub.outer_neighbours(v);
    double t0 = run_parameter(pa, pb, sub.vertices()[prev]);
    double t1 = run_parameter(pa, pb, sub.vertices()[next]);
    if (t0 > t1) std::swap(t0, t1);
    const double t = run_parameter(pa, pb, target);
    const double margin = kEpsilon / len;
    return t > t0 + margin && t < t1 - margin;
}

PlanarSubdivision apply_flip(const PlanarSubdivision& sub, const FlipFrame& f, const EdgeFlip& flip) {
    auto vertices = sub.vertices();
    auto edges = sub.edges();
    auto sectors = sub.sectors();
    vertices[f.u] = flip.left_end;
    vertices[f.v] = flip.right_end;

    auto rewire = [&](std::size_t from, std::size_t other, std::size_t to) {
        const auto e = *sub.edge_between(from, other);
        auto& ed = edges[e];
        (ed.v1 == from ? ed.v1 : ed.v2) = to;
    };
    rewire(f.u, f.a_right, f.v);
    rewire(f.v, f.b_left, f.u);

    auto erase = [](std::vector<std::size_t>& loop, std::size_t w) {
        loop.erase(std::find(loop.begin(), loop.end(), w));
    };
    auto insert_before = [](std::vector<std::size_t>& loop, std::size_t at, std::size_t w) {
        loop.insert(std::find(loop.begin(), loop.end(), at), w);
    };
    erase(sectors[f.left].loop, f.v);
    erase(sectors[f.right].loop, f.u);
    insert_before(sectors[f.fu].loop, f.u, f.v);
    insert_before(sectors[f.fv].loop, f.v, f.u);
    return sub.with_topology(std::move(vertices), std::move(edges), std::move(sectors));
}

std::optional<PlanarSubdivision> apply_unchecked(const PlanarSubdivision& sub, const Adjustment& adj) {
    if (const auto* move = std::get_if<VertexMove>(&adj.change)) {
        if (move->vertex >= sub.vertices().size()) return std::nullopt;
        return sub.with_vertex_position(move->vertex, move->target);
    }
    const auto& flip = std::get<EdgeFlip>(adj.change);
    const auto frame = flip_frame(sub, flip.edge);
    if (!frame) return std::nullopt;
    return apply_flip(sub, *frame, flip);
}

bool edges_conflict(const PlanarSubdivision& sub, std::size_t i, std::size_t j) {
    const auto& verts = sub.vertices();
    const auto& ei = sub.edges()[i];
    const auto& ej = sub.edges()[j];
    const Point a = verts[ei.v1], b = verts[ei.v2], c = verts[ej.v1], d = verts[ej.v2];
    if (!bounding_box(std::array{a, b}).overlaps(bounding_box(std::array{c, d}))) return false;
    const auto hit = intersect_segments(a, b, c, d);
    if (hit.kind == IntersectionKind::None) return false;
    if (hit.kind == IntersectionKind::Overlap) return true;
    std::optional<std::size_t> shared;
    if (ei.v1 == ej.v1 || ei.v1 == ej.v2) shared = ei.v1;
    if (ei.v2 == ej.v1 || ei.v2 == ej.v2) shared = ei.v2;
    return !(shared && distance(lerp(a, b, hit.t), verts[*shared]) <= kEpsilon);
}

bool locally_valid(const PlanarSubdivision& before, const PlanarSubdivision& after,
                   const std::vector<std::size_t>& moved, const std::vector<std::size_t>& affected) {
    for (auto w : moved) {
        const Point p = after.vertices()[w];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    std::set<std::size_t> touched;
    for (auto w : moved) {
        for (auto e : after.incident_edges(w)) touched.insert(e);
    }
    const std::size_t ne = after.edges().size();
    for (auto e : touched) {
        const auto& ed = after.edges()[e];
        if (distance(after.vertices()[ed.v1], after.vertices()[ed.v2]) <= kEpsilon) return false;
        for (std::size_t j = 0; j < ne; ++j) {
            if (j == e || (touched.count(j) && j < e)) continue;
            if (edges_conflict(after, e, j)) return false;
        }
    }
    double old_area = 0.0, new_area = 0.0;
    for (auto s : affected) {
        const auto ring = after.sector_ring(s);
        const double area = signed_area(ring);
        if (!(area > 0.0) || !is_simple_ring(ring)) return false;
        new_area += area;
        old_area += signed_area(before.sector_ring(s));
    }
    // The outer boundary is fixed, so the touched sectors must keep their
    // combined area for the tiling to stay exact.
    return std::abs(new_area - old_area) <= 1e-9 * std::max(1.0, std::abs(old_area));
}

std::vector<std::size_t> moved_vertices(const PlanarSubdivision& sub, const Adjustment& adj) {
    if (const auto* move = std::get_if<VertexMove>(&adj.change)) return {move->vertex};
    const auto& e = sub.edges()[std::get<EdgeFlip>(adj.change).edge];
    return {e.v1, e.v2};
}

// Runs fn(i) for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void SearchConfig::validate() const {
    if (!(grid_radius > 0.0) || !std::isfinite(grid_radius))
        throw InputError("search.grid_radius must be positive");
    if (!(grid_step > 0.0) || !std::isfinite(grid_step)) throw InputError("search.grid_step must be positive");
    if (grid_step > grid_radius) throw InputError("search.grid_step must not exceed search.grid_radius");
    const auto& lengths = flip_lengths ? *flip_lengths : flip_length_factors;
    for (double l : lengths) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InputError("edge-flip lengths must be positive");
    }
    if (threads == 0) throw InputError("search.threads must be at least 1");
}

std::vector<double> grid_offsets(const SearchConfig& cfg) {
    std::vector<double> positive;
    for (int k = 0;; ++k) {
        const double off = (k + 0.5) * cfg.grid_step;
        if (off > cfg.grid_radius + 1e-12) break;
        positive.push_back(off);
    }
    std::vector<double> out;
    for (auto it = positive.rbegin(); it != positive.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), positive.begin(), positive.end());
    return out;
}

std::vector<Adjustment> candidate_vertex_moves(const PlanarSubdivision& sub, std::size_t v,
                                               const SearchConfig& cfg) {
    std::vector<Adjustment> out;
    const auto role = sub.role(v);
    if (role == VertexRole::Corner) return out;
    const Point p = sub.vertices()[v];
    const auto affected = sorted_unique(sub.incident_sectors(v));
    const auto offsets = grid_offsets(cfg);

    if (role == VertexRole::Interior) {
        for (double dy : offsets) {
            for (double dx : offsets) out.push_back({VertexMove{v, {p.x + dx, p.y + dy}}, affected});
        }
        return out;
    }
    const auto [a, b] = sub.slider_run(v);
    const Point pa = sub.vertices()[a];
    const Point pb = sub.vertices()[b];
    const Point dir = (pb - pa) * (1.0 / distance(pa, pb));
    const double s = dot(p - pa, dir);
    for (double off : offsets) {
        const Point target = pa + dir * (s + off);
        if (slider_target_ok(sub, v, target)) out.push_back({VertexMove{v, target}, affected});
    }
    return out;
}

std::optional<std::vector<Adjustment>> candidate_edge_flips(const PlanarSubdivision& sub, std::size_t e,
                                                            const SearchConfig& cfg) {
    const auto f = flip_frame(sub, e);
    if (!f) return std::nullopt;
    const Point pu = sub.vertices()[f->u];
    const Point pv = sub.vertices()[f->v];
    const double len = distance(pu, pv);
    const Point mid = lerp(pu, pv, 0.5);
    const Point d = (pv - pu) * (1.0 / len);
    const Point left{-d.y, d.x};
    const auto affected = sorted_unique({f->left, f->right, f->fu, f->fv});

    std::vector<double> lengths;
    if (cfg.flip_lengths) {
        lengths = *cfg.flip_lengths;
    } else {
        for (double k : cfg.flip_length_factors) lengths.push_back(k * len);
    }
    std::vector<Adjustment> out;
    for (double l : lengths) {
        out.push_back({EdgeFlip{e, mid + left * (l / 2), mid - left * (l / 2)}, affected});
    }
    return out;
}

std::vector<Adjustment> candidate_adjustments(const PlanarSubdivision& sub, std::size_t s,
                                              const SearchConfig& cfg) {
    std::vector<Adjustment> out;
    const auto& loop = sub.sectors()[s].loop;
    for (auto v : loop) {
        auto moves = candidate_vertex_moves(sub, v, cfg);
        out.insert(out.end(), std::make_move_iterator(moves.begin()), std::make_move_iterator(moves.end()));
    }
    std::set<std::size_t> seen;
    for (auto v : loop) {
        for (auto e : sub.incident_edges(v)) {
            if (!seen.insert(e).second) continue;
            if (auto flips = candidate_edge_flips(sub, e, cfg)) {
                out.insert(out.end(), std::make_move_iterator(flips->begin()),
                           std::make_move_iterator(flips->end()));
            }
        }
    }
    return out;
}

bool is_feasible(const PlanarSubdivision& sub, const Adjustment& adj) {
    if (const auto* move = std::get_if<VertexMove>(&adj.change)) {
        if (move->vertex >= sub.vertices().size()) return false;
        switch (sub.role(move->vertex)) {
            case VertexRole::Corner: return false;
            case VertexRole::Slider:
                if (!slider_target_ok(sub, move->vertex, move->target)) return false;
                break;
            case VertexRole::Interior: break;
        }
    }
    const auto after = apply_unchecked(sub, adj);
    if (!after) return false;
    std::vector<std::size_t> affected;
    for (auto w : moved_vertices(sub, adj)) {
        for (auto s : after->incident_sectors(w)) affected.push_back(s);
        for (auto s : sub.incident_sectors(w)) affected.push_back(s);
    }
    return locally_valid(sub, *after, moved_vertices(sub, adj), sorted_unique(std::move(affected)));
}

PlanarSubdivision apply(const PlanarSubdivision& sub, const Adjustment& adj) {
    if (!is_feasible(sub, adj)) throw ContractViolation("adjustment would break the sectorization");
    return *apply_unchecked(sub, adj);
}

OptimizationResult lrm_optimize(PlanarSubdivision sub, const SectorCostFn& cost, const SearchConfig& cfg) {
    cfg.validate();
    const std::size_t n = sub.sector_count();
    OptimizationResult result;
    std::vector<double> costs(n);
    parallel_for(n, cfg.threads, [&](std::size_t s) { costs[s] = cost(sub, s); });

    while (true) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return costs[a] > costs[b]; });

        bool improved = false;
        for (auto s : order) {
            const double c0 = costs[s];
            if (!(c0 > 0.0)) break;

            const auto candidates = candidate_adjustments(sub, s, cfg);
            result.candidates_evaluated += candidates.size();
            std::vector<double> score(candidates.size(), kInf);
            std::vector<bool> usable(candidates.size(), false);
            std::vector<std::vector<double>> new_costs(candidates.size());
            parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
                const auto& adj = candidates[i];
                if (!is_feasible(sub, adj)) return;
                const auto next = *apply_unchecked(sub, adj);
                double worst = 0.0;
                for (auto a : adj.affected) {
                    const double c = cost(next, a);
                    new_costs[i].push_back(c);
                    worst = std::max(worst, c);
                }
                score[i] = worst;
                usable[i] = true;
            });

            std::optional<std::size_t> best;
            for (std::size_t i = 0; i < candidates.size(); ++i) {
                if (usable[i] && (!best || score[i] < score[*best])) best = i;
            }
            // Improvements within rounding of c0 are noise (e.g. a vertex
            // sliding along a straight edge).
            if (!best || !(score[*best] < c0 - kMinRelativeGain * c0)) continue;
            if (result.log.size() >= cfg.max_iterations) {
                result.truncated = true;
                spdlog::warn("local search stopped at the iteration cap ({})", cfg.max_iterations);
                break;
            }

            const auto& adj = candidates[*best];
            LogEntry entry;
            entry.iteration = result.log.size() + 1;
            entry.target_sector = s;
            entry.adjustment = adj;
            for (auto a : adj.affected) entry.costs_before.push_back(costs[a]);
            entry.costs_after = new_costs[*best];
            entry.max_before = *std::max_element(entry.costs_before.begin(), entry.costs_before.end());
            entry.max_after = score[*best];

            sub = *apply_unchecked(sub, adj);
            for (std::size_t k = 0; k < adj.affected.size(); ++k) costs[adj.affected[k]] = entry.costs_after[k];
            entry.global_max_after = *std::max_element(costs.begin(), costs.end());
            entry.total_after = std::accumulate(costs.begin(), costs.end(), 0.0);
            spdlog::debug("iteration {}: sector {} max cost {} -> {}", entry.iteration, s, entry.max_before,
                          entry.max_after);
            result.log.push_back(std::move(entry));
            improved = true;
            break;
        }
        if (!improved || result.truncated) break;
    }
    result.final_costs = std::move(costs);
    result.sectorization = std::move(sub);
    return result;
}

}  // namespace sectoropt
