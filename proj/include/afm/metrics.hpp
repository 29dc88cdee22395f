#pragma once

// Pixel-wise precision / recall / F-measure between segment maps and the
// l1 distance between attraction field maps.

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/geometry.hpp>
#include <afm/squeeze.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <queue>
#include <utility>
#include <vector>

namespace afm {

struct EvalReport {
    double precision = 1.0;
    double recall = 0.0;
    double f_measure = 0.0;
    std::size_t matched = 0;
    std::size_t detected_pixels = 0;
    std::size_t gt_pixels = 0;
    double tolerance_px = 0.0;
};

inline double f_measure(double p, double r) {
    if (!(p >= 0.0 && p <= 1.0 && r >= 0.0 && r <= 1.0)) {
        throw DomainError("precision and recall must lie in [0, 1]");
    }
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

namespace detail {

// Integer line scan between two lattice points (Bresenham), invoking
// `plot` for every visited cell.
template <typename Plot>
void bresenham(Pixel a, Pixel b, Plot&& plot) {
    const int dx = std::abs(b.x - a.x), sx = a.x < b.x ? 1 : -1;
    const int dy = -std::abs(b.y - a.y), sy = a.y < b.y ? 1 : -1;
    int err = dx + dy;
    for (Pixel p = a;;) {
        plot(p);
        if (p == b) break;
        const int e2 = 2 * err;
        if (e2 >= dy) err += dy, p.x += sx;
        if (e2 <= dx) err += dx, p.y += sy;
    }
}

inline std::vector<Pixel> offsets_within(double tolerance_px) {
    const int r = static_cast<int>(std::floor(tolerance_px));
    const double tol2 = tolerance_px * tolerance_px;
    std::vector<Pixel> out;
    for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
            if (dx * dx + dy * dy <= tol2) out.push_back({dx, dy});
        }
    }
    return out;
}

}  // namespace detail

/// Digitizes every segment with an integer line scan between its rounded
/// endpoints. Returns the union as sorted (row-major) unique pixels clipped
/// to the lattice.
inline std::vector<Pixel> rasterize_segments(const LineSegmentMap& map) {
    std::vector<std::uint8_t> mask(map.lattice.size(), 0);
    for (const auto& s : map.segments) {
        detail::bresenham(round_to_pixel(s.start), round_to_pixel(s.end), [&](Pixel p) {
            if (map.lattice.contains(p)) mask[map.lattice.index(p)] = 1;
        });
    }
    std::vector<Pixel> out;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) out.push_back(map.lattice.pixel(i));
    }
    return out;
}

/// Greedy one-to-one matching: detected pixels in row-major order each take
/// the nearest still unmatched ground-truth pixel within `tolerance_px`
/// (ties broken by row-major position).
inline std::size_t match_pixels(ImageLattice lattice, const std::vector<Pixel>& detected,
                                const std::vector<Pixel>& gt, double tolerance_px) {
    // 0 = no GT pixel, 1 = unmatched GT pixel, 2 = matched
    std::vector<std::uint8_t> gt_mask(lattice.size(), 0);
    for (const Pixel p : gt) gt_mask[lattice.index(p)] = 1;

    std::vector<std::pair<int, Pixel>> offsets;
    for (const Pixel off : detail::offsets_within(tolerance_px)) offsets.push_back({off.x * off.x + off.y * off.y, off});
    std::sort(offsets.begin(), offsets.end());

    std::size_t matched = 0;
    for (const Pixel d : detected) {
        for (const auto& [d2, off] : offsets) {
            const Pixel q{d.x + off.x, d.y + off.y};
            if (!lattice.contains(q)) continue;
            auto& slot = gt_mask[lattice.index(q)];
            if (slot == 1) {
                slot = 2;
                ++matched;
                break;
            }
        }
    }
    return matched;
}

/// Maximum-cardinality one-to-one matching (Hopcroft-Karp) between detected
/// and ground-truth pixels closer than `tolerance_px`. Never smaller than the
/// greedy count; costs more on dense maps.
inline std::size_t match_pixels_exact(ImageLattice lattice, const std::vector<Pixel>& detected,
                                      const std::vector<Pixel>& gt, double tolerance_px) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> gt_at(lattice.size(), kNone);
    for (std::size_t j = 0; j < gt.size(); ++j) gt_at[lattice.index(gt[j])] = j;

    const auto offsets = detail::offsets_within(tolerance_px);
    std::vector<std::size_t> adj_begin{0}, adj;
    for (const Pixel d : detected) {
        for (const Pixel off : offsets) {
            const Pixel q{d.x + off.x, d.y + off.y};
            if (lattice.contains(q) && gt_at[lattice.index(q)] != kNone) adj.push_back(gt_at[lattice.index(q)]);
        }
        adj_begin.push_back(adj.size());
    }

    const std::size_t n = detected.size();
    std::vector<std::size_t> mate_det(n, kNone), mate_gt(gt.size(), kNone), layer(n), next(n);
    constexpr std::size_t kInf = kNone;

    auto bfs = [&] {
        std::queue<std::size_t> q;
        for (std::size_t i = 0; i < n; ++i) {
            layer[i] = mate_det[i] == kNone ? 0 : kInf;
            if (layer[i] == 0) q.push(i);
        }
        bool found = false;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t e = adj_begin[u]; e < adj_begin[u + 1]; ++e) {
                const std::size_t w = mate_gt[adj[e]];
                if (w == kNone) {
                    found = true;
                } else if (layer[w] == kInf) {
                    layer[w] = layer[u] + 1;
                    q.push(w);
                }
            }
        }
        return found;
    };

    // Iterative layered DFS; augmenting paths can run the length of a segment.
    auto augment = [&](std::size_t root) {
        std::vector<std::size_t> path{root};
        while (!path.empty()) {
            const std::size_t u = path.back();
            if (next[u] == adj_begin[u + 1]) {
                layer[u] = kInf;
                path.pop_back();
                continue;
            }
            const std::size_t g = adj[next[u]];
            const std::size_t w = mate_gt[g];
            if (w == kNone) {
                // flip the path back to the root
                for (std::size_t k = path.size(); k-- > 0;) {
                    const std::size_t v = path[k];
                    const std::size_t taken = adj[next[v]];
                    mate_det[v] = taken;
                    mate_gt[taken] = v;
                }
                return true;
            }
            if (layer[w] == layer[u] + 1) {
                path.push_back(w);
            } else {
                ++next[u];
            }
        }
        return false;
    };

    std::size_t matched = 0;
    while (bfs()) {
        for (std::size_t i = 0; i < n; ++i) next[i] = adj_begin[i];
        for (std::size_t i = 0; i < n; ++i) {
            if (mate_det[i] == kNone && augment(i)) ++matched;
        }
    }
    return matched;
}

enum class Matcher { greedy, exact };

inline EvalReport evaluate(const LineSegmentMap& detected, const LineSegmentMap& gt, double rel_tolerance = 0.01,
                           Matcher matcher = Matcher::greedy) {
    if (!(detected.lattice == gt.lattice)) {
        throw LatticeError("detected and ground-truth maps have different lattices");
    }
    if (!(rel_tolerance >= 0.0) || !std::isfinite(rel_tolerance)) {
        throw DomainError("relative tolerance must be a finite non-negative number");
    }
    EvalReport rep;
    rep.tolerance_px = rel_tolerance * gt.lattice.diagonal();
    const auto det_px = rasterize_segments(detected);
    const auto gt_px = rasterize_segments(gt);
    rep.detected_pixels = det_px.size();
    rep.gt_pixels = gt_px.size();
    rep.matched = matcher == Matcher::exact ? match_pixels_exact(gt.lattice, det_px, gt_px, rep.tolerance_px)
                                            : match_pixels(gt.lattice, det_px, gt_px, rep.tolerance_px);
    // Nothing detected: precision is vacuously 1.
    rep.precision = rep.detected_pixels == 0 ? 1.0 : double(rep.matched) / double(rep.detected_pixels);
    rep.recall = rep.gt_pixels == 0 ? 1.0 : double(rep.matched) / double(rep.gt_pixels);
    rep.f_measure = f_measure(rep.precision, rep.recall);
    return rep;
}

struct SweepPoint {
    double threshold = 0.0;
    EvalReport report;
};

/// Thresholds 0.1, 0.2, ..., 1.0.
inline std::vector<double> default_aspect_thresholds() {
    std::vector<double> t;
    for (int i = 1; i <= 10; ++i) t.push_back(i / 10.0);
    return t;
}

/// Squeezes `afm` once per aspect-ratio threshold and evaluates each result
/// against `gt`.
inline std::vector<SweepPoint> pr_sweep(const AttractionFieldMap& afm, const LineSegmentMap& gt,
                                        const std::vector<double>& thresholds, SqueezeParams params = {},
                                        double rel_tolerance = 0.01) {
    for (const double t : thresholds) {
        if (!(t > 0.0 && t <= 1.0)) throw DomainError("aspect thresholds must lie in (0, 1]");
    }
    std::vector<SweepPoint> out;
    out.reserve(thresholds.size());
    for (const double t : thresholds) {
        params.aspect_ratio_max = t;
        out.push_back({t, evaluate(squeeze(afm, params).segments, gt, rel_tolerance)});
    }
    return out;
}

/// Sum over pixels of |dx| + |dy|.
inline double afm_l1(const AttractionFieldMap& a, const AttractionFieldMap& b) {
    if (!(a.lattice == b.lattice)) throw LatticeError("attraction field maps have different lattices");
    if (a.state != b.state) throw StateError("attraction field maps are in different states");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.vectors.size(); ++i) {
        sum += std::fabs(a.vectors[i].x - b.vectors[i].x) + std::fabs(a.vectors[i].y - b.vectors[i].y);
    }
    return sum;
}

}  // namespace afm
