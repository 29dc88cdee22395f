#pragma once

// Multi-scale encode -> squeeze -> evaluate round trips, and a seeded
// generator of synthetic segment maps.

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/geometry.hpp>
#include <afm/metrics.hpp>
#include <afm/squeeze.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace afm {

/// Scales endpoints by `s`; the lattice becomes round(s*W) x round(s*H)
/// (at least 1x1) and endpoints are clamped into it.
inline LineSegmentMap scale_map(const LineSegmentMap& map, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("scale must be positive");
    LineSegmentMap out;
    out.lattice.width = std::max(1, static_cast<int>(std::lround(s * map.lattice.width)));
    out.lattice.height = std::max(1, static_cast<int>(std::lround(s * map.lattice.height)));
    const double w = out.lattice.width, h = out.lattice.height;
    auto place = [&](Point2 p) { return Point2{std::clamp(s * p.x, 0.0, w), std::clamp(s * p.y, 0.0, h)}; };
    out.segments.reserve(map.segments.size());
    for (const auto& seg : map.segments) out.segments.push_back({place(seg.start), place(seg.end)});
    return out;
}

/// lo, lo + step, ..., hi (inclusive, with the count rounded to absorb
/// floating-point drift in the step).
inline std::vector<double> scale_grid(double lo, double step, double hi) {
    if (!(lo > 0.0) || !(step > 0.0) || !(hi >= lo)) {
        throw DomainError("scale grid needs 0 < lo <= hi and step > 0");
    }
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> out;
    for (long i = 0; i < n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

struct ScaleResult {
    double precision = 0.0;
    double recall = 0.0;
    double f_measure = 0.0;
};

struct ScaleSweepReport {
    std::vector<double> scales;
    std::vector<ScaleResult> per_scale;
    double mean_precision = 0.0;
    double mean_recall = 0.0;

    double mean_f_measure() const { return f_measure(mean_precision, mean_recall); }
};

inline ScaleSweepReport verify_duality(const LineSegmentMap& map, const std::vector<double>& scales,
                                       const SqueezeParams& params = {}, double rel_tolerance = 0.01) {
    if (map.segments.empty()) throw EmptyMapError("duality check needs a non-empty map");
    if (scales.empty()) throw DomainError("duality check needs at least one scale");
    for (std::size_t i = 1; i < scales.size(); ++i) {
        if (!(scales[i] > scales[i - 1])) throw DomainError("scales must be strictly increasing");
    }
    ScaleSweepReport rep;
    rep.scales = scales;
    for (const double s : scales) {
        LineSegmentMap scaled = scale_map(map, s);
        // Shrinking can collapse short segments onto a point.
        std::erase_if(scaled.segments, [](const LineSegment& l) { return l.degenerate(); });
        if (scaled.segments.empty()) throw EmptyMapError("every segment collapsed at scale " + std::to_string(s));
        const auto encoded = compute_attraction_field(scaled);
        const auto decoded = squeeze(encoded.field, params);
        const auto ev = evaluate(decoded.segments, scaled, rel_tolerance);
        rep.per_scale.push_back({ev.precision, ev.recall, ev.f_measure});
        rep.mean_precision += ev.precision;
        rep.mean_recall += ev.recall;
    }
    rep.mean_precision /= static_cast<double>(scales.size());
    rep.mean_recall /= static_cast<double>(scales.size());
    return rep;
}

struct SynthConfig {
    std::uint64_t seed = 0;
    int min_segments = 5;
    int max_segments = 30;
    double min_length_px = 20.0;
    ImageLattice lattice{320, 320};
    /// Endpoints of different segments keep at least this distance apart.
    double min_endpoint_separation_px = 2.0;
};

inline void validate(const SynthConfig& c) {
    validate(c.lattice);
    if (c.min_segments < 1 || c.max_segments < c.min_segments) {
        throw ConfigError("segment count range must satisfy 1 <= min <= max");
    }
    if (!(c.min_length_px > 0.0) || c.min_length_px > c.lattice.diagonal()) {
        throw ConfigError("min length must be positive and no longer than the lattice diagonal");
    }
    if (!(c.min_endpoint_separation_px >= 0.0)) throw ConfigError("endpoint separation must be non-negative");
}

namespace detail {

// Uniform in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Endpoints are drawn uniformly over the lattice extent; candidates that
/// are too short or crowd an existing endpoint are redrawn.
inline LineSegmentMap generate_synthetic_map(const SynthConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    const int span = config.max_segments - config.min_segments + 1;
    const int count = config.min_segments + static_cast<int>(rng() % static_cast<std::uint64_t>(span));
    const double w = config.lattice.width, h = config.lattice.height;
    const double sep2 = config.min_endpoint_separation_px * config.min_endpoint_separation_px;

    LineSegmentMap map{config.lattice, {}};
    constexpr int kMaxAttempts = 10000;
    for (int i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            const Point2 a{detail::unit_uniform(rng) * w, detail::unit_uniform(rng) * h};
            const Point2 b{detail::unit_uniform(rng) * w, detail::unit_uniform(rng) * h};
            if (norm(b - a) < config.min_length_px) continue;
            const bool crowded = std::any_of(map.segments.begin(), map.segments.end(), [&](const LineSegment& s) {
                for (const Point2 e : {s.start, s.end}) {
                    if (squared_norm(e - a) < sep2 || squared_norm(e - b) < sep2) return true;
                }
                return false;
            });
            if (crowded) continue;
            map.segments.push_back({a, b});
            placed = true;
        }
        if (!placed) throw ConfigError("could not place segment " + std::to_string(i) + " under the constraints");
    }
    return map;
}

}  // namespace afm
