#pragma once

// Decoding an attraction field map back into line segments.
//
// Every pixel p votes for the lattice cell nearest to its projection point
// v(p) = p + a(p). Cells that collect votes form the line proposal map. The
// grouping pass then repeatedly picks a seed record, collects records in a
// small window whose tangent direction agrees with the group, grows the
// group from its two extreme cells, and finally accepts the group as a line
// segment if the rectangle enclosing its projection points is thin enough.

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace afm {

/// Attraction vectors shorter than this (pixels) have no usable tangent.
inline constexpr double kZeroVectorNorm = 1e-6;

struct AttractionRecord {
    Pixel source;        ///< pixel p that cast the vote
    Point2 vector;       ///< a(p)
    Point2 projection;   ///< v(p) = p + a(p)
    bool used = false;
    bool discarded_as_seed = false;

    bool zero() const { return squared_norm(vector) < kZeroVectorNorm * kZeroVectorNorm; }
};

/// Per-cell candidate sets stored contiguously, cells in row-major order.
/// Records inside a cell keep the row-major order of their source pixels.
struct LineProposalMap {
    ImageLattice lattice;
    std::vector<AttractionRecord> records;
    std::vector<std::size_t> cell_offsets;  ///< lattice.size() + 1 entries

    std::size_t cell_begin(Pixel q) const { return cell_offsets[lattice.index(q)]; }
    std::size_t cell_end(Pixel q) const { return cell_offsets[lattice.index(q) + 1]; }
    std::span<const AttractionRecord> cell(Pixel q) const {
        return std::span(records).subspan(cell_begin(q), cell_end(q) - cell_begin(q));
    }
};

inline LineProposalMap build_line_proposal_map(const AttractionFieldMap& afm) {
    if (afm.state != FieldState::raw) {
        throw StateError(std::string("line proposal map needs a raw field, got ") + to_string(afm.state));
    }
    const ImageLattice& lat = afm.lattice;
    validate(lat);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> target(lat.size(), none);
    LineProposalMap out{lat, {}, std::vector<std::size_t>(lat.size() + 1, 0)};
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const Point2 v = to_point(lat.pixel(i)) + afm.vectors[i];
        if (!is_finite(v)) continue;
        const double cx = std::floor(v.x + 0.5);
        const double cy = std::floor(v.y + 0.5);
        if (cx < 0.0 || cy < 0.0 || cx >= lat.width || cy >= lat.height) continue;
        target[i] = lat.index({static_cast<int>(cx), static_cast<int>(cy)});
        ++out.cell_offsets[target[i] + 1];
    }
    for (std::size_t c = 0; c < lat.size(); ++c) out.cell_offsets[c + 1] += out.cell_offsets[c];

    out.records.resize(out.cell_offsets.back());
    std::vector<std::size_t> fill(out.cell_offsets.begin(), out.cell_offsets.end() - 1);
    for (std::size_t i = 0; i < lat.size(); ++i) {
        if (target[i] == none) continue;
        const Pixel p = lat.pixel(i);
        auto& r = out.records[fill[target[i]]++];
        r.source = p;
        r.vector = afm.vectors[i];
        r.projection = to_point(p) + afm.vectors[i];
    }
    return out;
}

struct SqueezeParams {
    int window_radius = 1;               ///< search window is (2r+1) x (2r+1)
    double angular_threshold_deg = 10.0; ///< tangent agreement, modulo 180 degrees
    double aspect_ratio_max = 0.2;       ///< width / length of the support rectangle
    int min_support = 2;                 ///< records needed to accept a segment
    double min_length_px = 1.0;          ///< supports shorter than this are point clusters
    std::optional<std::uint64_t> rng_seed;  ///< shuffles the seed order when set
};

inline void validate(const SqueezeParams& p) {
    if (p.window_radius < 1) throw DomainError("window radius must be >= 1");
    if (!(p.angular_threshold_deg > 0.0 && p.angular_threshold_deg <= 90.0)) {
        throw DomainError("angular threshold must be in (0, 90] degrees");
    }
    if (!(p.aspect_ratio_max > 0.0 && p.aspect_ratio_max <= 1.0)) {
        throw DomainError("aspect ratio threshold must be in (0, 1]");
    }
    if (p.min_support < 2) throw DomainError("min support must be >= 2");
    if (!(p.min_length_px >= 0.0) || !std::isfinite(p.min_length_px)) {
        throw DomainError("min length must be a finite non-negative number");
    }
}

struct SqueezeOutput {
    LineSegmentMap segments;
    std::vector<std::size_t> support_sizes;
    std::size_t rejected_seed_count = 0;
    /// Support of each emitted segment, as indices into the records of
    /// build_line_proposal_map(afm).
    std::vector<std::vector<std::size_t>> supports;
    /// Width / length of each emitted segment's support rectangle.
    std::vector<double> aspect_ratios;
    /// Parallel to `supports`: angle in degrees (modulo 180) between each
    /// record's tangent and the group direction when it was absorbed. Zero
    /// vectors report 0.
    std::vector<std::vector<double>> alignment_deg;
};

namespace detail {

// Orientation modulo 180 degrees, stored as the unit vector of twice the
// angle so that opposite directions coincide and averaging is a vector sum.
struct Doubled {
    double c = 0.0;
    double s = 0.0;
};

// Tangent of an attraction vector: perpendicular to it. Doubling the angle
// of the perpendicular negates the doubled angle of the vector itself.
inline Doubled doubled_tangent(Point2 a) {
    const double n2 = squared_norm(a);
    return {(a.y * a.y - a.x * a.x) / n2, -2.0 * a.x * a.y / n2};
}

inline Point2 direction_of(Doubled d) {
    const double half = 0.5 * std::atan2(d.s, d.c);
    return {std::cos(half), std::sin(half)};
}

struct RectFit {
    Point2 start;
    Point2 end;
    double length = 0.0;
    double width = 0.0;
};

class Grouper {
public:
    Grouper(LineProposalMap& map, const SqueezeParams& params)
        : map_(map), params_(params), tangent_(map.records.size()),
          cos_threshold_(std::cos(2.0 * params.angular_threshold_deg * std::numbers::pi / 180.0)) {
        for (std::size_t i = 0; i < map.records.size(); ++i) {
            if (!map.records[i].zero()) tangent_[i] = doubled_tangent(map.records[i].vector);
        }
    }

    SqueezeOutput run() {
        SqueezeOutput out;
        out.segments.lattice = map_.lattice;
        const std::vector<std::size_t> order = cell_order();
        std::vector<std::size_t> cursor(map_.cell_offsets.begin(), map_.cell_offsets.end() - 1);

        for (const std::size_t c : order) {
            const std::size_t end = map_.cell_offsets[c + 1];
            bool cell_active = true;
            while (cell_active) {
                std::size_t& k = cursor[c];
                while (k < end && !seedable(k)) ++k;
                if (k == end) break;
                const std::size_t seed = k;

                support_.clear();
                alignment_.clear();
                dir_sum_ = {};
                take(seed, 0.0);
                absorb_window(map_.lattice.pixel(c), tangent_[seed]);
                if (support_.size() == 1) {
                    // Nothing aligned around the seed: drop this record, the cell stays.
                    release(seed);
                    map_.records[seed].discarded_as_seed = true;
                    ++out.rejected_seed_count;
                    continue;
                }
                grow();
                const RectFit rect = fit_rectangle();
                const double aspect = rect.length > 0.0 ? rect.width / rect.length
                                                        : std::numeric_limits<double>::infinity();
                const bool thin = support_.size() >= static_cast<std::size_t>(params_.min_support) &&
                                  rect.length >= params_.min_length_px && rect.length > 0.0 &&
                                  aspect <= params_.aspect_ratio_max;
                LineSegment seg{clamp_to_lattice(rect.start), clamp_to_lattice(rect.end)};
                if (thin && !seg.degenerate()) {
                    out.segments.segments.push_back(seg);
                    out.support_sizes.push_back(support_.size());
                    out.supports.push_back(support_);
                    out.aspect_ratios.push_back(aspect);
                    out.alignment_deg.push_back(alignment_);
                } else {
                    for (const std::size_t r : support_) release(r);
                    map_.records[seed].discarded_as_seed = true;
                    ++out.rejected_seed_count;
                    // A support that collapsed onto a point is an endpoint fan:
                    // every remaining seed in this cell would rebuild it.
                    if (rect.length < params_.min_length_px) cell_active = false;
                }
            }
        }
        return out;
    }

private:
    bool seedable(std::size_t r) const {
        const auto& rec = map_.records[r];
        return !rec.used && !rec.discarded_as_seed && !rec.zero();
    }

    std::vector<std::size_t> cell_order() const {
        std::vector<std::size_t> order;
        for (std::size_t c = 0; c < map_.lattice.size(); ++c) {
            if (map_.cell_offsets[c + 1] > map_.cell_offsets[c]) order.push_back(c);
        }
        if (params_.rng_seed) {
            // Fisher-Yates on raw engine output so the order is identical
            // across standard library implementations.
            std::mt19937_64 rng(*params_.rng_seed);
            for (std::size_t i = order.size(); i > 1; --i) {
                const std::size_t j = static_cast<std::size_t>(rng() % i);
                std::swap(order[i - 1], order[j]);
            }
        }
        return order;
    }

    void take(std::size_t r, double alignment) {
        map_.records[r].used = true;
        support_.push_back(r);
        alignment_.push_back(alignment);
        if (!map_.records[r].zero()) {
            dir_sum_.c += tangent_[r].c;
            dir_sum_.s += tangent_[r].s;
        }
    }

    void release(std::size_t r) { map_.records[r].used = false; }

    bool aligned(std::size_t r, Doubled group) const {
        if (map_.records[r].zero()) return true;
        return tangent_[r].c * group.c + tangent_[r].s * group.s > cos_threshold_;
    }

    double angle_to(std::size_t r, Doubled group) const {
        if (map_.records[r].zero()) return 0.0;
        const double c = std::clamp(tangent_[r].c * group.c + tangent_[r].s * group.s, -1.0, 1.0);
        return 0.5 * std::acos(c) * 180.0 / std::numbers::pi;
    }

    std::size_t absorb_window(Pixel center, Doubled group) {
        const int rad = params_.window_radius;
        std::size_t added = 0;
        for (int dy = -rad; dy <= rad; ++dy) {
            for (int dx = -rad; dx <= rad; ++dx) {
                const Pixel q{center.x + dx, center.y + dy};
                if (!map_.lattice.contains(q)) continue;
                for (std::size_t r = map_.cell_begin(q); r < map_.cell_end(q); ++r) {
                    if (map_.records[r].used || !aligned(r, group)) continue;
                    take(r, angle_to(r, group));
                    ++added;
                }
            }
        }
        return added;
    }

    Doubled group_direction() const {
        const double n = std::hypot(dir_sum_.c, dir_sum_.s);
        if (!(n > 0.0)) return tangent_[support_.front()];
        return {dir_sum_.c / n, dir_sum_.s / n};
    }

    void update_extremes(std::size_t first_new) {
        const Point2 u = direction_of(group_direction());
        auto along = [&](std::size_t r) { return dot(map_.records[r].projection, u); };
        double lo = along(lo_), hi = along(hi_);
        for (std::size_t i = first_new; i < support_.size(); ++i) {
            const std::size_t r = support_[i];
            const double a = along(r);
            if (a < lo) lo = a, lo_ = r;
            if (a > hi) hi = a, hi_ = r;
        }
    }

    // Extends the group from its two extreme cells until a full pass over
    // both windows absorbs nothing.
    void grow() {
        lo_ = hi_ = support_.front();
        update_extremes(0);
        for (;;) {
            std::size_t added = 0;
            for (const bool low_side : {true, false}) {
                const std::size_t ext = low_side ? lo_ : hi_;
                const std::size_t before = support_.size();
                added += absorb_window(round_to_pixel(map_.records[ext].projection), group_direction());
                update_extremes(before);
            }
            if (added == 0) break;
        }
    }

    RectFit fit_rectangle() const {
        const Point2 u = direction_of(group_direction());
        const Point2 n{-u.y, u.x};
        Point2 centroid;
        for (const std::size_t r : support_) centroid = centroid + map_.records[r].projection;
        centroid = (1.0 / static_cast<double>(support_.size())) * centroid;

        double amin = std::numeric_limits<double>::infinity(), amax = -amin;
        double pmin = amin, pmax = -amin;
        for (const std::size_t r : support_) {
            const Point2 d = map_.records[r].projection - centroid;
            const double a = dot(d, u), p = dot(d, n);
            amin = std::min(amin, a), amax = std::max(amax, a);
            pmin = std::min(pmin, p), pmax = std::max(pmax, p);
        }
        return {centroid + amin * u, centroid + amax * u, amax - amin, pmax - pmin};
    }

    Point2 clamp_to_lattice(Point2 p) const {
        return {std::clamp(p.x, 0.0, static_cast<double>(map_.lattice.width)),
                std::clamp(p.y, 0.0, static_cast<double>(map_.lattice.height))};
    }

    LineProposalMap& map_;
    const SqueezeParams& params_;
    std::vector<Doubled> tangent_;
    double cos_threshold_;

    std::vector<std::size_t> support_;
    std::vector<double> alignment_;
    Doubled dir_sum_;
    std::size_t lo_ = 0;
    std::size_t hi_ = 0;
};

}  // namespace detail

/// Runs the grouping pass on an existing proposal map, updating the
/// used / discarded flags of its records in place.
inline SqueezeOutput squeeze(LineProposalMap& proposals, const SqueezeParams& params = {}) {
    validate(params);
    if (proposals.lattice.width < 2 || proposals.lattice.height < 2) {
        throw LatticeError("squeeze needs a lattice of at least 2x2");
    }
    return detail::Grouper(proposals, params).run();
}

/// Decodes a raw attraction field map into a line segment map.
inline SqueezeOutput squeeze(const AttractionFieldMap& afm, const SqueezeParams& params = {}) {
    validate(params);
    if (afm.lattice.width < 2 || afm.lattice.height < 2) {
        throw LatticeError("squeeze needs a lattice of at least 2x2");
    }
    LineProposalMap proposals = build_line_proposal_map(afm);
    return detail::Grouper(proposals, params).run();
}

}  // namespace afm
