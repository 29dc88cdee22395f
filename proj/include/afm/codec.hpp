#pragma once

// Encoding of a line segment map into its region-partition map and
// attraction field map.

#include <afm/errors.hpp>
#include <afm/geometry.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <utility>
#include <vector>

namespace afm {

/// Which transforms have been applied to an attraction field map.
enum class FieldState : std::uint8_t { raw, size_normalized, stretched };

inline const char* to_string(FieldState s) {
    switch (s) {
    case FieldState::raw: return "raw";
    case FieldState::size_normalized: return "size_normalized";
    case FieldState::stretched: return "stretched";
    }
    return "unknown";
}

struct RegionPartitionMap {
    ImageLattice lattice;
    std::vector<std::int32_t> region_index;  ///< row-major, one segment index per pixel

    std::int32_t at(Pixel p) const { return region_index[lattice.index(p)]; }

    friend bool operator==(const RegionPartitionMap&, const RegionPartitionMap&) = default;
};

struct AttractionFieldMap {
    ImageLattice lattice;
    std::vector<Point2> vectors;  ///< row-major (a_x, a_y)
    FieldState state = FieldState::raw;

    AttractionFieldMap() = default;
    AttractionFieldMap(ImageLattice l, FieldState s = FieldState::raw)
        : lattice(l), vectors(l.size()), state(s) {}

    Point2& at(Pixel p) { return vectors[lattice.index(p)]; }
    Point2 at(Pixel p) const { return vectors[lattice.index(p)]; }

    friend bool operator==(const AttractionFieldMap&, const AttractionFieldMap&) = default;
};

struct EncodedMap {
    AttractionFieldMap field;
    RegionPartitionMap partition;
};

namespace detail {

inline void require_segments(const LineSegmentMap& map) {
    validate(map.lattice);
    if (map.segments.empty()) throw EmptyMapError("cannot encode a map without segments");
    for (std::size_t i = 0; i < map.segments.size(); ++i) {
        if (map.segments[i].degenerate()) {
            throw InvalidSegmentError("segment " + std::to_string(i) + " has zero length");
        }
    }
}

// Exhaustive nearest-segment scan over rows [row_begin, row_end). Ties go to
// the lowest segment index.
inline void encode_rows(const LineSegmentMap& map, int row_begin, int row_end, AttractionFieldMap& field,
                        RegionPartitionMap& partition) {
    const auto& segs = map.segments;
    for (int y = row_begin; y < row_end; ++y) {
        for (int x = 0; x < map.lattice.width; ++x) {
            const Pixel px{x, y};
            const Point2 p = to_point(px);
            std::int32_t best = 0;
            Projection best_proj = project_point_to_segment(p, segs[0]);
            for (std::size_t i = 1; i < segs.size(); ++i) {
                const Projection proj = project_point_to_segment(p, segs[i]);
                if (proj.sq_dist < best_proj.sq_dist) {
                    best = static_cast<std::int32_t>(i);
                    best_proj = proj;
                }
            }
            const std::size_t k = map.lattice.index(px);
            partition.region_index[k] = best;
            field.vectors[k] = best_proj.point - p;
        }
    }
}

}  // namespace detail

/// Encodes `map` into its attraction field map (state raw) and the
/// region-partition map it was computed against.
///
/// `threads` > 1 splits the lattice into contiguous row bands; each pixel is
/// computed independently so the output does not depend on the split.
inline EncodedMap compute_attraction_field(const LineSegmentMap& map, unsigned threads = 1) {
    detail::require_segments(map);
    EncodedMap out{AttractionFieldMap(map.lattice), RegionPartitionMap{map.lattice, {}}};
    out.partition.region_index.assign(map.lattice.size(), 0);

    const int height = map.lattice.height;
    threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(height));
    if (threads == 1) {
        detail::encode_rows(map, 0, height, out.field, out.partition);
        return out;
    }
    std::vector<std::jthread> workers;
    workers.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const int begin = static_cast<int>(static_cast<long long>(height) * t / threads);
        const int end = static_cast<int>(static_cast<long long>(height) * (t + 1) / threads);
        workers.emplace_back([&, begin, end] { detail::encode_rows(map, begin, end, out.field, out.partition); });
    }
    workers.clear();
    return out;
}

inline RegionPartitionMap compute_region_partition(const LineSegmentMap& map) {
    return compute_attraction_field(map).partition;
}

}  // namespace afm
