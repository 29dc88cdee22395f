#pragma once

// Geometric primitives: points, segments, the image lattice and the
// point-to-segment projection used by both the encoder and the decoder.
//
// Coordinates follow image convention: origin at the top-left corner, x to
// the right, y downward. Pixel (x, y) is the cell centered at integer
// coordinates (x, y); segment endpoints are sub-pixel reals.

#include <afm/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace afm {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
constexpr double squared_norm(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

struct LineSegment {
    Point2 start;
    Point2 end;

    Point2 direction() const { return end - start; }
    double length() const { return norm(end - start); }
    bool degenerate() const { return start == end; }

    friend constexpr bool operator==(const LineSegment&, const LineSegment&) = default;
};

/// Integer pixel coordinates on the lattice.
struct Pixel {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(Pixel, Pixel) = default;
    friend constexpr auto operator<=>(Pixel a, Pixel b) {
        // row-major order
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
};

struct ImageLattice {
    int width = 1;
    int height = 1;

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    bool contains(Pixel p) const { return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height; }
    std::size_t index(Pixel p) const {
        return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(p.x);
    }
    Pixel pixel(std::size_t i) const {
        return {static_cast<int>(i % static_cast<std::size_t>(width)), static_cast<int>(i / static_cast<std::size_t>(width))};
    }
    double diagonal() const { return std::hypot(static_cast<double>(width), static_cast<double>(height)); }
    /// True when `p` lies in the continuous extent [0, width] x [0, height].
    bool bounds(Point2 p) const { return p.x >= 0.0 && p.y >= 0.0 && p.x <= width && p.y <= height; }

    friend constexpr bool operator==(ImageLattice, ImageLattice) = default;
};

inline void validate(ImageLattice lattice) {
    if (lattice.width < 1 || lattice.height < 1) {
        throw LatticeError("lattice dimensions must be positive, got " + std::to_string(lattice.width) + "x" +
                           std::to_string(lattice.height));
    }
}

struct LineSegmentMap {
    ImageLattice lattice;
    std::vector<LineSegment> segments;

    friend bool operator==(const LineSegmentMap&, const LineSegmentMap&) = default;
};

/// Checks the map invariants: finite, in-bounds, non-degenerate segments.
/// Throws ValidationError naming the first offending segment index.
inline void validate(const LineSegmentMap& map) {
    validate(map.lattice);
    for (std::size_t i = 0; i < map.segments.size(); ++i) {
        const auto& s = map.segments[i];
        if (!is_finite(s.start) || !is_finite(s.end)) {
            throw ValidationError("segment " + std::to_string(i) + " has a non-finite coordinate");
        }
        if (!map.lattice.bounds(s.start) || !map.lattice.bounds(s.end)) {
            throw ValidationError("segment " + std::to_string(i) + " has an endpoint outside the lattice");
        }
        if (s.degenerate()) {
            throw ValidationError("segment " + std::to_string(i) + " has zero length");
        }
    }
}

struct Projection {
    double t_star = 0.0;  ///< parameter along the segment, in [0, 1]
    Point2 point;         ///< p' = start + t_star * (end - start)
    double sq_dist = 0.0; ///< |p' - p|^2
};

/// Projects `p` onto `l`, clamping to the closest endpoint when the foot of
/// the perpendicular falls outside the segment.
inline Projection project_point_to_segment(Point2 p, const LineSegment& l) {
    const Point2 d = l.direction();
    const double len2 = squared_norm(d);
    if (!(len2 > 0.0)) {
        throw InvalidSegmentError("cannot project onto a zero-length segment");
    }
    const double t = std::clamp(dot(p - l.start, d) / len2, 0.0, 1.0);
    Projection out;
    out.t_star = t;
    if (t == 0.0) {
        out.point = l.start;
    } else if (t == 1.0) {
        out.point = l.end;
    } else {
        out.point = l.start + t * d;
    }
    out.sq_dist = squared_norm(out.point - p);
    return out;
}

/// a(p) = p' - p: the displacement from `p` to its projection on `l`.
inline Point2 attraction_vector(Point2 p, const LineSegment& l) {
    return project_point_to_segment(p, l).point - p;
}

inline Point2 to_point(Pixel p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

/// Lattice cell holding a real position: floor(v + 0.5) per component.
inline Pixel round_to_pixel(Point2 v) {
    return {static_cast<int>(std::floor(v.x + 0.5)), static_cast<int>(std::floor(v.y + 0.5))};
}

}  // namespace afm
