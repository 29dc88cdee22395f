#pragma once

// Size normalization and value stretching of attraction field maps, and
// their inverses. The legal state paths are
//   raw -> size_normalized -> stretched
// and the exact reverse.

#include <afm/codec.hpp>
#include <afm/errors.hpp>

#include <cmath>
#include <cstddef>
#include <string>

namespace afm {

inline constexpr double kStretchEpsilon = 1e-6;

/// Largest magnitude accepted by `stretch_value` unchanged. Larger inputs
/// would make log(|z| + eps) non-negative and flip the sign of the output.
inline constexpr double kStretchLimit = 1.0 - 2.0 * kStretchEpsilon;

namespace detail {

inline double sign(double z) { return static_cast<double>((0.0 < z) - (z < 0.0)); }

inline void require_state(const AttractionFieldMap& afm, FieldState expected, const char* op) {
    if (afm.state != expected) {
        throw StateError(std::string(op) + " expects a " + to_string(expected) + " field, got " +
                         to_string(afm.state));
    }
}

}  // namespace detail

/// S(z) = -sign(z) * log(|z| + eps), with S(0) = 0. Magnitudes above
/// kStretchLimit are clamped to it.
inline double stretch_value(double z) {
    const double m = std::min(std::fabs(z), kStretchLimit);
    return -detail::sign(z) * std::log(m + kStretchEpsilon);
}

/// S^-1(z') = sign(z') * exp(-|z'|).
inline double unstretch_value(double z) { return detail::sign(z) * std::exp(-std::fabs(z)); }

inline AttractionFieldMap size_normalize(AttractionFieldMap afm) {
    detail::require_state(afm, FieldState::raw, "size_normalize");
    const double w = afm.lattice.width;
    const double h = afm.lattice.height;
    for (auto& v : afm.vectors) v = {v.x / w, v.y / h};
    afm.state = FieldState::size_normalized;
    return afm;
}

inline AttractionFieldMap size_denormalize(AttractionFieldMap afm) {
    detail::require_state(afm, FieldState::size_normalized, "size_denormalize");
    const double w = afm.lattice.width;
    const double h = afm.lattice.height;
    for (auto& v : afm.vectors) v = {v.x * w, v.y * h};
    afm.state = FieldState::raw;
    return afm;
}

/// Applies S to every component. When `clamped` is given it receives the
/// number of components whose magnitude exceeded kStretchLimit.
inline AttractionFieldMap stretch(AttractionFieldMap afm, std::size_t* clamped = nullptr) {
    detail::require_state(afm, FieldState::size_normalized, "stretch");
    std::size_t n = 0;
    for (auto& v : afm.vectors) {
        n += (std::fabs(v.x) > kStretchLimit) + (std::fabs(v.y) > kStretchLimit);
        v = {stretch_value(v.x), stretch_value(v.y)};
    }
    if (clamped) *clamped = n;
    afm.state = FieldState::stretched;
    return afm;
}

inline AttractionFieldMap unstretch(AttractionFieldMap afm) {
    detail::require_state(afm, FieldState::stretched, "unstretch");
    for (auto& v : afm.vectors) v = {unstretch_value(v.x), unstretch_value(v.y)};
    afm.state = FieldState::size_normalized;
    return afm;
}

/// Undoes whatever transforms the state flags record, yielding a raw field.
inline AttractionFieldMap restore_raw(AttractionFieldMap afm) {
    if (afm.state == FieldState::stretched) afm = unstretch(std::move(afm));
    if (afm.state == FieldState::size_normalized) afm = size_denormalize(std::move(afm));
    return afm;
}

}  // namespace afm
