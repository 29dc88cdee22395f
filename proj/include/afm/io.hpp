#pragma once

// File formats:
//   AFM1  binary attraction field map (little-endian header + float32 pairs)
//   JSON  segment maps {"width", "height", "segments": [[x1, y1, x2, y2], ...]}
//   CSV   evaluation reports
//   PPM   binary P6 visualizations

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/geometry.hpp>
#include <afm/harness.hpp>
#include <afm/metrics.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace afm {

inline constexpr std::array<char, 4> kAfmMagic{'A', 'F', 'M', '1'};
inline constexpr std::size_t kAfmHeaderSize = 13;

namespace afm_flags {
inline constexpr std::uint8_t size_normalized = 0x1;
inline constexpr std::uint8_t stretched = 0x2;
}  // namespace afm_flags

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
    return v;
}

inline std::uint8_t flags_of(FieldState s) {
    switch (s) {
    case FieldState::raw: return 0;
    case FieldState::size_normalized: return afm_flags::size_normalized;
    case FieldState::stretched: return afm_flags::size_normalized | afm_flags::stretched;
    }
    return 0;
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error while reading " + path.string());
    return bytes;
}

inline void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error while writing " + path.string());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline std::string read_text(const std::filesystem::path& path) {
    const auto bytes = read_bytes(path);
    return std::string(bytes.begin(), bytes.end());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// AFM1

/// Serializes to AFM1. Components are narrowed to float32.
inline std::vector<std::uint8_t> encode_afm(const AttractionFieldMap& afm) {
    validate(afm.lattice);
    std::vector<std::uint8_t> out;
    out.reserve(kAfmHeaderSize + 8 * afm.vectors.size());
    out.insert(out.end(), kAfmMagic.begin(), kAfmMagic.end());
    detail::put_u32(out, static_cast<std::uint32_t>(afm.lattice.width));
    detail::put_u32(out, static_cast<std::uint32_t>(afm.lattice.height));
    out.push_back(detail::flags_of(afm.state));
    for (const Point2 v : afm.vectors) {
        detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.x)));
        detail::put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v.y)));
    }
    return out;
}

inline AttractionFieldMap decode_afm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kAfmHeaderSize) throw FormatError("truncated AFM header", bytes.size());
    if (!std::equal(kAfmMagic.begin(), kAfmMagic.end(), bytes.begin())) throw FormatError("bad AFM magic", 0);
    const std::uint32_t w = detail::get_u32(bytes, 4);
    const std::uint32_t h = detail::get_u32(bytes, 8);
    if (w == 0 || w > 0x7fffffffu) throw FormatError("invalid AFM width", 4);
    if (h == 0 || h > 0x7fffffffu) throw FormatError("invalid AFM height", 8);
    const std::uint8_t flags = bytes[12];
    if ((flags & ~(afm_flags::size_normalized | afm_flags::stretched)) != 0) {
        throw FormatError("unknown AFM flag bits", 12);
    }
    if ((flags & afm_flags::stretched) && !(flags & afm_flags::size_normalized)) {
        throw FormatError("AFM flagged stretched but not size-normalized", 12);
    }
    if (std::uint64_t{w} * h > (std::uint64_t{1} << 40)) throw FormatError("AFM lattice too large", 4);
    const std::uint64_t expected = kAfmHeaderSize + 8ull * w * h;
    if (bytes.size() < expected) throw FormatError("truncated AFM payload", bytes.size());
    if (bytes.size() > expected) throw FormatError("trailing bytes after AFM payload", expected);

    const FieldState state = (flags & afm_flags::stretched)         ? FieldState::stretched
                             : (flags & afm_flags::size_normalized) ? FieldState::size_normalized
                                                                    : FieldState::raw;
    AttractionFieldMap afm(ImageLattice{static_cast<int>(w), static_cast<int>(h)}, state);
    std::size_t at = kAfmHeaderSize;
    for (auto& v : afm.vectors) {
        const float x = std::bit_cast<float>(detail::get_u32(bytes, at));
        const float y = std::bit_cast<float>(detail::get_u32(bytes, at + 4));
        if (!std::isfinite(x)) throw FormatError("non-finite AFM component", at);
        if (!std::isfinite(y)) throw FormatError("non-finite AFM component", at + 4);
        v = {x, y};
        at += 8;
    }
    return afm;
}

inline void write_afm(const AttractionFieldMap& afm, const std::filesystem::path& path) {
    detail::write_bytes(path, encode_afm(afm));
}

inline AttractionFieldMap read_afm(const std::filesystem::path& path) { return decode_afm(detail::read_bytes(path)); }

/// True when the file starts with the AFM1 magic.
inline bool looks_like_afm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::array<char, 4> head{};
    return in.read(head.data(), head.size()) && head == kAfmMagic;
}

// ---------------------------------------------------------------------------
// Segment JSON

inline std::string segments_to_json(const LineSegmentMap& map) {
    using nlohmann::json;
    std::string out = "{\"width\": " + std::to_string(map.lattice.width) +
                      ", \"height\": " + std::to_string(map.lattice.height) + ", \"segments\": [";
    for (std::size_t i = 0; i < map.segments.size(); ++i) {
        const auto& s = map.segments[i];
        out += i ? ",\n  [" : "\n  [";
        out += json(s.start.x).dump() + ", " + json(s.start.y).dump() + ", " + json(s.end.x).dump() + ", " +
               json(s.end.y).dump() + "]";
    }
    out += map.segments.empty() ? "]}\n" : "\n]}\n";
    return out;
}

/// Parses and validates a segment map. Throws ValidationError naming the
/// offending segment index.
inline LineSegmentMap segments_from_json(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ValidationError("segment map must be a JSON object");
    auto dim = [&](const char* key) {
        if (!doc.contains(key) || !doc[key].is_number_integer() || doc[key].get<long long>() < 1 ||
            doc[key].get<long long>() > 0x7fffffff) {
            throw ValidationError(std::string("\"") + key + "\" must be a positive integer");
        }
        return static_cast<int>(doc[key].get<long long>());
    };
    LineSegmentMap map;
    map.lattice = {dim("width"), dim("height")};
    if (!doc.contains("segments") || !doc["segments"].is_array()) {
        throw ValidationError("\"segments\" must be an array");
    }
    const auto& segs = doc["segments"];
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto& s = segs[i];
        if (!s.is_array() || s.size() != 4 ||
            !std::all_of(s.begin(), s.end(), [](const json& v) { return v.is_number(); })) {
            throw ValidationError("segment " + std::to_string(i) + " must be an array of 4 numbers");
        }
        map.segments.push_back(
            {{s[0].get<double>(), s[1].get<double>()}, {s[2].get<double>(), s[3].get<double>()}});
    }
    validate(map);
    return map;
}

inline void write_segments(const LineSegmentMap& map, const std::filesystem::path& path) {
    detail::write_text(path, segments_to_json(map));
}

inline LineSegmentMap read_segments(const std::filesystem::path& path) {
    return segments_from_json(detail::read_text(path));
}

// ---------------------------------------------------------------------------
// CSV reports

namespace detail {

inline std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

inline std::string csv_row(const std::string& key, double p, double r, double f) {
    return key + "," + fmt("%.6f", p) + "," + fmt("%.6f", r) + "," + fmt("%.6f", f) + "\n";
}

}  // namespace detail

inline std::string sweep_csv(const std::vector<SweepPoint>& points) {
    std::string out = "threshold,precision,recall,fmeasure\n";
    for (const auto& pt : points) {
        out += detail::csv_row(detail::fmt("%.6g", pt.threshold), pt.report.precision, pt.report.recall,
                               pt.report.f_measure);
    }
    return out;
}

/// One row per scale followed by a "mean" row.
inline std::string scale_sweep_csv(const ScaleSweepReport& rep) {
    std::string out = "scale,precision,recall,fmeasure\n";
    for (std::size_t i = 0; i < rep.scales.size(); ++i) {
        const auto& r = rep.per_scale[i];
        out += detail::csv_row(detail::fmt("%.6g", rep.scales[i]), r.precision, r.recall, r.f_measure);
    }
    out += detail::csv_row("mean", rep.mean_precision, rep.mean_recall, rep.mean_f_measure());
    return out;
}

inline std::string eval_csv(const EvalReport& rep, double rel_tolerance) {
    return "tolerance,precision,recall,fmeasure,matched,detected_pixels,gt_pixels\n" +
           detail::fmt("%.6g", rel_tolerance) + "," + detail::fmt("%.6f", rep.precision) + "," +
           detail::fmt("%.6f", rep.recall) + "," + detail::fmt("%.6f", rep.f_measure) + "," +
           std::to_string(rep.matched) + "," + std::to_string(rep.detected_pixels) + "," +
           std::to_string(rep.gt_pixels) + "\n";
}

inline void write_report(const std::string& csv, const std::filesystem::path& path) { detail::write_text(path, csv); }

// ---------------------------------------------------------------------------
// PPM

struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;  ///< row-major, 3 bytes per pixel
};

inline std::vector<std::uint8_t> encode_ppm(const RgbImage& img) {
    const std::string header = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), img.rgb.begin(), img.rgb.end());
    return out;
}

/// Black 1-px rasterized segments on white.
inline RgbImage render(const LineSegmentMap& map) {
    RgbImage img{map.lattice.width, map.lattice.height, std::vector<std::uint8_t>(3 * map.lattice.size(), 255)};
    for (const Pixel p : rasterize_segments(map)) {
        const std::size_t k = 3 * map.lattice.index(p);
        img.rgb[k] = img.rgb[k + 1] = img.rgb[k + 2] = 0;
    }
    return img;
}

/// x and y channels side by side, each min-max normalized to grayscale.
/// A constant channel renders as mid gray.
inline RgbImage render(const AttractionFieldMap& afm) {
    const int w = afm.lattice.width, h = afm.lattice.height;
    RgbImage img{2 * w, h, std::vector<std::uint8_t>(6 * afm.lattice.size(), 0)};
    for (int panel = 0; panel < 2; ++panel) {
        auto channel = [&](Point2 v) { return panel == 0 ? v.x : v.y; };
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const Point2 v : afm.vectors) lo = std::min(lo, channel(v)), hi = std::max(hi, channel(v));
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double c = channel(afm.at({x, y}));
                const auto g = hi > lo ? static_cast<std::uint8_t>(std::lround(255.0 * (c - lo) / (hi - lo)))
                                       : std::uint8_t{128};
                const std::size_t k = 3 * (static_cast<std::size_t>(y) * (2 * w) + panel * w + x);
                img.rgb[k] = img.rgb[k + 1] = img.rgb[k + 2] = g;
            }
        }
    }
    return img;
}

template <typename Input>
void render_visualization(const Input& input, const std::filesystem::path& path) {
    detail::write_bytes(path, encode_ppm(render(input)));
}

}  // namespace afm
