#pragma once

// Command-line front end. Every subcommand is a thin wrapper over the
// library call of the same name.
//
// Exit codes: 0 success, 1 usage or validation error, 2 I/O error.

#include <afm/codec.hpp>
#include <afm/errors.hpp>
#include <afm/harness.hpp>
#include <afm/io.hpp>
#include <afm/metrics.hpp>
#include <afm/squeeze.hpp>
#include <afm/transforms.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace afm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Worker count for encoding, from AFM_THREADS (default 1).
inline unsigned thread_budget() {
    const char* env = std::getenv("AFM_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    return (end != env && *end == '\0' && n > 0) ? static_cast<unsigned>(n) : 1u;
}

/// Parses "LO:STEP:HI".
inline std::vector<double> parse_scale_grid(const std::string& text) {
    double lo = 0, step = 0, hi = 0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> step >> c2 >> hi) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
        throw DomainError("scale grid must look like LO:STEP:HI, got '" + text + "'");
    }
    return scale_grid(lo, step, hi);
}

namespace detail {

struct SqueezeFlags {
    double tau = 10.0;
    double aspect = 0.2;
    int window = 1;
    std::optional<std::uint64_t> seed;

    void attach(CLI::App& cmd) {
        cmd.add_option("--tau", tau, "Angular threshold in degrees")->capture_default_str();
        cmd.add_option("--aspect", aspect, "Maximum width/length ratio, in (0, 1]")->capture_default_str();
        cmd.add_option("--window", window, "Search window radius (1 = 3x3)")->capture_default_str();
        cmd.add_option("--seed", seed, "Shuffle seed order with this RNG seed");
    }

    SqueezeParams params() const {
        SqueezeParams p;
        p.angular_threshold_deg = tau;
        p.aspect_ratio_max = aspect;
        p.window_radius = window;
        p.rng_seed = seed;
        validate(p);
        return p;
    }
};

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Attraction field encoding, squeeze decoding and evaluation of line segment maps", "afm"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string input, output, report, detected, gt, afm_path, outdir;
    bool normalize = false, do_stretch = false;
    std::string scales = "0.5:0.1:2.0";
    double tolerance = 0.01;
    detail::SqueezeFlags sq;
    std::uint64_t seed = 0;
    int count = 1, width = 320, height = 320, min_segments = 5, max_segments = 30;
    double min_length = 20.0;

    auto* encode = app.add_subcommand("encode", "Encode a segment map into an AFM1 file");
    encode->add_option("--input", input, "Segment map JSON")->required();
    encode->add_option("--output", output, "AFM1 output")->required();
    encode->add_flag("--normalize", normalize, "Divide components by the image size");
    encode->add_flag("--stretch", do_stretch, "Apply the log stretch (implies --normalize)");

    auto* sqz = app.add_subcommand("squeeze", "Decode an AFM1 file into a segment map");
    sqz->add_option("--input", input, "AFM1 input")->required();
    sqz->add_option("--output", output, "Segment map JSON output")->required();
    sq.attach(*sqz);

    auto* roundtrip = app.add_subcommand("roundtrip", "Encode, squeeze and evaluate across scales");
    roundtrip->add_option("--input", input, "Segment map JSON")->required();
    roundtrip->add_option("--scales", scales, "Scale grid LO:STEP:HI")->capture_default_str();
    roundtrip->add_option("--report", report, "CSV output")->required();
    roundtrip->add_option("--tolerance", tolerance, "Match tolerance relative to the diagonal")->capture_default_str();
    sq.attach(*roundtrip);

    auto* eval = app.add_subcommand("eval", "Precision / recall of a detected map against ground truth");
    eval->add_option("--detected", detected, "Detected segment map JSON")->required();
    eval->add_option("--gt", gt, "Ground-truth segment map JSON")->required();
    eval->add_option("--tolerance", tolerance, "Match tolerance relative to the diagonal")->capture_default_str();
    eval->add_option("--report", report, "CSV output")->required();
    std::string matcher = "greedy";
    eval->add_option("--matcher", matcher, "Pixel matching: greedy (nearest-first) or exact (maximum matching)")
        ->check(CLI::IsMember({"greedy", "exact"}))
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Aspect-ratio threshold sweep over an AFM");
    sweep->add_option("--afm", afm_path, "AFM1 input")->required();
    sweep->add_option("--gt", gt, "Ground-truth segment map JSON")->required();
    sweep->add_option("--report", report, "CSV output")->required();
    sweep->add_option("--tolerance", tolerance, "Match tolerance relative to the diagonal")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Write seeded synthetic segment maps");
    synth->add_option("--seed", seed, "Base seed; map i uses seed + i")->required();
    synth->add_option("--count", count, "Number of maps")->required()->check(CLI::PositiveNumber);
    synth->add_option("--width", width, "Lattice width")->required()->check(CLI::PositiveNumber);
    synth->add_option("--height", height, "Lattice height")->required()->check(CLI::PositiveNumber);
    synth->add_option("--outdir", outdir, "Output directory")->required();
    synth->add_option("--min-segments", min_segments, "Fewest segments per map")->capture_default_str();
    synth->add_option("--max-segments", max_segments, "Most segments per map")->capture_default_str();
    synth->add_option("--min-length", min_length, "Shortest segment in pixels")->capture_default_str();

    auto* viz = app.add_subcommand("viz", "Render a segment map or an AFM as a PPM image");
    viz->add_option("--input", input, "Segment map JSON or AFM1 file")->required();
    viz->add_option("--output", output, "PPM output")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n\n" << app.help();
        return kExitValidation;
    }

    try {
        if (*encode) {
            const LineSegmentMap map = read_segments(input);
            AttractionFieldMap field = compute_attraction_field(map, thread_budget()).field;
            if (normalize || do_stretch) field = size_normalize(std::move(field));
            if (do_stretch) {
                std::size_t clamped = 0;
                field = stretch(std::move(field), &clamped);
                if (clamped) err << "warning: clamped " << clamped << " components before stretching\n";
            }
            write_afm(field, output);
        } else if (*sqz) {
            const SqueezeParams params = sq.params();
            const auto decoded = squeeze(restore_raw(read_afm(input)), params);
            write_segments(decoded.segments, output);
            out << decoded.segments.segments.size() << " segments, " << decoded.rejected_seed_count
                << " rejected seeds\n";
        } else if (*roundtrip) {
            const SqueezeParams params = sq.params();
            const auto rep = verify_duality(read_segments(input), parse_scale_grid(scales), params, tolerance);
            write_report(scale_sweep_csv(rep), report);
        } else if (*eval) {
            const auto rep = evaluate(read_segments(detected), read_segments(gt), tolerance,
                                      matcher == "exact" ? Matcher::exact : Matcher::greedy);
            write_report(eval_csv(rep, tolerance), report);
            out << "P=" << rep.precision << " R=" << rep.recall << " F=" << rep.f_measure << "\n";
        } else if (*sweep) {
            const auto pts = pr_sweep(restore_raw(read_afm(afm_path)), read_segments(gt),
                                      default_aspect_thresholds(), SqueezeParams{}, tolerance);
            write_report(sweep_csv(pts), report);
        } else if (*synth) {
            std::filesystem::create_directories(outdir);
            for (int i = 0; i < count; ++i) {
                SynthConfig cfg;
                cfg.seed = seed + static_cast<std::uint64_t>(i);
                cfg.lattice = {width, height};
                cfg.min_segments = min_segments;
                cfg.max_segments = max_segments;
                cfg.min_length_px = min_length;
                char name[32];
                std::snprintf(name, sizeof name, "synth_%04d.json", i);
                write_segments(generate_synthetic_map(cfg), std::filesystem::path(outdir) / name);
            }
        } else if (*viz) {
            if (looks_like_afm(input)) {
                render_visualization(read_afm(input), output);
            } else {
                render_visualization(read_segments(input), output);
            }
        }
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}

}  // namespace afm::cli
