#include <afm/cli.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace afm {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("afm_cli_test_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string at(const std::string& name) const { return (dir_ / name).string(); }

    int run(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        return cli::run(args, out_, err_);
    }

    LineSegmentMap sample_map(std::uint64_t seed = 17) const {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.lattice = {160, 120};
        cfg.max_segments = 10;
        return generate_synthetic_map(cfg);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

TEST_F(CliTest, EncodeMatchesLibrary) {
    const auto m = sample_map();
    write_segments(m, at("m.json"));
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("raw.afm")}), 0) << err_.str();
    EXPECT_EQ(detail::read_bytes(at("raw.afm")), encode_afm(compute_attraction_field(m).field));

    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("s.afm"), "--stretch"}), 0);
    const auto s = read_afm(at("s.afm"));
    EXPECT_EQ(s.state, FieldState::stretched);
    EXPECT_EQ(encode_afm(s), encode_afm(stretch(size_normalize(compute_attraction_field(m).field))));
}

TEST_F(CliTest, EncodeThenSqueezeReproducesMap) {
    const auto m = sample_map();
    write_segments(m, at("m.json"));
    for (const bool stretched : {false, true}) {
        std::vector<std::string> enc{"encode", "--input", at("m.json"), "--output", at("a.afm")};
        if (stretched) enc.push_back("--stretch");
        ASSERT_EQ(run(enc), 0);
        ASSERT_EQ(run({"squeeze", "--input", at("a.afm"), "--output", at("d.json")}), 0) << err_.str();
        const auto decoded = read_segments(at("d.json"));
        EXPECT_EQ(decoded, squeeze(restore_raw(read_afm(at("a.afm")))).segments);
        const auto ev = evaluate(decoded, m);
        EXPECT_GE(ev.precision, 0.95);
        EXPECT_GE(ev.recall, 0.90);
    }
}

TEST_F(CliTest, SqueezeFlagsReachTheLibrary) {
    const auto m = sample_map(4);
    write_segments(m, at("m.json"));
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("a.afm")}), 0);
    ASSERT_EQ(run({"squeeze", "--input", at("a.afm"), "--output", at("d.json"), "--tau", "15", "--aspect", "0.5",
                   "--window", "2", "--seed", "3"}),
              0);
    SqueezeParams p;
    p.angular_threshold_deg = 15;
    p.aspect_ratio_max = 0.5;
    p.window_radius = 2;
    p.rng_seed = 3;
    EXPECT_EQ(read_segments(at("d.json")), squeeze(read_afm(at("a.afm")), p).segments);
}

TEST_F(CliTest, RoundtripDefaultGridHasSixteenRows) {
    write_segments(sample_map(), at("m.json"));
    ASSERT_EQ(run({"roundtrip", "--input", at("m.json"), "--report", at("r.csv")}), 0) << err_.str();
    std::istringstream csv(detail::read_text(at("r.csv")));
    std::vector<std::string> lines;
    for (std::string line; std::getline(csv, line);) lines.push_back(line);
    ASSERT_EQ(lines.size(), 18u);  // header + 16 scales + mean
    EXPECT_EQ(lines.front(), "scale,precision,recall,fmeasure");
    EXPECT_EQ(lines[1].substr(0, 4), "0.5,");
    EXPECT_EQ(lines[16].substr(0, 2), "2,");
    EXPECT_EQ(lines.back().substr(0, 5), "mean,");
    const auto rep = verify_duality(sample_map(), scale_grid(0.5, 0.1, 2.0));
    EXPECT_EQ(detail::read_text(at("r.csv")), scale_sweep_csv(rep));
}

TEST_F(CliTest, EvalAndSweepMatchLibrary) {
    const auto m = sample_map();
    write_segments(m, at("gt.json"));
    ASSERT_EQ(run({"eval", "--detected", at("gt.json"), "--gt", at("gt.json"), "--report", at("e.csv")}), 0);
    EXPECT_EQ(detail::read_text(at("e.csv")), eval_csv(evaluate(m, m), 0.01));

    auto shifted = m;
    for (auto& s : shifted.segments) s.start.x = std::min(s.start.x + 1, 159.0), s.end.x = std::min(s.end.x + 1, 159.0);
    write_segments(shifted, at("det.json"));
    ASSERT_EQ(run({"eval", "--detected", at("det.json"), "--gt", at("gt.json"), "--report", at("x.csv"),
                   "--matcher", "exact"}),
              0);
    EXPECT_EQ(detail::read_text(at("x.csv")), eval_csv(evaluate(shifted, m, 0.01, Matcher::exact), 0.01));
    EXPECT_EQ(run({"eval", "--detected", at("det.json"), "--gt", at("gt.json"), "--report", at("x.csv"),
                   "--matcher", "optimal"}),
              1);

    ASSERT_EQ(run({"encode", "--input", at("gt.json"), "--output", at("a.afm"), "--normalize"}), 0);
    ASSERT_EQ(run({"sweep", "--afm", at("a.afm"), "--gt", at("gt.json"), "--report", at("s.csv")}), 0);
    const auto pts = pr_sweep(restore_raw(read_afm(at("a.afm"))), m, default_aspect_thresholds());
    EXPECT_EQ(detail::read_text(at("s.csv")), sweep_csv(pts));
}

TEST_F(CliTest, SynthWritesSeededMaps) {
    ASSERT_EQ(run({"synth", "--seed", "9", "--count", "3", "--width", "64", "--height", "48", "--outdir",
                   at("maps"), "--min-length", "10"}),
              0)
        << err_.str();
    for (int i = 0; i < 3; ++i) {
        SynthConfig cfg;
        cfg.seed = 9 + static_cast<std::uint64_t>(i);
        cfg.lattice = {64, 48};
        cfg.min_length_px = 10;
        EXPECT_EQ(read_segments(at("maps/synth_000" + std::to_string(i) + ".json")), generate_synthetic_map(cfg));
    }
}

TEST_F(CliTest, VizDetectsInputKind) {
    const LineSegmentMap m{{10, 10}, {{{0, 0}, {9, 9}}}};
    write_segments(m, at("m.json"));
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("a.afm")}), 0);
    ASSERT_EQ(run({"viz", "--input", at("a.afm"), "--output", at("a.ppm")}), 0);
    ASSERT_EQ(run({"viz", "--input", at("m.json"), "--output", at("m.ppm")}), 0);
    EXPECT_EQ(detail::read_bytes(at("a.ppm")), encode_ppm(render(read_afm(at("a.afm")))));
    EXPECT_EQ(detail::read_bytes(at("m.ppm")), encode_ppm(render(m)));
    EXPECT_EQ(detail::read_text(at("a.ppm")).substr(0, 10), "P6\n20 10\n2");
}

TEST_F(CliTest, ExitCodes) {
    write_segments(sample_map(), at("m.json"));
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("a.afm")}), 0);

    EXPECT_EQ(run({"squeeze", "--input", at("a.afm"), "--output", at("d.json"), "--aspect", "1.5"}), 1);
    EXPECT_EQ(run({"frobnicate"}), 1);
    EXPECT_NE(err_.str().find("Usage"), std::string::npos);
    EXPECT_EQ(run({"encode", "--input", at("m.json"), "--output", at("x.afm"), "--bogus"}), 1);
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"roundtrip", "--input", at("m.json"), "--report", at("r.csv"), "--scales", "0.5-2"}), 1);

    EXPECT_EQ(run({"encode", "--input", at("missing.json"), "--output", at("x.afm")}), 2);
    EXPECT_EQ(run({"encode", "--input", at("m.json"), "--output", at("no/such/dir/x.afm")}), 2);

    detail::write_text(at("bad.afm"), "AFM2garbagegarbage");
    EXPECT_EQ(run({"squeeze", "--input", at("bad.afm"), "--output", at("d.json")}), 1);
    detail::write_text(at("bad.json"), R"({"width": 5, "height": 5, "segments": [[0,0,0,0]]})");
    EXPECT_EQ(run({"encode", "--input", at("bad.json"), "--output", at("x.afm")}), 1);
    detail::write_text(at("empty.json"), R"({"width": 5, "height": 5, "segments": []})");
    EXPECT_EQ(run({"encode", "--input", at("empty.json"), "--output", at("x.afm")}), 1);

    EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, FileWritersAreDeterministic) {
    write_segments(sample_map(), at("m.json"));
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("a1.afm")}), 0);
    ASSERT_EQ(run({"encode", "--input", at("m.json"), "--output", at("a2.afm")}), 0);
    EXPECT_EQ(detail::read_bytes(at("a1.afm")), detail::read_bytes(at("a2.afm")));
    ASSERT_EQ(run({"squeeze", "--input", at("a1.afm"), "--output", at("d1.json")}), 0);
    ASSERT_EQ(run({"squeeze", "--input", at("a1.afm"), "--output", at("d2.json")}), 0);
    EXPECT_EQ(detail::read_bytes(at("d1.json")), detail::read_bytes(at("d2.json")));
}

#ifdef AFM_CLI_PATH
TEST_F(CliTest, BinaryEndToEnd) {
    write_segments(sample_map(), at("m.json"));
    const std::string bin = AFM_CLI_PATH;
    EXPECT_EQ(std::system((bin + " encode --input " + at("m.json") + " --output " + at("a.afm")).c_str()), 0);
    EXPECT_EQ(std::system((bin + " squeeze --input " + at("a.afm") + " --output " + at("d.json") + " > /dev/null")
                              .c_str()),
              0);
    EXPECT_GE(evaluate(read_segments(at("d.json")), sample_map()).f_measure, 0.9);
    const int status = std::system((bin + " squeeze --input " + at("a.afm") + " --output " + at("d.json") +
                                    " --aspect 1.5 2> /dev/null")
                                       .c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 1);
}
#endif

}  // namespace
}  // namespace afm
