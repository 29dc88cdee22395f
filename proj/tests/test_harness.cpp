#include <afm/harness.hpp>

#include <gtest/gtest.h>

namespace afm {
namespace {

TEST(ScaleMap, IdentityAndDoubling) {
    const LineSegmentMap m{{10, 10}, {{{1, 1}, {3, 1}}}};
    EXPECT_EQ(scale_map(m, 1.0), m);
    const auto d = scale_map(m, 2.0);
    EXPECT_EQ(d.lattice, (ImageLattice{20, 20}));
    EXPECT_EQ(d.segments[0], (LineSegment{{2, 2}, {6, 2}}));
}

TEST(ScaleMap, ComposedHalvingMatchesQuarter) {
    const LineSegmentMap m{{321, 199}, {{{10.5, 3.25}, {300, 190}}, {{0, 0}, {321, 199}}}};
    const auto twice = scale_map(scale_map(m, 0.5), 0.5);
    const auto once = scale_map(m, 0.25);
    // 321 -> 161 -> 81 vs 321 -> 80: lattices differ by rounding only
    EXPECT_LE(std::abs(twice.lattice.width - once.lattice.width), 1);
    EXPECT_LE(std::abs(twice.lattice.height - once.lattice.height), 1);
    for (std::size_t i = 0; i < m.segments.size(); ++i) {
        EXPECT_LE(norm(twice.segments[i].start - once.segments[i].start), 1.0);
        EXPECT_LE(norm(twice.segments[i].end - once.segments[i].end), 1.0);
    }
}

TEST(ScaleMap, ClampsAndRejectsBadScale) {
    const LineSegmentMap m{{3, 3}, {{{0, 0}, {3, 3}}}};
    const auto s = scale_map(m, 0.1);
    EXPECT_EQ(s.lattice, (ImageLattice{1, 1}));
    EXPECT_NO_THROW(validate(s));
    EXPECT_THROW(scale_map(m, 0.0), DomainError);
    EXPECT_THROW(scale_map(m, -1.0), DomainError);
}

TEST(ScaleGrid, DefaultGridHasSixteenPoints) {
    const auto g = scale_grid(0.5, 0.1, 2.0);
    ASSERT_EQ(g.size(), 16u);
    EXPECT_DOUBLE_EQ(g.front(), 0.5);
    EXPECT_NEAR(g.back(), 2.0, 1e-12);
    EXPECT_THROW(scale_grid(1.0, 0.1, 0.5), DomainError);
    EXPECT_THROW(scale_grid(0.5, 0.0, 2.0), DomainError);
}

TEST(Synth, SeedDeterminismAndConstraints) {
    SynthConfig cfg;
    cfg.seed = 1;
    const auto a = generate_synthetic_map(cfg);
    EXPECT_EQ(a, generate_synthetic_map(cfg));
    cfg.seed = 2;
    EXPECT_NE(a, generate_synthetic_map(cfg));

    cfg.min_segments = cfg.max_segments = 5;
    for (std::uint64_t s = 0; s < 20; ++s) {
        cfg.seed = s;
        const auto m = generate_synthetic_map(cfg);
        ASSERT_EQ(m.segments.size(), 5u);
        EXPECT_NO_THROW(validate(m));
        for (const auto& seg : m.segments) EXPECT_GE(seg.length(), cfg.min_length_px);
    }
}

TEST(Synth, CountStaysInRange) {
    SynthConfig cfg;
    for (std::uint64_t s = 0; s < 50; ++s) {
        cfg.seed = s;
        const auto n = generate_synthetic_map(cfg).segments.size();
        EXPECT_GE(n, 5u);
        EXPECT_LE(n, 30u);
    }
}

TEST(Synth, ImpossibleConfigsThrow) {
    SynthConfig cfg;
    cfg.lattice = {10, 10};
    cfg.min_length_px = 20;
    EXPECT_THROW(generate_synthetic_map(cfg), ConfigError);
    cfg = {};
    cfg.min_segments = 4;
    cfg.max_segments = 3;
    EXPECT_THROW(generate_synthetic_map(cfg), ConfigError);
    cfg = {};
    cfg.lattice = {4, 4};
    cfg.min_length_px = 1;
    cfg.min_segments = cfg.max_segments = 30;
    cfg.min_endpoint_separation_px = 3;
    EXPECT_THROW(generate_synthetic_map(cfg), ConfigError);
}

TEST(VerifyDuality, SingleLongSegment) {
    const LineSegmentMap m{{320, 320}, {{{20, 30}, {290, 250}}}};
    const auto rep = verify_duality(m, {1.0});
    ASSERT_EQ(rep.per_scale.size(), 1u);
    EXPECT_GE(rep.mean_precision, 0.99);
    EXPECT_GE(rep.mean_recall, 0.99);
}

TEST(VerifyDuality, DeterministicAndValidated) {
    SynthConfig cfg;
    cfg.seed = 3;
    const auto m = generate_synthetic_map(cfg);
    const auto a = verify_duality(m, {0.5, 1.0});
    const auto b = verify_duality(m, {0.5, 1.0});
    EXPECT_EQ(a.mean_precision, b.mean_precision);
    EXPECT_EQ(a.mean_recall, b.mean_recall);
    EXPECT_EQ(a.scales, (std::vector<double>{0.5, 1.0}));

    EXPECT_THROW(verify_duality(m, {}), DomainError);
    EXPECT_THROW(verify_duality(m, {1.0, 1.0}), DomainError);
    EXPECT_THROW(verify_duality(LineSegmentMap{{10, 10}, {}}, {1.0}), EmptyMapError);
}

}  // namespace
}  // namespace afm
