#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsal/metrics.hpp"
#include "hsal/sim.hpp"

#include <array>
#include <cmath>
#include <filesystem>

using namespace hsal;

namespace {

LabColor lab(double L, double a, double b, WhitePoint wp = WhitePoint::D65) {
    return {L, a, b, wp};
}

// Sharma, Wu, Dalal implementation-notes test set: L1 a1 b1, L2 a2 b2,
// expected dE00. All 34 published pairs.
struct SharmaPair {
    double l1, a1, b1, l2, a2, b2, expected;
};
constexpr std::array<SharmaPair, 34> kSharmaPairs = {{
    {50.0000, 2.6772, -79.7751, 50.0000, 0.0000, -82.7485, 2.0425},
    {50.0000, 3.1571, -77.2803, 50.0000, 0.0000, -82.7485, 2.8615},
    {50.0000, 2.8361, -74.0200, 50.0000, 0.0000, -82.7485, 3.4412},
    {50.0000, -1.3802, -84.2814, 50.0000, 0.0000, -82.7485, 1.0000},
    {50.0000, -1.1848, -84.8006, 50.0000, 0.0000, -82.7485, 1.0000},
    {50.0000, -0.9009, -85.5211, 50.0000, 0.0000, -82.7485, 1.0000},
    {50.0000, 0.0000, 0.0000, 50.0000, -1.0000, 2.0000, 2.3669},
    {50.0000, -1.0000, 2.0000, 50.0000, 0.0000, 0.0000, 2.3669},
    {50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0009, 7.1792},
    {50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0010, 7.1792},
    {50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0011, 7.2195},
    {50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0012, 7.2195},
    {50.0000, -0.0010, 2.4900, 50.0000, 0.0009, -2.4900, 4.8045},
    {50.0000, -0.0010, 2.4900, 50.0000, 0.0010, -2.4900, 4.8045},
    {50.0000, -0.0010, 2.4900, 50.0000, 0.0011, -2.4900, 4.7461},
    {50.0000, 2.5000, 0.0000, 50.0000, 0.0000, -2.5000, 4.3065},
    {50.0000, 2.5000, 0.0000, 73.0000, 25.0000, -18.0000, 27.1492},
    {50.0000, 2.5000, 0.0000, 61.0000, -5.0000, 29.0000, 22.8977},
    {50.0000, 2.5000, 0.0000, 56.0000, -27.0000, -3.0000, 31.9030},
    {50.0000, 2.5000, 0.0000, 58.0000, 24.0000, 15.0000, 19.4535},
    {50.0000, 2.5000, 0.0000, 50.0000, 3.1736, 0.5854, 1.0000},
    {50.0000, 2.5000, 0.0000, 50.0000, 3.2972, 0.0000, 1.0000},
    {50.0000, 2.5000, 0.0000, 50.0000, 1.8634, 0.5757, 1.0000},
    {50.0000, 2.5000, 0.0000, 50.0000, 3.2592, 0.3350, 1.0000},
    {60.2574, -34.0099, 36.2677, 60.4626, -34.1751, 39.4387, 1.2644},
    {63.0109, -31.0961, -5.8663, 62.8187, -29.7946, -4.0864, 1.2630},
    {61.2901, 3.7196, -5.3901, 61.4292, 2.2480, -4.9620, 1.8731},
    {35.0831, -44.1164, 3.7933, 35.0232, -40.0716, 1.5901, 1.8645},
    {22.7233, 20.0904, -46.6940, 23.0331, 14.9730, -42.5619, 2.0373},
    {36.4612, 47.8580, 18.3852, 36.2715, 50.5065, 21.2231, 1.4146},
    {90.8027, -2.0831, 1.4410, 91.1528, -1.6435, 0.0447, 1.4441},
    {90.9257, -0.5406, -0.9208, 88.6381, -0.8985, -0.7239, 1.5381},
    {6.7747, -0.2908, -2.4247, 5.8714, -0.0985, -2.2286, 0.6377},
    {2.0776, 0.0795, -1.1350, 0.9033, -0.0636, -0.5514, 0.9082},
}};

AlbedoMap uniform_map(int w, int h, const RgbTriple& c) {
    AlbedoMap m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, c, PixelProvenance::Measured);
    return m;
}

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hsal_test_metrics";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("cie76 basics") {
    CHECK(cie76(lab(50, 10, -10), lab(50, 10, -10)) == 0.0);
    CHECK(cie76(lab(50, 0, 0), lab(53, 4, 0)) == doctest::Approx(5.0));  // 3-4-5

    SimRng rng(2);
    for (int i = 0; i < 100; ++i) {
        const LabColor a = lab(rng.uniform() * 100, rng.uniform() * 200 - 100,
                               rng.uniform() * 200 - 100);
        const LabColor b = lab(rng.uniform() * 100, rng.uniform() * 200 - 100,
                               rng.uniform() * 200 - 100);
        const double expected = std::sqrt((a.L - b.L) * (a.L - b.L) + (a.a - b.a) * (a.a - b.a) +
                                          (a.b - b.b) * (a.b - b.b));
        CHECK(cie76(a, b) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("white point mismatch is a hard error") {
    CHECK_THROWS_AS(static_cast<void>(cie76(lab(50, 0, 0), lab(50, 0, 0, WhitePoint::D50))),
                    Error);
    CHECK_THROWS_AS(static_cast<void>(ciede2000(lab(50, 0, 0), lab(50, 0, 0, WhitePoint::D50))),
                    Error);
}

TEST_CASE("ciede2000 reproduces all 34 Sharma-Wu-Dalal pairs") {
    for (const auto& p : kSharmaPairs) {
        const double got = ciede2000(lab(p.l1, p.a1, p.b1), lab(p.l2, p.a2, p.b2));
        CHECK(std::abs(got - p.expected) < 1e-4);
    }
}

TEST_CASE("ciede2000 identity, positivity, symmetry") {
    CHECK(ciede2000(lab(50, 2.5, 0), lab(50, 2.5, 0)) == 0.0);

    SimRng rng(9);
    for (int i = 0; i < 200; ++i) {
        const LabColor a = lab(rng.uniform() * 100, rng.uniform() * 160 - 80,
                               rng.uniform() * 160 - 80);
        const LabColor b = lab(rng.uniform() * 100, rng.uniform() * 160 - 80,
                               rng.uniform() * 160 - 80);
        const double ab = ciede2000(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab == doctest::Approx(ciede2000(b, a)).epsilon(1e-12));
    }
}

TEST_CASE("lab conversion reference points") {
    const LabColor white = xyz_to_lab(white_point_xyz(WhitePoint::D65));
    CHECK(white.L == doctest::Approx(100.0));
    CHECK(white.a == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(white.b == doctest::Approx(0.0).epsilon(1e-9));

    const LabColor black = xyz_to_lab({0.0, 0.0, 0.0});
    CHECK(black.L == doctest::Approx(0.0));

    // In-gamut linear RGB keeps L* in [0, 100].
    SimRng rng(14);
    for (int i = 0; i < 100; ++i) {
        const LabColor c = linear_rgb_to_lab({rng.uniform(), rng.uniform(), rng.uniform()});
        CHECK(c.L >= 0.0);
        CHECK(c.L <= 100.0);
    }
}

TEST_CASE("chart_report on an exact match") {
    ReferenceChart chart;
    chart.patches = {{"a", {0, 0, 4, 4}, {0.5, 0.25, 0.1}},
                     {"b", {4, 0, 4, 4}, {0.1, 0.6, 0.3}},
                     {"c", {0, 4, 4, 4}, {0.8, 0.8, 0.8}}};
    AlbedoMap map(8, 8);
    for (const auto& p : chart.patches)
        for (int y = p.region.y; y < p.region.y + p.region.height; ++y)
            for (int x = p.region.x; x < p.region.x + p.region.width; ++x)
                map.set(x, y, p.truth_linear, PixelProvenance::Measured);

    const ChartReport r = chart_report(map, chart);
    REQUIRE(r.patches.size() == 3);
    CHECK(r.mean_cie76 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.mean_ciede2000 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.mse == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r.luminance_correlation == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("luminance correlation is scale invariant, color error is not") {
    ReferenceChart chart;
    chart.patches = {{"a", {0, 0, 2, 2}, {0.6, 0.3, 0.1}},
                     {"b", {2, 0, 2, 2}, {0.2, 0.5, 0.7}},
                     {"c", {0, 2, 2, 2}, {0.9, 0.9, 0.9}}};
    AlbedoMap map(4, 4);
    for (const auto& p : chart.patches) {
        const RgbTriple half{p.truth_linear.r * 0.5, p.truth_linear.g * 0.5,
                             p.truth_linear.b * 0.5};
        for (int y = p.region.y; y < p.region.y + p.region.height; ++y)
            for (int x = p.region.x; x < p.region.x + p.region.width; ++x)
                map.set(x, y, half, PixelProvenance::Measured);
    }
    const ChartReport r = chart_report(map, chart);
    CHECK(r.luminance_correlation == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.mean_ciede2000 > 1.0);

    // Full affine transform of the predicted luminance (positive slope):
    // scale down and add a gray pedestal. Correlation must stay 1.
    AlbedoMap affine(4, 4);
    for (const auto& p : chart.patches) {
        const RgbTriple c{p.truth_linear.r * 0.5 + 0.08, p.truth_linear.g * 0.5 + 0.08,
                          p.truth_linear.b * 0.5 + 0.08};
        for (int y = p.region.y; y < p.region.y + p.region.height; ++y)
            for (int x = p.region.x; x < p.region.x + p.region.width; ++x)
                affine.set(x, y, c, PixelProvenance::Measured);
    }
    CHECK(chart_report(affine, chart).luminance_correlation ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("patches without valid pixels are excluded and reported") {
    ReferenceChart chart;
    chart.patches = {{"covered", {0, 0, 2, 2}, {0.5, 0.5, 0.5}},
                     {"covered2", {2, 0, 2, 2}, {0.2, 0.4, 0.6}},
                     {"empty", {0, 2, 2, 2}, {0.1, 0.1, 0.1}}};
    AlbedoMap map(4, 4);  // all invalid
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 4; ++x)
            map.set(x, y, {0.3, 0.3, 0.3}, PixelProvenance::Measured);

    const ChartReport r = chart_report(map, chart);
    CHECK(r.patches.size() == 2);
    REQUIRE(r.skipped_patches.size() == 1);
    CHECK(r.skipped_patches[0] == "empty");
}

TEST_CASE("chart validation") {
    ReferenceChart overlap;
    overlap.patches = {{"a", {0, 0, 4, 4}, {}}, {"b", {2, 2, 4, 4}, {}}};
    CHECK_THROWS_AS(overlap.validate(8, 8), Error);

    ReferenceChart outside;
    outside.patches = {{"a", {6, 6, 4, 4}, {}}};
    CHECK_THROWS_AS(outside.validate(8, 8), Error);
}

TEST_CASE("whdr prediction bands") {
    CHECK(predict_judgment(1.0, 1.0, 0.1) == PairJudgment::Equal);
    CHECK(predict_judgment(1.0, 1.09, 0.1) == PairJudgment::Equal);
    CHECK(predict_judgment(1.0, 1.2, 0.1) == PairJudgment::ADarker);
    CHECK(predict_judgment(1.2, 1.0, 0.1) == PairJudgment::BDarker);
    CHECK(predict_judgment(0.0, 0.0, 0.1) == PairJudgment::Equal);
    CHECK(predict_judgment(0.5, 0.0, 0.1) == PairJudgment::BDarker);
}

TEST_CASE("whdr endpoints and the 8-of-38 fixture") {
    // Two-level map: left half dark, right half bright.
    AlbedoMap map(8, 2);
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 8; ++x)
            map.set(x, y, x < 4 ? RgbTriple{0.2, 0.2, 0.2} : RgbTriple{0.8, 0.8, 0.8},
                    PixelProvenance::Measured);

    std::vector<PairAnnotation> all_match, all_wrong;
    for (int i = 0; i < 4; ++i) {
        all_match.push_back({i, 0, i + 4, 0, PairJudgment::ADarker, 1.0});
        all_wrong.push_back({i, 0, i + 4, 0, PairJudgment::BDarker, 1.0});
    }
    CHECK(whdr(map, all_match) == 0.0);
    CHECK(whdr(map, all_wrong) == 1.0);

    // 38 unit-weight annotations with exactly 8 induced mismatches.
    std::vector<PairAnnotation> fixture;
    for (int i = 0; i < 38; ++i) {
        const int x = i % 4;
        const int y = i < 19 ? 0 : 1;
        const bool wrong = i < 8;
        fixture.push_back({x, y, x + 4, y,
                           wrong ? PairJudgment::BDarker : PairJudgment::ADarker, 1.0});
    }
    CHECK(std::abs(whdr(map, fixture) - 8.0 / 38.0) < 1e-12);
}

TEST_CASE("whdr weight scaling and luminance scaling invariance") {
    AlbedoMap map(4, 1);
    map.set(0, 0, {0.1, 0.1, 0.1}, PixelProvenance::Measured);
    map.set(1, 0, {0.5, 0.5, 0.5}, PixelProvenance::Measured);
    map.set(2, 0, {0.52, 0.52, 0.52}, PixelProvenance::Measured);
    map.set(3, 0, {0.9, 0.9, 0.9}, PixelProvenance::Measured);

    std::vector<PairAnnotation> ann = {{0, 0, 1, 0, PairJudgment::ADarker, 1.0},
                                       {1, 0, 2, 0, PairJudgment::Equal, 2.0},
                                       {2, 0, 3, 0, PairJudgment::BDarker, 0.5},
                                       {0, 0, 3, 0, PairJudgment::Equal, 1.0}};
    const double base = whdr(map, ann);

    auto scaled_w = ann;
    for (auto& a : scaled_w) a.weight *= 7.5;
    CHECK(whdr(map, scaled_w) == doctest::Approx(base).epsilon(1e-12));

    // Scaling the whole map's luminance leaves every ratio unchanged.
    AlbedoMap half(4, 1);
    for (int x = 0; x < 4; ++x) {
        const RgbTriple c = map.linear(x, 0);
        half.set(x, 0, {c.r * 0.5, c.g * 0.5, c.b * 0.5}, PixelProvenance::Measured);
    }
    CHECK(whdr(half, ann) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("whdr input validation") {
    AlbedoMap map(4, 1);
    map.set(0, 0, {0.5, 0.5, 0.5}, PixelProvenance::Measured);
    map.set(1, 0, {0.5, 0.5, 0.5}, PixelProvenance::Measured);

    CHECK_THROWS_AS(static_cast<void>(whdr(map, {})), Error);  // zero total weight
    CHECK_THROWS_AS(
        static_cast<void>(whdr(map, {{0, 0, 0, 0, PairJudgment::Equal, 1.0}})), Error);
    CHECK_THROWS_AS(
        static_cast<void>(whdr(map, {{0, 0, 9, 0, PairJudgment::Equal, 1.0}})), Error);
    CHECK_THROWS_AS(
        static_cast<void>(whdr(map, {{0, 0, 2, 0, PairJudgment::Equal, 1.0}})), Error);
    CHECK_THROWS_AS(
        static_cast<void>(whdr(map, {{0, 0, 1, 0, PairJudgment::Equal, -1.0}})), Error);
}

TEST_CASE("annotation file round trip") {
    const std::vector<PairAnnotation> ann = {{1, 2, 3, 4, PairJudgment::ADarker, 1.5},
                                             {5, 6, 7, 8, PairJudgment::Equal, 1.0}};
    const std::string p = temp_path("ann.json");
    save_annotations(p, ann);
    const auto loaded = load_annotations(p);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].ax == 1);
    CHECK(loaded[0].judgment == PairJudgment::ADarker);
    CHECK(loaded[0].weight == 1.5);
    CHECK(loaded[1].judgment == PairJudgment::Equal);
}

TEST_CASE("ratio scatter on a perfect map") {
    ReferenceChart chart;
    chart.patches = {{"a", {0, 0, 2, 2}, {0.6, 0.3, 0.1}},
                     {"b", {2, 0, 2, 2}, {0.2, 0.5, 0.7}},
                     {"c", {0, 2, 2, 2}, {0.9, 0.9, 0.9}},
                     {"d", {2, 2, 2, 2}, {0.3, 0.3, 0.3}}};
    AlbedoMap map(4, 4);
    for (const auto& p : chart.patches)
        for (int y = p.region.y; y < p.region.y + p.region.height; ++y)
            for (int x = p.region.x; x < p.region.x + p.region.width; ++x)
                map.set(x, y, p.truth_linear, PixelProvenance::Measured);

    const RatioScatter s = ratio_scatter_report(map, chart);
    CHECK(s.points.size() == 6);  // 4 choose 2
    for (const auto& pt : s.points)
        CHECK(pt.predicted_ratio == doctest::Approx(pt.truth_ratio).epsilon(1e-12));
    CHECK(s.rms_deviation == doctest::Approx(0.0).epsilon(1e-12));

    save_ratio_scatter_csv(temp_path("scatter.csv"), s);
    save_ratio_scatter_png(temp_path("scatter.png"), s);
    CHECK(std::filesystem::file_size(temp_path("scatter.png")) > 0);
}

TEST_CASE("zero-luminance truth patches are skipped in the scatter") {
    ReferenceChart chart;
    chart.patches = {{"a", {0, 0, 2, 2}, {0.5, 0.5, 0.5}},
                     {"zero", {2, 0, 2, 2}, {0.0, 0.0, 0.0}},
                     {"b", {0, 2, 2, 2}, {0.25, 0.25, 0.25}}};
    AlbedoMap map = uniform_map(4, 4, {0.4, 0.4, 0.4});
    const RatioScatter s = ratio_scatter_report(map, chart);
    CHECK(s.points.size() == 1);  // only a/b survives
    CHECK(s.skipped_pairs.size() == 2);
}
