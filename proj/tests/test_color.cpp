#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsal/color.hpp"
#include "hsal/sim.hpp"

#include <cmath>
#include <vector>

using namespace hsal;

namespace {

WavelengthGrid visible_grid() {
    std::vector<double> nm;
    for (int b = 400; b <= 700; b += 10) nm.push_back(double(b));
    return WavelengthGrid(nm);
}

std::vector<double> ones(int n) {
    return std::vector<double>(size_t(n), 1.0);
}

}  // namespace

TEST_CASE("cmf table access") {
    // Table rows pass through the interpolator untouched.
    const XyzTriple at550 = cmf_at(550.0);
    CHECK(at550.x == doctest::Approx(0.433450));
    CHECK(at550.y == doctest::Approx(0.994950));
    CHECK(at550.z == doctest::Approx(0.008750));

    // Midpoint interpolation between 550 and 555.
    const XyzTriple mid = cmf_at(552.5);
    CHECK(mid.y == doctest::Approx((0.994950 + 1.000000) / 2.0));

    // Outside the observer's support.
    CHECK(cmf_at(905.0).x == 0.0);
    CHECK(cmf_at(300.0).y == 0.0);
}

TEST_CASE("d65 table access") {
    CHECK(d65_at(560.0) == doctest::Approx(100.000));
    CHECK(d65_at(450.0) == doctest::Approx(117.008));
    CHECK(d65_at(905.0) == 0.0);
}

TEST_CASE("perfect reflector normalizes to Y exactly 1") {
    const WavelengthGrid grid = visible_grid();
    const auto rho = ones(grid.band_count());
    const auto s = d65_on_grid(grid);
    const XyzTriple xyz = spectrum_to_xyz(rho, grid, s);
    CHECK(xyz.y == 1.0);  // exact by construction of the normalization
}

TEST_CASE("zero reflector maps to zero") {
    const WavelengthGrid grid = visible_grid();
    const std::vector<double> rho(size_t(grid.band_count()), 0.0);
    const XyzTriple xyz = spectrum_to_xyz(rho, grid, d65_on_grid(grid));
    CHECK(xyz.x == 0.0);
    CHECK(xyz.y == 0.0);
    CHECK(xyz.z == 0.0);
}

TEST_CASE("narrowband reflector reproduces the tabulated observer chromaticity") {
    const WavelengthGrid grid = visible_grid();
    std::vector<double> rho(size_t(grid.band_count()), 0.0);
    rho[15] = 1.0;  // the 550 nm band
    REQUIRE(grid.band(15) == 550.0);

    const XyzTriple xyz = spectrum_to_xyz(rho, grid, ones(grid.band_count()));
    const double sum = xyz.x + xyz.y + xyz.z;

    // Direct table lookup oracle.
    const double tx = 0.433450, ty = 0.994950, tz = 0.008750;
    const double tsum = tx + ty + tz;
    CHECK(std::abs(xyz.x / sum - tx / tsum) < 1e-3);
    CHECK(std::abs(xyz.y / sum - ty / tsum) < 1e-3);
}

TEST_CASE("bands outside the visible range carry no weight") {
    // Same visible content, one extra NIR band; the XYZ must not move.
    const WavelengthGrid vis = visible_grid();
    std::vector<double> nm = vis.bands();
    nm.push_back(905.0);
    const WavelengthGrid nir(nm);

    SimRng rng(8);
    std::vector<double> rho_vis(size_t(vis.band_count()));
    for (auto& v : rho_vis) v = rng.uniform();
    std::vector<double> rho_nir = rho_vis;
    rho_nir.push_back(0.77);  // arbitrary NIR reflectance

    const XyzTriple a = spectrum_to_xyz(rho_vis, vis, ones(vis.band_count()));
    const XyzTriple b = spectrum_to_xyz(rho_nir, nir, ones(nir.band_count()));
    CHECK(a.x == doctest::Approx(b.x).epsilon(1e-12));
    CHECK(a.y == doctest::Approx(b.y).epsilon(1e-12));
    CHECK(a.z == doctest::Approx(b.z).epsilon(1e-12));
}

TEST_CASE("spectrum_to_xyz is linear in reflectance at fixed normalization") {
    const WavelengthGrid grid = visible_grid();
    const auto s = d65_on_grid(grid);
    SimRng rng(21);
    std::vector<double> r1(size_t(grid.band_count())), r2 = r1, mix = r1;
    for (int b = 0; b < grid.band_count(); ++b) {
        r1[size_t(b)] = rng.uniform();
        r2[size_t(b)] = rng.uniform();
    }
    const double a = 0.3, c = 0.6;
    for (int b = 0; b < grid.band_count(); ++b)
        mix[size_t(b)] = a * r1[size_t(b)] + c * r2[size_t(b)];

    const XyzTriple x1 = spectrum_to_xyz(r1, grid, s);
    const XyzTriple x2 = spectrum_to_xyz(r2, grid, s);
    const XyzTriple xm = spectrum_to_xyz(mix, grid, s);
    CHECK(std::abs(xm.x - (a * x1.x + c * x2.x)) < 1e-9);
    CHECK(std::abs(xm.y - (a * x1.y + c * x2.y)) < 1e-9);
    CHECK(std::abs(xm.z - (a * x1.z + c * x2.z)) < 1e-9);
}

TEST_CASE("insufficient visible coverage is an error") {
    const WavelengthGrid grid({800.0, 850.0, 900.0, 950.0, 1000.0});
    const auto rho = ones(grid.band_count());
    CHECK_THROWS_AS(static_cast<void>(spectrum_to_xyz(rho, grid, rho)), Error);

    const WavelengthGrid four({400.0, 500.0, 600.0, 700.0, 800.0});  // 4 visible bands
    const auto rho4 = ones(four.band_count());
    CHECK_THROWS_AS(static_cast<void>(spectrum_to_xyz(rho4, four, rho4)), Error);
}

TEST_CASE("xyz_to_srgb on reference points") {
    // D65 white point lands on linear (1,1,1) with the published matrix.
    const SrgbResult white = xyz_to_srgb({0.95047, 1.0, 1.08883});
    CHECK(std::abs(white.linear.r - 1.0) < 1e-3);
    CHECK(std::abs(white.linear.g - 1.0) < 1e-3);
    CHECK(std::abs(white.linear.b - 1.0) < 1e-3);

    const SrgbResult black = xyz_to_srgb({0.0, 0.0, 0.0});
    CHECK(black.linear.r == 0.0);
    CHECK(black.linear.g == 0.0);
    CHECK(black.linear.b == 0.0);
    CHECK(black.r8 == 0);
    CHECK_FALSE(black.clipped);
}

TEST_CASE("out-of-gamut inputs clip with a flag") {
    // Strongly saturated stimulus outside the sRGB gamut.
    const SrgbResult r = xyz_to_srgb({0.1, 0.5, 0.1});
    CHECK(r.clipped);
    for (double v : {r.linear.r, r.linear.g, r.linear.b}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("srgb matrices invert each other") {
    SimRng rng(31);
    for (int i = 0; i < 50; ++i) {
        const RgbTriple rgb{rng.uniform(), rng.uniform(), rng.uniform()};
        const RgbTriple back = xyz_to_linear_rgb(linear_rgb_to_xyz(rgb));
        CHECK(back.r == doctest::Approx(rgb.r).epsilon(1e-6));
        CHECK(back.g == doctest::Approx(rgb.g).epsilon(1e-6));
        CHECK(back.b == doctest::Approx(rgb.b).epsilon(1e-6));
    }
}

TEST_CASE("srgb transfer curve endpoints and monotonicity") {
    CHECK(srgb_encode(0.0) == 0.0);
    CHECK(srgb_encode(1.0) == doctest::Approx(1.0));
    CHECK(srgb_encode_8bit(1.0) == 255);
    double prev = -1.0;
    for (int i = 0; i <= 100; ++i) {
        const double v = srgb_encode(i / 100.0);
        CHECK(v > prev);
        prev = v;
    }
}
