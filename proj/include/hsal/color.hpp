#pragma once

#include "hsal/spectral.hpp"
#include "hsal/types.hpp"

#include <array>
#include <cstdint>
#include <span>

namespace hsal {

struct XyzTriple {
    double x = 0.0, y = 0.0, z = 0.0;
};

// CIE 1931 2-degree observer and D65 data, 380-780 nm at 5 nm steps
// (see cie_data.cpp).
constexpr size_t kCieTableSize = 81;
extern const std::array<double, kCieTableSize> kCieLambda;
extern const std::array<double, kCieTableSize> kCieXBar;
extern const std::array<double, kCieTableSize> kCieYBar;
extern const std::array<double, kCieTableSize> kCieZBar;
extern const std::array<double, kCieTableSize> kD65Spd;

constexpr double kCmfMinNm = 380.0;
constexpr double kCmfMaxNm = 780.0;

// Color matching functions linearly interpolated to `nm`; zero outside the
// tabulated range.
XyzTriple cmf_at(double nm);

// D65 relative spectral power interpolated to `nm`; zero outside the table.
double d65_at(double nm);

// D65 SPD sampled on a grid, for use as the XYZ rendering illuminant.
std::vector<double> d65_on_grid(const WavelengthGrid& grid);

// Tristimulus integration
//   X = k * sum_b rho(b) S(b) xbar(b) dl(b)     (Y, Z likewise)
// with k chosen so a perfect reflector has Y = 1 under S. Integration
// weights dl are trapezoid-style gaps over the bands inside the observer's
// 380-780 nm support; bands outside contribute nothing and do not stretch
// their neighbors' weights. Requires at least 5 bands in-range.
XyzTriple spectrum_to_xyz(std::span<const double> rho, const WavelengthGrid& grid,
                          std::span<const double> reference_illuminant);

struct SrgbResult {
    RgbTriple linear;     // after gamut clip to [0,1]
    uint8_t r8, g8, b8;   // sRGB transfer encoding
    bool clipped = false;
};

// Standard sRGB (D65) matrix, hard per-channel gamut clip, then the sRGB
// transfer curve.
SrgbResult xyz_to_srgb(const XyzTriple& xyz);

RgbTriple xyz_to_linear_rgb(const XyzTriple& xyz);  // no clip
XyzTriple linear_rgb_to_xyz(const RgbTriple& rgb);

double srgb_encode(double linear);   // [0,1] linear -> [0,1] encoded
uint8_t srgb_encode_8bit(double linear);

// White points for Lab conversions (XYZ of a perfect reflector).
enum class WhitePoint : uint8_t { D65, D50 };
XyzTriple white_point_xyz(WhitePoint wp);

}  // namespace hsal
