#include "hsal/color.hpp"

#include <algorithm>
#include <cmath>

namespace hsal {

namespace {

// Linear interpolation into one of the 5 nm tables.
double table_at(const std::array<double, kCieTableSize>& table, double nm) {
    if (nm < kCmfMinNm || nm > kCmfMaxNm) return 0.0;
    const double pos = (nm - kCmfMinNm) / 5.0;
    const size_t i0 = std::min(size_t(pos), kCieTableSize - 2);
    const double t = pos - double(i0);
    return table[i0] * (1.0 - t) + table[i0 + 1] * t;
}

}  // namespace

XyzTriple cmf_at(double nm) {
    return {table_at(kCieXBar, nm), table_at(kCieYBar, nm), table_at(kCieZBar, nm)};
}

double d65_at(double nm) {
    return table_at(kD65Spd, nm);
}

std::vector<double> d65_on_grid(const WavelengthGrid& grid) {
    std::vector<double> s(size_t(grid.band_count()));
    for (int b = 0; b < grid.band_count(); ++b) s[size_t(b)] = d65_at(grid.band(b));
    return s;
}

XyzTriple spectrum_to_xyz(std::span<const double> rho, const WavelengthGrid& grid,
                          std::span<const double> reference_illuminant) {
    if (int(rho.size()) != grid.band_count() ||
        int(reference_illuminant.size()) != grid.band_count())
        throw Error("spectrum_to_xyz: band count mismatch");

    std::vector<int> vis;
    for (int b = 0; b < grid.band_count(); ++b)
        if (grid.band(b) >= kCmfMinNm && grid.band(b) <= kCmfMaxNm) vis.push_back(b);
    if (vis.size() < 5)
        throw Error("spectrum_to_xyz: fewer than 5 bands inside the visible 380-780 nm range");

    // Half-gap weights over the visible subsequence, one-sided at the ends.
    const size_t m = vis.size();
    std::vector<double> w(m);
    for (size_t j = 0; j < m; ++j) {
        const double lo = j == 0 ? grid.band(vis[0]) : grid.band(vis[j - 1]);
        const double hi = j + 1 == m ? grid.band(vis[m - 1]) : grid.band(vis[j + 1]);
        w[j] = (hi - lo) / 2.0;
    }

    double X = 0.0, Y = 0.0, Z = 0.0, norm = 0.0;
    for (size_t j = 0; j < m; ++j) {
        const int b = vis[j];
        const XyzTriple cmf = cmf_at(grid.band(b));
        const double sw = reference_illuminant[size_t(b)] * w[j];
        X += rho[size_t(b)] * sw * cmf.x;
        Y += rho[size_t(b)] * sw * cmf.y;
        Z += rho[size_t(b)] * sw * cmf.z;
        norm += sw * cmf.y;
    }
    if (!(norm > 0.0)) throw Error("spectrum_to_xyz: reference illuminant has no visible power");
    const double k = 1.0 / norm;
    return {k * X, k * Y, k * Z};
}

RgbTriple xyz_to_linear_rgb(const XyzTriple& c) {
    return {3.2404542 * c.x - 1.5371385 * c.y - 0.4985314 * c.z,
            -0.9692660 * c.x + 1.8760108 * c.y + 0.0415560 * c.z,
            0.0556434 * c.x - 0.2040259 * c.y + 1.0572252 * c.z};
}

XyzTriple linear_rgb_to_xyz(const RgbTriple& c) {
    return {0.4124564 * c.r + 0.3575761 * c.g + 0.1804375 * c.b,
            0.2126729 * c.r + 0.7151522 * c.g + 0.0721750 * c.b,
            0.0193339 * c.r + 0.1191920 * c.g + 0.9503041 * c.b};
}

double srgb_encode(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

uint8_t srgb_encode_8bit(double linear) {
    return uint8_t(std::lround(srgb_encode(linear) * 255.0));
}

SrgbResult xyz_to_srgb(const XyzTriple& xyz) {
    const RgbTriple raw = xyz_to_linear_rgb(xyz);
    SrgbResult out;
    out.linear = {std::clamp(raw.r, 0.0, 1.0), std::clamp(raw.g, 0.0, 1.0),
                  std::clamp(raw.b, 0.0, 1.0)};
    out.clipped = raw.r != out.linear.r || raw.g != out.linear.g || raw.b != out.linear.b;
    out.r8 = srgb_encode_8bit(out.linear.r);
    out.g8 = srgb_encode_8bit(out.linear.g);
    out.b8 = srgb_encode_8bit(out.linear.b);
    return out;
}

XyzTriple white_point_xyz(WhitePoint wp) {
    switch (wp) {
        case WhitePoint::D65: return {0.95047, 1.0, 1.08883};
        case WhitePoint::D50: return {0.96422, 1.0, 0.82521};
    }
    throw Error("unknown white point");
}

}  // namespace hsal
