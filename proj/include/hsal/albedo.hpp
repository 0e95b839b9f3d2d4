#pragma once

#include "hsal/color.hpp"
#include "hsal/lidar.hpp"
#include "hsal/spectral.hpp"
#include "hsal/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hsal {

enum class PixelProvenance : uint8_t {
    Invalid = 0,
    Measured = 1,   // backed by an accepted LiDAR sample
    Densified = 2,  // filled by spectral-similarity lookup
};

// Per-pixel sRGB / linear-RGB albedo with validity and provenance.
class AlbedoMap {
public:
    AlbedoMap() = default;
    AlbedoMap(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool valid(int x, int y) const { return provenance(x, y) != PixelProvenance::Invalid; }
    PixelProvenance provenance(int x, int y) const {
        return provenance_[idx(x, y)];
    }
    RgbTriple linear(int x, int y) const {
        const size_t i = idx(x, y) * 3;
        return {linear_[i], linear_[i + 1], linear_[i + 2]};
    }
    // Transfer-encoded view of the same pixel.
    std::array<uint8_t, 3> srgb8(int x, int y) const;
    void set(int x, int y, const RgbTriple& lin, PixelProvenance prov);

    size_t valid_count() const;

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

private:
    size_t idx(int x, int y) const { return size_t(y) * width_ + x; }

    int width_ = 0, height_ = 0;
    std::vector<double> linear_;  // 3 per pixel, gamut-clipped
    std::vector<PixelProvenance> provenance_;
};

// Sidecar format: float32 NPY of shape (H, W, 4) holding linear R, G, B and
// the provenance flag (0 invalid / 1 measured / 2 densified). The PNG is an
// sRGB preview with invalid pixels transparent.
void save_albedo_npy(const std::string& path, const AlbedoMap& map);
AlbedoMap load_albedo_npy(const std::string& path);
void save_albedo_png(const std::string& path, const AlbedoMap& map);

// Per-pixel reflectance spectra where a LiDAR sample was accepted.
class ReflectanceSpectrumMap {
public:
    ReflectanceSpectrumMap() = default;
    ReflectanceSpectrumMap(WavelengthGrid grid, int width, int height);

    const WavelengthGrid& grid() const { return grid_; }
    int width() const { return width_; }
    int height() const { return height_; }

    bool valid(int x, int y) const { return valid_[size_t(y) * width_ + x] != 0; }
    std::span<const double> spectrum(int x, int y) const {
        return {rho_.data() + (size_t(y) * width_ + x) * grid_.band_count(),
                size_t(grid_.band_count())};
    }
    void set_spectrum(int x, int y, std::span<const double> rho);

    size_t valid_count() const;

private:
    WavelengthGrid grid_;
    int width_ = 0, height_ = 0;
    std::vector<double> rho_;
    std::vector<uint8_t> valid_;
};

struct RecoverOptions {
    double cos_min = kDefaultCosMin;
    double clamp_max = kDefaultClampMax;
    // Denominator guard: I(lambda_lidar) at the pixel must exceed
    // epsilon_i_scale * max radiance of the cube.
    double epsilon_i_scale = 1e-6;
};

// Why a LiDAR-covered pixel produced no albedo.
struct RecoverSummary {
    size_t samples_total = 0;
    size_t accepted = 0;
    size_t rejected_grazing = 0;     // cos(theta) below cos_min
    size_t rejected_low_signal = 0;  // I(lambda_lidar) at or below the guard
    size_t clamped_reflectance = 0;  // inverted rho hit clamp_max
    size_t gamut_clipped = 0;        // sRGB conversion clipped a channel
};

// Reflectance spectrum at one pixel via the calibrated band ratio:
//   rho(l) = e(l_lidar)/e(l) * I(l)/I(l_lidar) * rho(l_lidar)
// The pixel's region spectrum is used when the illuminant carries a spatial
// field. Returns empty when I(lambda_lidar) <= epsilon_i (rejected pixel).
std::vector<double> recover_spectrum(const SpectralCube& cube, const IlluminantSpectrum& illum,
                                     int u, int v, double rho_lidar, int lidar_band,
                                     double epsilon_i);

struct SparseAlbedoResult {
    AlbedoMap albedo;
    ReflectanceSpectrumMap spectra;
    RecoverSummary summary;
};

// Full sparse pipeline over every LiDAR sample:
// invert -> recover spectrum -> XYZ -> sRGB. Per-pixel rejections are
// counted, never fatal unless no pixel survives.
SparseAlbedoResult compute_sparse_albedo(const SpectralCube& cube,
                                         const IlluminantSpectrum& illum,
                                         const LidarSampleSet& lidar,
                                         const RecoverOptions& opt = {});

// Radiance rendered straight to sRGB after white-balancing by the
// illuminant; keeps the shading term, so shadows stay in. This is the
// passive-sensing baseline the recovered albedo is compared against.
AlbedoMap rgb_baseline_from_cube(const SpectralCube& cube, const IlluminantSpectrum& illum);

}  // namespace hsal
