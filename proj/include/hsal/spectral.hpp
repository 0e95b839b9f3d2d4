#pragma once

#include "hsal/types.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hsal {

// Tolerance when locating the band that carries the LiDAR wavelength:
// nearest band within +/-5 nm, otherwise a hard error. Cross-grid
// operations never resample; mismatched grids are rejected.
constexpr double kLidarBandToleranceNm = 5.0;

constexpr double kWavelengthMinNm = 350.0;
constexpr double kWavelengthMaxNm = 1100.0;

// Strictly increasing wavelength grid in nanometers, shared by every
// spectral object that wants to interoperate.
class WavelengthGrid {
public:
    WavelengthGrid() = default;
    explicit WavelengthGrid(std::vector<double> bands_nm);

    const std::vector<double>& bands() const { return bands_; }
    int band_count() const { return int(bands_.size()); }
    double band(int i) const { return bands_[size_t(i)]; }

    // Index of the nearest band to `nm` if it lies within `tol_nm`.
    std::optional<int> nearest_band(double nm, double tol_nm) const;

    bool operator==(const WavelengthGrid& o) const { return bands_ == o.bands_; }

private:
    std::vector<double> bands_;
};

// Index of the band carrying the LiDAR wavelength; hard error when no band
// lies within the tolerance.
int lidar_band_index(const WavelengthGrid& grid, double lidar_wavelength_nm);

// H x W x B radiance image, sensor-linear units, nonnegative. Storage is
// float32, row-major, band-interleaved-by-pixel: the spectrum of one pixel
// is contiguous.
class SpectralCube {
public:
    SpectralCube() = default;
    SpectralCube(WavelengthGrid grid, int width, int height);
    SpectralCube(WavelengthGrid grid, int width, int height, std::vector<float> radiance);

    const WavelengthGrid& grid() const { return grid_; }
    int width() const { return width_; }
    int height() const { return height_; }
    int band_count() const { return grid_.band_count(); }

    float at(int x, int y, int b) const {
        return radiance_[(size_t(y) * width_ + x) * band_count() + b];
    }
    void set(int x, int y, int b, float v) {
        radiance_[(size_t(y) * width_ + x) * band_count() + b] = v;
    }
    std::span<const float> pixel(int x, int y) const {
        return {radiance_.data() + (size_t(y) * width_ + x) * band_count(),
                size_t(band_count())};
    }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }

    const std::vector<float>& radiance() const { return radiance_; }
    std::vector<float>& radiance() { return radiance_; }

    float max_radiance() const;

private:
    void validate() const;

    WavelengthGrid grid_;
    int width_ = 0, height_ = 0;
    std::vector<float> radiance_;
};

// Per-band radiance vector of one pixel; the material fingerprint used by
// the densifier.
struct SpectralSignature {
    std::vector<float> values;
};

// Incident light spectrum e(lambda) from a white-reference capture.
// Optionally spatially varying: a list of rectangular regions each carrying
// its own spectrum, for scenes lit unevenly enough that one whiteboard
// reading is not representative.
struct IlluminantRegion {
    PixelRect rect;
    std::vector<double> e;
};

class IlluminantSpectrum {
public:
    IlluminantSpectrum() = default;
    IlluminantSpectrum(WavelengthGrid grid, std::vector<double> e);

    const WavelengthGrid& grid() const { return grid_; }
    const std::vector<double>& e() const { return e_; }
    double e(int band) const { return e_[size_t(band)]; }

    bool has_spatial_field() const { return !regions_.empty(); }
    const std::vector<IlluminantRegion>& regions() const { return regions_; }
    void set_regions(std::vector<IlluminantRegion> regions);

    // Spectrum in effect at a pixel: the matching region's spectrum when a
    // spatial field is present (lookup miss is an error), the global one
    // otherwise.
    const std::vector<double>& e_at(int x, int y) const;

private:
    WavelengthGrid grid_;
    std::vector<double> e_;
    std::vector<IlluminantRegion> regions_;
};

// --- operations -----------------------------------------------------------

// `.hsc` container: JSON header, "\n\0" separator, little-endian f32 payload.
SpectralCube load_cube(const std::string& path);
void save_cube(const std::string& path, const SpectralCube& cube);

IlluminantSpectrum load_illuminant(const std::string& path);
void save_illuminant(const std::string& path, const IlluminantSpectrum& illum);

// Mean radiance per band over `region`, divided by the whiteboard
// reflectance. Any nonpositive band mean is a calibration error.
IlluminantSpectrum calibrate_illuminant(const SpectralCube& white_cube, const PixelRect& region,
                                        double whiteboard_reflectance = 1.0);

SpectralSignature signature_at(const SpectralCube& cube, int x, int y);

}  // namespace hsal
