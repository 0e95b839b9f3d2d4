#pragma once

#include "hsal/albedo.hpp"
#include "hsal/lidar.hpp"
#include "hsal/metrics.hpp"
#include "hsal/spectral.hpp"
#include "hsal/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hsal {

// Deterministic splitmix64-based generator with a hand-rolled Box-Muller
// normal, so rendered fixtures are bit-identical across platforms and
// standard library versions.
class SimRng {
public:
    explicit SimRng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64();
    double uniform();  // [0, 1)
    double gaussian(double sigma);

private:
    uint64_t state_;
};

enum class ScanPattern { RegularGrid, Random, Scanline };

struct MaterialSpectrum {
    std::string name;
    std::vector<double> reflectance;  // per band, [0, 1]
};

struct OccluderSpec {
    bool enabled = true;
    // Two-level shadow: 1 for lit pixels, this factor inside the umbra.
    // Strictly positive so shadowed pixels still carry signal in every band.
    double attenuation = 0.3;
};

struct LidarScanSpec {
    double coverage = 0.2;  // fraction of frame pixels sampled, (0, 1]
    ScanPattern pattern = ScanPattern::RegularGrid;
    SensorConstants constants{0.05, 0.9, 0.95, 905.0};
};

struct CameraSpec {
    double fx = 76.8, fy = 76.8;
    double cx = 32.0, cy = 32.0;
    double board_depth_m = 2.0;
    double tilt_deg = 0.0;  // board tilt about the vertical axis
};

struct NoiseSpec {
    double radiance_sigma = 0.0;  // additive Gaussian, radiance units
    double lidar_sigma = 0.0;     // additive Gaussian on return intensity
};

struct SceneSpec {
    int width = 64, height = 64;
    int board_rows = 4, board_cols = 6;
    int board_margin_px = 4;
    WavelengthGrid grid;
    std::vector<MaterialSpectrum> materials;  // rows*cols patch materials, then background
    std::vector<double> illuminant;           // e*(lambda) per band, > 0
    Vec3 light_dir{0.25, -0.35, -1.0};        // from surface toward the light
    OccluderSpec occluder;
    LidarScanSpec lidar;
    CameraSpec camera;
    NoiseSpec noise;
    uint64_t seed = 1;

    void validate() const;
};

struct SceneBundle {
    SpectralCube cube;
    SpectralCube white_cube;
    LidarSampleSet lidar;
    Image<float> shading;        // geometric factor m per pixel
    AlbedoMap truth_albedo;      // fully valid
    ReferenceChart chart;
    Image<uint8_t> material_id;  // per-pixel palette index
    Image<uint8_t> shadow_mask;  // 1 inside the cast shadow
};

// Lambertian forward model per pixel and band:
//   I(lambda) = m * e(lambda) * rho_material(lambda) + noise,  m = cos(theta_light) * shadow
// The white cube is the same illuminant seen off a unit reflector at m = 1.
// LiDAR samples are generated with the range-equation forward model from the
// shared pinhole geometry (camera and scanner co-located, registration
// exact by construction). An optional per-pixel multiplier scales the
// shading field, for cancellation experiments; the LiDAR return is active
// sensing and does not see it.
SceneBundle render_scene(const SceneSpec& spec, const Image<float>* shading_multiplier = nullptr);

// 4x6 patch board on a 64x64 frame: 31 visible bands (400-700 nm) plus the
// 905 nm LiDAR band, 24 smooth distinct material spectra, daylight-like
// illuminant, T-shaped cast shadow.
SceneSpec default_colorboard_spec();

SceneSpec load_scene_spec(const std::string& path);
void save_scene_spec(const std::string& path, const SceneSpec& spec);

}  // namespace hsal
