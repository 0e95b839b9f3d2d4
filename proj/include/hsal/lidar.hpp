#pragma once

#include "hsal/types.hpp"

#include <string>
#include <vector>

namespace hsal {

// Samples at grazing incidence are rejected: the 1/cos(theta) factor in the
// inversion amplifies noise without bound as theta approaches 90 degrees.
constexpr double kDefaultCosMin = 0.1;

// Inverted reflectance above 1 indicates calibration error; values are
// clamped here (with a flag) instead of failing hard, so usable pixels
// survive a miscalibrated constant.
constexpr double kDefaultClampMax = 1.5;

struct SensorConstants {
    double receiver_aperture_d_r = 0.0;  // meters
    double eta_sys = 0.0;                // (0, 1]
    double eta_atm = 0.0;                // (0, 1]
    double lidar_wavelength_nm = 0.0;

    void validate() const;
};

struct LidarSample {
    int u = 0, v = 0;           // pixel coordinates in the hyperspectral frame
    double range_m = 0.0;       // > 0
    double intensity = 0.0;     // >= 0, unitless return intensity
    double cos_theta = 0.0;     // (0, 1]
};

struct LidarSampleSet {
    SensorConstants constants;
    std::vector<LidarSample> samples;
    int frame_width = 0, frame_height = 0;

    // Frame bounds and (u,v) uniqueness.
    void validate() const;
};

// Return intensity of the range equation:
//   L = D_r^2 eta_sys eta_atm rho cos(theta) / (4 R^2)
double forward_intensity(const SensorConstants& c, double rho_lidar, double range_m,
                         double cos_theta);

struct InvertOptions {
    double cos_min = kDefaultCosMin;
    double clamp_max = kDefaultClampMax;
};

struct InvertResult {
    double rho = 0.0;
    bool clamped = false;   // hit clamp_max
    bool rejected = false;  // grazing incidence, sample unusable
};

// Inverse of the range equation: rho = 4 L R^2 / (D_r^2 eta_sys eta_atm cos(theta)).
InvertResult invert_reflectance(const SensorConstants& c, const LidarSample& s,
                                const InvertOptions& opt = {});

struct PinholeIntrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;

    // Unit direction of the ray through the center of pixel (u, v),
    // camera at the origin looking down +z.
    Vec3 ray_direction(int u, int v) const {
        return Vec3{(u + 0.5 - cx) / fx, (v + 0.5 - cy) / fy, 1.0}.normalized();
    }
    Vec3 back_project(int u, int v, double depth_z) const {
        return {(u + 0.5 - cx) / fx * depth_z, (v + 0.5 - cy) / fy * depth_z, depth_z};
    }
};

struct NormalMap {
    Image<Vec3> normals;
    Image<uint8_t> valid;
};

// Per-pixel unit normals from central finite differences of back-projected
// 3-D points. Depth values <= 0 are treated as holes; pixels without a full
// cross of valid neighbors are flagged invalid. Normals are oriented toward
// the sensor.
NormalMap normals_from_depth(const Image<double>& depth, const PinholeIntrinsics& intr);

// cos(theta) = |n . ray| per pixel; invalid where the normal is invalid.
Image<double> incidence_cosines(const NormalMap& normals, const PinholeIntrinsics& intr,
                                const Image<double>& depth);

// Sample-set container: CSV `u,v,range_m,intensity,cos_theta` plus a JSON
// sidecar holding SensorConstants and the frame size.
LidarSampleSet load_lidar_csv(const std::string& csv_path, const std::string& sidecar_path);
void save_lidar_csv(const std::string& csv_path, const std::string& sidecar_path,
                    const LidarSampleSet& set);

// Optional registration table `index,u,v`: reassigns sample pixel
// coordinates by row index, for externally aligned captures.
void apply_registration_table(LidarSampleSet& set, const std::string& table_csv_path);

}  // namespace hsal
