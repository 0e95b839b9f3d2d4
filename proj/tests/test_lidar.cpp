#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsal/io.hpp"
#include "hsal/lidar.hpp"
#include "hsal/sim.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace hsal;

namespace {

const SensorConstants kUnit{1.0, 1.0, 1.0, 905.0};
const SensorConstants kRealistic{0.05, 0.9, 0.95, 905.0};

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "hsal_test_lidar";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

// Depth map (z-coordinate per pixel) of a plane through (0,0,depth) whose
// normal is tilted by tilt_deg about the vertical axis.
Image<double> plane_depth(int w, int h, const PinholeIntrinsics& intr, double depth,
                          double tilt_deg) {
    const double tilt = tilt_deg * std::numbers::pi / 180.0;
    const Vec3 n{std::sin(tilt), 0.0, -std::cos(tilt)};
    const Vec3 p0{0.0, 0.0, depth};
    Image<double> out(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Vec3 d{(x + 0.5 - intr.cx) / intr.fx, (y + 0.5 - intr.cy) / intr.fy, 1.0};
            const double denom = n.dot(d);
            if (denom >= 0.0) continue;
            out.at(x, y) = n.dot(p0) / denom;  // d.z == 1, so the ray parameter is the depth
        }
    }
    return out;
}

Vec3 plane_normal(double tilt_deg) {
    const double tilt = tilt_deg * std::numbers::pi / 180.0;
    return {std::sin(tilt), 0.0, -std::cos(tilt)};
}

double angle_deg(const Vec3& a, const Vec3& b) {
    const double c = std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_CASE("forward intensity basics") {
    CHECK(forward_intensity(kUnit, 1.0, 1.0, 1.0) == doctest::Approx(0.25));
    CHECK(forward_intensity(kUnit, 0.0, 2.0, 0.7) == 0.0);

    // Inverse-square law: doubling the range quarters the return.
    const double l1 = forward_intensity(kRealistic, 0.6, 1.5, 0.9);
    const double l2 = forward_intensity(kRealistic, 0.6, 3.0, 0.9);
    CHECK(l2 == doctest::Approx(l1 / 4.0).epsilon(1e-12));
}

TEST_CASE("forward intensity monotonicity") {
    const double base = forward_intensity(kRealistic, 0.5, 2.0, 0.8);
    CHECK(forward_intensity(kRealistic, 0.6, 2.0, 0.8) > base);
    CHECK(forward_intensity(kRealistic, 0.5, 2.0, 0.9) > base);
    CHECK(forward_intensity(kRealistic, 0.5, 2.5, 0.8) < base);
}

TEST_CASE("forward intensity rejects domain violations") {
    CHECK_THROWS_AS(static_cast<void>(forward_intensity(kUnit, -0.1, 1.0, 1.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(forward_intensity(kUnit, 1.1, 1.0, 1.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(forward_intensity(kUnit, 0.5, 0.0, 1.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(forward_intensity(kUnit, 0.5, 1.0, 0.0)), Error);
    CHECK_THROWS_AS(static_cast<void>(forward_intensity(kUnit, 0.5, 1.0, 1.5)), Error);
}

TEST_CASE("invert is the exact inverse of forward") {
    CHECK(invert_reflectance(kUnit, {0, 0, 1.0, 0.25, 1.0}).rho == doctest::Approx(1.0));
    CHECK(invert_reflectance(kUnit, {0, 0, 1.0, 0.0, 1.0}).rho == 0.0);

    SimRng rng(17);
    for (int i = 0; i < 2000; ++i) {
        const double rho = rng.uniform();
        const double range = 0.5 + rng.uniform() * 9.5;
        const double cos_theta = 0.1 + rng.uniform() * 0.9;
        const double l = forward_intensity(kRealistic, rho, range, cos_theta);
        const InvertResult inv = invert_reflectance(kRealistic, {0, 0, range, l, cos_theta});
        CHECK_FALSE(inv.rejected);
        CHECK(std::abs(inv.rho - rho) < 1e-12);
    }
}

TEST_CASE("grazing samples are rejected, not fatal") {
    const InvertResult r = invert_reflectance(kRealistic, {0, 0, 2.0, 0.01, 0.05});
    CHECK(r.rejected);
    CHECK_FALSE(invert_reflectance(kRealistic, {0, 0, 2.0, 0.01, 0.11}).rejected);
}

TEST_CASE("inverted reflectance clamps with a flag") {
    // Intensity far above anything a unit reflector could return.
    const double too_bright = forward_intensity(kUnit, 1.0, 1.0, 1.0) * 10.0;
    const InvertResult r = invert_reflectance(kUnit, {0, 0, 1.0, too_bright, 1.0});
    CHECK(r.clamped);
    CHECK(r.rho == doctest::Approx(kDefaultClampMax));
}

TEST_CASE("normals of a fronto-parallel plane") {
    const PinholeIntrinsics intr{80.0, 80.0, 32.0, 32.0};
    Image<double> depth(64, 64, 2.0);
    const NormalMap nm = normals_from_depth(depth, intr);

    for (int y = 1; y < 63; ++y) {
        for (int x = 1; x < 63; ++x) {
            REQUIRE(nm.valid.at(x, y));
            const Vec3 n = nm.normals.at(x, y);
            CHECK(std::abs(n.norm() - 1.0) < 1e-6);
            CHECK(angle_deg(n, {0.0, 0.0, -1.0}) < 1e-6);
        }
    }
    // Border pixels lack the central-difference cross.
    CHECK_FALSE(nm.valid.at(0, 0));
    CHECK_FALSE(nm.valid.at(63, 31));
}

TEST_CASE("normals of a tilted plane stay within 0.5 degrees") {
    const PinholeIntrinsics intr{80.0, 80.0, 32.0, 32.0};
    const Image<double> depth = plane_depth(64, 64, intr, 2.0, 30.0);
    const NormalMap nm = normals_from_depth(depth, intr);
    const Vec3 truth = plane_normal(30.0);

    int checked = 0;
    for (int y = 1; y < 63; ++y) {
        for (int x = 1; x < 63; ++x) {
            if (!nm.valid.at(x, y)) continue;
            CHECK(angle_deg(nm.normals.at(x, y), truth) < 0.5);
            ++checked;
        }
    }
    CHECK(checked > 3000);
}

TEST_CASE("normals of a sphere match the analytic field away from the silhouette") {
    const PinholeIntrinsics intr{400.0, 400.0, 128.0, 128.0};
    const int w = 256, h = 256;
    const Vec3 center{0.0, 0.0, 3.0};
    const double radius = 1.0;

    Image<double> depth(w, h, 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const Vec3 d{(x + 0.5 - intr.cx) / intr.fx, (y + 0.5 - intr.cy) / intr.fy, 1.0};
            const double a = d.dot(d);
            const double b = -2.0 * d.dot(center);
            const double c = center.dot(center) - radius * radius;
            const double disc = b * b - 4.0 * a * c;
            if (disc <= 0.0) continue;
            const double s = (-b - std::sqrt(disc)) / (2.0 * a);
            if (s > 0.0) depth.at(x, y) = s;  // d.z == 1: ray parameter equals depth
        }
    }

    const NormalMap nm = normals_from_depth(depth, intr);
    int checked = 0;
    double worst = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!nm.valid.at(x, y)) continue;
            const Vec3 p = intr.back_project(x, y, depth.at(x, y));
            const Vec3 truth = (p - center) * (1.0 / radius);
            // Stay away from the silhouette where one-pixel steps get steep.
            if (std::abs(truth.z) < 0.45) continue;
            const double err = angle_deg(nm.normals.at(x, y), truth);
            worst = std::max(worst, err);
            ++checked;
        }
    }
    INFO("checked ", checked, " pixels, worst error ", worst, " deg");
    CHECK(checked > 2000);
    CHECK(worst < 1.0);
}

TEST_CASE("emitted normals are unit length") {
    const PinholeIntrinsics intr{100.0, 100.0, 24.0, 24.0};
    SimRng rng(4);
    // Smooth random depth: plane plus gentle sinusoidal relief.
    Image<double> depth(48, 48, 0.0);
    const double ax = 0.2 * rng.uniform(), ay = 0.2 * rng.uniform();
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x)
            depth.at(x, y) = 2.0 + 0.1 * std::sin(ax * x) * std::cos(ay * y);

    const NormalMap nm = normals_from_depth(depth, intr);
    const Image<double> cosines = incidence_cosines(nm, intr, depth);
    for (int y = 0; y < 48; ++y) {
        for (int x = 0; x < 48; ++x) {
            if (!nm.valid.at(x, y)) continue;
            CHECK(std::abs(nm.normals.at(x, y).norm() - 1.0) < 1e-6);
            CHECK(cosines.at(x, y) >= 0.0);
            CHECK(cosines.at(x, y) <= 1.0);
        }
    }
}

TEST_CASE("holes in the depth map invalidate the cross neighborhood") {
    const PinholeIntrinsics intr{80.0, 80.0, 16.0, 16.0};
    Image<double> depth(32, 32, 2.0);
    depth.at(10, 10) = 0.0;  // hole
    const NormalMap nm = normals_from_depth(depth, intr);
    CHECK_FALSE(nm.valid.at(10, 10));
    CHECK_FALSE(nm.valid.at(9, 10));
    CHECK_FALSE(nm.valid.at(11, 10));
    CHECK_FALSE(nm.valid.at(10, 9));
    CHECK_FALSE(nm.valid.at(10, 11));
    CHECK(nm.valid.at(12, 12));
}

TEST_CASE("incidence cosines on known geometry") {
    // Principal point on the center of pixel (32,32) so its ray is the axis.
    const PinholeIntrinsics intr{80.0, 80.0, 32.5, 32.5};

    Image<double> flat(64, 64, 2.0);
    const NormalMap nm_flat = normals_from_depth(flat, intr);
    const Image<double> cos_flat = incidence_cosines(nm_flat, intr, flat);
    CHECK(cos_flat.at(32, 32) == doctest::Approx(1.0).epsilon(1e-9));

    // 60-degree tilt seen along the axis: cos(theta) = 0.5.
    const Image<double> tilted = plane_depth(64, 64, intr, 2.0, 60.0);
    const NormalMap nm_tilt = normals_from_depth(tilted, intr);
    const Image<double> cos_tilt = incidence_cosines(nm_tilt, intr, tilted);
    CHECK(cos_tilt.at(32, 32) == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("sample set validation") {
    LidarSampleSet set;
    set.constants = kRealistic;
    set.frame_width = 8;
    set.frame_height = 8;
    set.samples = {{1, 1, 2.0, 0.1, 0.9}, {1, 1, 2.0, 0.1, 0.9}};
    CHECK_THROWS_WITH_AS(set.validate(), doctest::Contains("duplicate"), Error);

    set.samples = {{9, 1, 2.0, 0.1, 0.9}};
    CHECK_THROWS_AS(set.validate(), Error);
    set.samples = {{1, 1, -2.0, 0.1, 0.9}};
    CHECK_THROWS_AS(set.validate(), Error);
}

TEST_CASE("lidar csv round trip and registration table") {
    LidarSampleSet set;
    set.constants = kRealistic;
    set.frame_width = 16;
    set.frame_height = 16;
    set.samples = {{1, 2, 2.125, 0.0625, 0.875}, {3, 4, 1.5, 0.03125, 0.75}};

    const std::string csv = temp_path("lidar.csv");
    const std::string meta = temp_path("lidar.json");
    save_lidar_csv(csv, meta, set);
    const LidarSampleSet loaded = load_lidar_csv(csv, meta);
    REQUIRE(loaded.samples.size() == 2);
    CHECK(loaded.samples[0].u == 1);
    CHECK(loaded.samples[0].range_m == set.samples[0].range_m);
    CHECK(loaded.samples[1].intensity == set.samples[1].intensity);
    CHECK(loaded.constants.lidar_wavelength_nm == 905.0);

    const std::string table = temp_path("reg.csv");
    hsal::io::write_file_text(table, "index,u,v\n0,5,6\n");
    LidarSampleSet moved = loaded;
    apply_registration_table(moved, table);
    CHECK(moved.samples[0].u == 5);
    CHECK(moved.samples[0].v == 6);
    CHECK(moved.samples[1].u == 3);

    hsal::io::write_file_text(table, "index,u,v\n7,5,6\n");
    CHECK_THROWS_AS(apply_registration_table(moved, table), Error);
}

TEST_CASE("lidar csv rejects malformed input") {
    const std::string csv = temp_path("bad.csv");
    const std::string meta = temp_path("meta.json");
    LidarSampleSet set;
    set.constants = kRealistic;
    set.frame_width = 4;
    set.frame_height = 4;
    set.samples = {{0, 0, 1.0, 0.1, 1.0}};
    save_lidar_csv(csv, meta, set);

    hsal::io::write_file_text(csv, "u,v,range\n0,0,1\n");
    CHECK_THROWS_AS(static_cast<void>(load_lidar_csv(csv, meta)), Error);
    hsal::io::write_file_text(csv, "u,v,range_m,intensity,cos_theta\n0,0,1.0,abc,1.0\n");
    CHECK_THROWS_AS(static_cast<void>(load_lidar_csv(csv, meta)), Error);
}
