#include "hsal/spectral.hpp"

#include "hsal/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace hsal {

using nlohmann::json;

WavelengthGrid::WavelengthGrid(std::vector<double> bands_nm) : bands_(std::move(bands_nm)) {
    if (bands_.empty()) throw Error("wavelength grid: no bands");
    for (size_t i = 0; i < bands_.size(); ++i) {
        if (bands_[i] < kWavelengthMinNm || bands_[i] > kWavelengthMaxNm)
            throw Error("wavelength grid: band " + std::to_string(bands_[i]) +
                        " nm outside [350, 1100]");
        if (i > 0 && bands_[i] <= bands_[i - 1])
            throw Error("wavelength grid: wavelengths must be strictly increasing");
    }
}

std::optional<int> WavelengthGrid::nearest_band(double nm, double tol_nm) const {
    int best = -1;
    double best_d = tol_nm;
    for (int i = 0; i < band_count(); ++i) {
        const double d = std::abs(bands_[size_t(i)] - nm);
        if (d <= best_d) {
            best_d = d;
            best = i;
        }
    }
    if (best < 0) return std::nullopt;
    return best;
}

int lidar_band_index(const WavelengthGrid& grid, double lidar_wavelength_nm) {
    const auto idx = grid.nearest_band(lidar_wavelength_nm, kLidarBandToleranceNm);
    if (!idx)
        throw Error("grid has no band within " + std::to_string(kLidarBandToleranceNm) +
                    " nm of the LiDAR wavelength " + std::to_string(lidar_wavelength_nm) + " nm");
    return *idx;
}

SpectralCube::SpectralCube(WavelengthGrid grid, int width, int height)
    : grid_(std::move(grid)),
      width_(width),
      height_(height),
      radiance_(size_t(width) * height * grid_.band_count(), 0.0f) {
    if (width_ <= 0 || height_ <= 0) throw Error("cube: nonpositive dimensions");
}

SpectralCube::SpectralCube(WavelengthGrid grid, int width, int height, std::vector<float> radiance)
    : grid_(std::move(grid)), width_(width), height_(height), radiance_(std::move(radiance)) {
    validate();
}

void SpectralCube::validate() const {
    if (width_ <= 0 || height_ <= 0) throw Error("cube: nonpositive dimensions");
    if (radiance_.size() != size_t(width_) * height_ * grid_.band_count())
        throw Error("cube: payload size inconsistent with dimensions");
    for (float v : radiance_)
        if (!(v >= 0.0f)) throw Error("cube: radiance must be nonnegative and finite");
}

float SpectralCube::max_radiance() const {
    float m = 0.0f;
    for (float v : radiance_) m = std::max(m, v);
    return m;
}

IlluminantSpectrum::IlluminantSpectrum(WavelengthGrid grid, std::vector<double> e)
    : grid_(std::move(grid)), e_(std::move(e)) {
    if (int(e_.size()) != grid_.band_count())
        throw Error("illuminant: value count does not match grid");
    for (double v : e_)
        if (!(v > 0.0)) throw Error("illuminant: e(lambda) must be positive at every band");
}

void IlluminantSpectrum::set_regions(std::vector<IlluminantRegion> regions) {
    for (const auto& r : regions) {
        if (int(r.e.size()) != grid_.band_count())
            throw Error("illuminant region: value count does not match grid");
        for (double v : r.e)
            if (!(v > 0.0)) throw Error("illuminant region: e(lambda) must be positive");
        if (r.rect.empty()) throw Error("illuminant region: empty rect");
    }
    regions_ = std::move(regions);
}

const std::vector<double>& IlluminantSpectrum::e_at(int x, int y) const {
    if (regions_.empty()) return e_;
    for (const auto& r : regions_)
        if (r.rect.contains(x, y)) return r.e;
    throw Error("illuminant spatial field has no region covering pixel (" + std::to_string(x) +
                ", " + std::to_string(y) + ")");
}

// --- .hsc container ---------------------------------------------------------

namespace {
constexpr char kHscSeparator[2] = {'\n', '\0'};
}

void save_cube(const std::string& path, const SpectralCube& cube) {
    json header;
    header["width"] = cube.width();
    header["height"] = cube.height();
    header["bands"] = cube.grid().bands();
    header["dtype"] = "f32";
    header["layout"] = "bip";
    const std::string head = header.dump();

    std::vector<uint8_t> bytes;
    bytes.reserve(head.size() + 2 + cube.radiance().size() * sizeof(float));
    bytes.insert(bytes.end(), head.begin(), head.end());
    bytes.push_back(uint8_t(kHscSeparator[0]));
    bytes.push_back(uint8_t(kHscSeparator[1]));
    const auto* payload = reinterpret_cast<const uint8_t*>(cube.radiance().data());
    bytes.insert(bytes.end(), payload, payload + cube.radiance().size() * sizeof(float));
    io::write_file_bytes(path, bytes.data(), bytes.size());
}

SpectralCube load_cube(const std::string& path) {
    const auto bytes = io::read_file_bytes(path);

    size_t sep = std::string::npos;
    for (size_t i = 0; i + 1 < bytes.size(); ++i) {
        if (bytes[i] == uint8_t(kHscSeparator[0]) && bytes[i + 1] == uint8_t(kHscSeparator[1])) {
            sep = i;
            break;
        }
    }
    if (sep == std::string::npos) throw Error("load_cube: missing header separator in " + path);

    json header;
    try {
        header = json::parse(std::string(bytes.begin(), bytes.begin() + sep));
    } catch (const json::exception& e) {
        throw Error("load_cube: bad JSON header in " + path + ": " + e.what());
    }

    const int width = header.at("width").get<int>();
    const int height = header.at("height").get<int>();
    const auto bands = header.at("bands").get<std::vector<double>>();
    if (header.at("dtype").get<std::string>() != "f32")
        throw Error("load_cube: unsupported dtype in " + path);
    if (header.at("layout").get<std::string>() != "bip")
        throw Error("load_cube: unsupported layout in " + path);

    WavelengthGrid grid(bands);
    const size_t expect = size_t(width) * height * bands.size() * sizeof(float);
    const size_t have = bytes.size() - sep - 2;
    if (have != expect)
        throw Error("load_cube: header claims " + std::to_string(expect) +
                    " payload bytes, file has " + std::to_string(have) + ": " + path);

    std::vector<float> radiance(size_t(width) * height * bands.size());
    std::memcpy(radiance.data(), bytes.data() + sep + 2, expect);
    return SpectralCube(std::move(grid), width, height, std::move(radiance));
}

// --- illuminant JSON ---------------------------------------------------------

void save_illuminant(const std::string& path, const IlluminantSpectrum& illum) {
    json j;
    j["bands"] = illum.grid().bands();
    j["values"] = illum.e();
    if (illum.has_spatial_field()) {
        json regions = json::array();
        for (const auto& r : illum.regions()) {
            regions.push_back({{"rect", {r.rect.x, r.rect.y, r.rect.width, r.rect.height}},
                               {"values", r.e}});
        }
        j["regions"] = regions;
    }
    io::write_file_text(path, j.dump(2) + "\n");
}

IlluminantSpectrum load_illuminant(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file_text(path));
    } catch (const json::exception& e) {
        throw Error("load_illuminant: bad JSON in " + path + ": " + e.what());
    }
    WavelengthGrid grid(j.at("bands").get<std::vector<double>>());
    IlluminantSpectrum illum(std::move(grid), j.at("values").get<std::vector<double>>());
    if (j.contains("regions")) {
        std::vector<IlluminantRegion> regions;
        for (const auto& r : j.at("regions")) {
            const auto rect = r.at("rect").get<std::vector<int>>();
            if (rect.size() != 4) throw Error("load_illuminant: region rect must be [x,y,w,h]");
            regions.push_back({PixelRect{rect[0], rect[1], rect[2], rect[3]},
                               r.at("values").get<std::vector<double>>()});
        }
        illum.set_regions(std::move(regions));
    }
    return illum;
}

IlluminantSpectrum calibrate_illuminant(const SpectralCube& white_cube, const PixelRect& region,
                                        double whiteboard_reflectance) {
    if (region.empty()) throw Error("calibrate_illuminant: empty region");
    if (!region.inside(white_cube.width(), white_cube.height()))
        throw Error("calibrate_illuminant: region outside cube bounds");
    if (!(whiteboard_reflectance > 0.0))
        throw Error("calibrate_illuminant: whiteboard reflectance must be positive");

    const int bands = white_cube.band_count();
    std::vector<double> mean(size_t(bands), 0.0);
    for (int y = region.y; y < region.y + region.height; ++y)
        for (int x = region.x; x < region.x + region.width; ++x)
            for (int b = 0; b < bands; ++b) mean[size_t(b)] += white_cube.at(x, y, b);

    const double n = double(region.width) * region.height;
    for (int b = 0; b < bands; ++b) {
        mean[size_t(b)] = mean[size_t(b)] / n / whiteboard_reflectance;
        if (!(mean[size_t(b)] > 0.0))
            throw Error("calibrate_illuminant: nonpositive mean at band " +
                        std::to_string(white_cube.grid().band(b)) + " nm");
    }
    return IlluminantSpectrum(white_cube.grid(), std::move(mean));
}

SpectralSignature signature_at(const SpectralCube& cube, int x, int y) {
    if (!cube.in_bounds(x, y))
        throw Error("signature_at: pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                    ") out of bounds");
    const auto px = cube.pixel(x, y);
    return SpectralSignature{std::vector<float>(px.begin(), px.end())};
}

}  // namespace hsal
