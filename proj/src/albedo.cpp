#include "hsal/albedo.hpp"

#include "hsal/io.hpp"

#include <algorithm>
#include <cmath>

namespace hsal {

AlbedoMap::AlbedoMap(int width, int height)
    : width_(width),
      height_(height),
      linear_(size_t(width) * height * 3, 0.0),
      provenance_(size_t(width) * height, PixelProvenance::Invalid) {
    if (width <= 0 || height <= 0) throw Error("albedo map: nonpositive dimensions");
}

std::array<uint8_t, 3> AlbedoMap::srgb8(int x, int y) const {
    const RgbTriple c = linear(x, y);
    return {srgb_encode_8bit(c.r), srgb_encode_8bit(c.g), srgb_encode_8bit(c.b)};
}

void AlbedoMap::set(int x, int y, const RgbTriple& lin, PixelProvenance prov) {
    const size_t i = idx(x, y) * 3;
    linear_[i] = std::clamp(lin.r, 0.0, 1.0);
    linear_[i + 1] = std::clamp(lin.g, 0.0, 1.0);
    linear_[i + 2] = std::clamp(lin.b, 0.0, 1.0);
    provenance_[idx(x, y)] = prov;
}

size_t AlbedoMap::valid_count() const {
    size_t n = 0;
    for (auto p : provenance_)
        if (p != PixelProvenance::Invalid) ++n;
    return n;
}

void save_albedo_npy(const std::string& path, const AlbedoMap& map) {
    const int w = map.width(), h = map.height();
    std::vector<float> buf(size_t(w) * h * 4);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = (size_t(y) * w + x) * 4;
            const RgbTriple c = map.linear(x, y);
            buf[i] = float(c.r);
            buf[i + 1] = float(c.g);
            buf[i + 2] = float(c.b);
            buf[i + 3] = float(uint8_t(map.provenance(x, y)));
        }
    }
    io::save_npy(path, {size_t(h), size_t(w), 4}, buf.data(), buf.size());
}

AlbedoMap load_albedo_npy(const std::string& path) {
    const io::NpyArray arr = io::load_npy(path);
    if (arr.shape.size() != 3 || arr.shape[2] != 4)
        throw Error("albedo npy must have shape (H, W, 4): " + path);
    const int h = int(arr.shape[0]), w = int(arr.shape[1]);
    AlbedoMap map(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const size_t i = (size_t(y) * w + x) * 4;
            const float flag = arr.data[i + 3];
            PixelProvenance prov;
            if (flag == 0.0f)
                prov = PixelProvenance::Invalid;
            else if (flag == 1.0f)
                prov = PixelProvenance::Measured;
            else if (flag == 2.0f)
                prov = PixelProvenance::Densified;
            else
                throw Error("albedo npy: bad provenance flag at (" + std::to_string(x) + "," +
                            std::to_string(y) + "): " + path);
            map.set(x, y, {arr.data[i], arr.data[i + 1], arr.data[i + 2]}, prov);
        }
    }
    return map;
}

void save_albedo_png(const std::string& path, const AlbedoMap& map) {
    const int w = map.width(), h = map.height();
    std::vector<uint8_t> rgba(size_t(w) * h * 4, 0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!map.valid(x, y)) continue;  // transparent
            const auto c8 = map.srgb8(x, y);
            const size_t i = (size_t(y) * w + x) * 4;
            rgba[i] = c8[0];
            rgba[i + 1] = c8[1];
            rgba[i + 2] = c8[2];
            rgba[i + 3] = 255;
        }
    }
    io::save_png_rgba(path, w, h, rgba);
}

ReflectanceSpectrumMap::ReflectanceSpectrumMap(WavelengthGrid grid, int width, int height)
    : grid_(std::move(grid)),
      width_(width),
      height_(height),
      rho_(size_t(width) * height * grid_.band_count(), 0.0),
      valid_(size_t(width) * height, 0) {
    if (width <= 0 || height <= 0) throw Error("reflectance map: nonpositive dimensions");
}

void ReflectanceSpectrumMap::set_spectrum(int x, int y, std::span<const double> rho) {
    if (int(rho.size()) != grid_.band_count())
        throw Error("reflectance map: band count mismatch");
    std::copy(rho.begin(), rho.end(),
              rho_.begin() + long((size_t(y) * width_ + x) * grid_.band_count()));
    valid_[size_t(y) * width_ + x] = 1;
}

size_t ReflectanceSpectrumMap::valid_count() const {
    size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
}

std::vector<double> recover_spectrum(const SpectralCube& cube, const IlluminantSpectrum& illum,
                                     int u, int v, double rho_lidar, int lidar_band,
                                     double epsilon_i) {
    if (!(cube.grid() == illum.grid()))
        throw Error("recover_spectrum: cube and illuminant grids differ");
    const auto& e = illum.e_at(u, v);

    const auto I = cube.pixel(u, v);
    const double i_lidar = I[size_t(lidar_band)];
    if (!(i_lidar > epsilon_i)) return {};

    const double e_lidar = e[size_t(lidar_band)];
    const int bands = cube.band_count();
    std::vector<double> rho(static_cast<size_t>(bands));
    for (int b = 0; b < bands; ++b) {
        rho[size_t(b)] = e_lidar / e[size_t(b)] * (double(I[size_t(b)]) / i_lidar) * rho_lidar;
    }
    return rho;
}

SparseAlbedoResult compute_sparse_albedo(const SpectralCube& cube,
                                         const IlluminantSpectrum& illum,
                                         const LidarSampleSet& lidar,
                                         const RecoverOptions& opt) {
    if (!(cube.grid() == illum.grid()))
        throw Error("compute_sparse_albedo: cube and illuminant grids differ");
    if (lidar.frame_width != cube.width() || lidar.frame_height != cube.height())
        throw Error("compute_sparse_albedo: LiDAR frame does not match cube dimensions");
    if (lidar.samples.empty()) throw Error("compute_sparse_albedo: zero valid samples");
    lidar.validate();

    const int lidar_band = lidar_band_index(cube.grid(), lidar.constants.lidar_wavelength_nm);
    const double epsilon_i = opt.epsilon_i_scale * double(cube.max_radiance());
    const std::vector<double> render_illum = d65_on_grid(cube.grid());

    SparseAlbedoResult out{AlbedoMap(cube.width(), cube.height()),
                           ReflectanceSpectrumMap(cube.grid(), cube.width(), cube.height()),
                           {}};
    out.summary.samples_total = lidar.samples.size();

    const InvertOptions inv_opt{opt.cos_min, opt.clamp_max};
    for (const auto& s : lidar.samples) {
        const InvertResult inv = invert_reflectance(lidar.constants, s, inv_opt);
        if (inv.rejected) {
            ++out.summary.rejected_grazing;
            continue;
        }
        if (inv.clamped) ++out.summary.clamped_reflectance;

        const std::vector<double> rho =
            recover_spectrum(cube, illum, s.u, s.v, inv.rho, lidar_band, epsilon_i);
        if (rho.empty()) {
            ++out.summary.rejected_low_signal;
            continue;
        }

        const XyzTriple xyz = spectrum_to_xyz(rho, cube.grid(), render_illum);
        const SrgbResult srgb = xyz_to_srgb(xyz);
        if (srgb.clipped) ++out.summary.gamut_clipped;

        out.albedo.set(s.u, s.v, srgb.linear, PixelProvenance::Measured);
        out.spectra.set_spectrum(s.u, s.v, rho);
        ++out.summary.accepted;
    }

    if (out.summary.accepted == 0) throw Error("compute_sparse_albedo: zero valid samples");
    return out;
}

AlbedoMap rgb_baseline_from_cube(const SpectralCube& cube, const IlluminantSpectrum& illum) {
    if (!(cube.grid() == illum.grid()))
        throw Error("rgb_baseline_from_cube: cube and illuminant grids differ");
    const std::vector<double> render_illum = d65_on_grid(cube.grid());
    const int bands = cube.band_count();

    AlbedoMap map(cube.width(), cube.height());
    std::vector<double> balanced(static_cast<size_t>(bands));
    for (int y = 0; y < cube.height(); ++y) {
        for (int x = 0; x < cube.width(); ++x) {
            const auto I = cube.pixel(x, y);
            const auto& e = illum.e_at(x, y);
            for (int b = 0; b < bands; ++b) balanced[size_t(b)] = double(I[size_t(b)]) / e[size_t(b)];
            const SrgbResult srgb = xyz_to_srgb(spectrum_to_xyz(balanced, cube.grid(), render_illum));
            map.set(x, y, srgb.linear, PixelProvenance::Measured);
        }
    }
    return map;
}

}  // namespace hsal
