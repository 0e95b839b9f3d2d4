#include "hsal/sim.hpp"

#include "hsal/color.hpp"
#include "hsal/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsal {

using nlohmann::json;

uint64_t SimRng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double SimRng::uniform() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

double SimRng::gaussian(double sigma) {
    if (sigma == 0.0) return 0.0;
    // Box-Muller; fresh pair each call keeps the stream position independent
    // of call history.
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneSpec::validate() const {
    if (width <= 0 || height <= 0) throw Error("scene spec: nonpositive frame size");
    if (board_rows < 1 || board_cols < 1) throw Error("scene spec: board needs at least 1x1 patches");
    if (grid.band_count() == 0) throw Error("scene spec: empty wavelength grid");
    const size_t want = size_t(board_rows) * board_cols + 1;
    if (materials.size() < want)
        throw Error("scene spec: need " + std::to_string(want) +
                    " materials (patches + background), have " + std::to_string(materials.size()));
    for (const auto& m : materials) {
        if (int(m.reflectance.size()) != grid.band_count())
            throw Error("scene spec: material '" + m.name + "' band count mismatch");
        for (double r : m.reflectance)
            if (!(r >= 0.0 && r <= 1.0))
                throw Error("scene spec: material '" + m.name + "' reflectance outside [0,1]");
    }
    if (int(illuminant.size()) != grid.band_count())
        throw Error("scene spec: illuminant band count mismatch");
    for (double e : illuminant)
        if (!(e > 0.0)) throw Error("scene spec: illuminant must be positive at every band");
    if (!(lidar.coverage > 0.0 && lidar.coverage <= 1.0))
        throw Error("scene spec: lidar coverage must be in (0,1]");
    lidar.constants.validate();
    if (!(noise.radiance_sigma >= 0.0 && noise.lidar_sigma >= 0.0))
        throw Error("scene spec: noise sigma must be nonnegative");
    if (occluder.enabled && !(occluder.attenuation > 0.0 && occluder.attenuation < 1.0))
        throw Error("scene spec: shadow attenuation must be in (0,1)");
    if (!(camera.fx > 0.0 && camera.fy > 0.0 && camera.board_depth_m > 0.0))
        throw Error("scene spec: bad camera parameters");
}

namespace {

struct BoardLayout {
    PixelRect board;
    std::vector<PixelRect> patch_cells;  // row-major, board_rows*board_cols
};

BoardLayout board_layout(const SceneSpec& spec) {
    BoardLayout out;
    const int m = spec.board_margin_px;
    out.board = {m, m, spec.width - 2 * m, spec.height - 2 * m};
    if (out.board.width < spec.board_cols || out.board.height < spec.board_rows)
        throw Error("scene spec: board margin leaves no room for patches");

    for (int r = 0; r < spec.board_rows; ++r) {
        const int y0 = out.board.y + r * out.board.height / spec.board_rows;
        const int y1 = out.board.y + (r + 1) * out.board.height / spec.board_rows;
        for (int c = 0; c < spec.board_cols; ++c) {
            const int x0 = out.board.x + c * out.board.width / spec.board_cols;
            const int x1 = out.board.x + (c + 1) * out.board.width / spec.board_cols;
            out.patch_cells.push_back({x0, y0, x1 - x0, y1 - y0});
        }
    }
    return out;
}

// T-shaped umbra over the board: a horizontal bar near the top and a stem
// down the middle, mirroring an occluder hung between the lamp and the board.
Image<uint8_t> make_shadow_mask(const SceneSpec& spec, const PixelRect& board) {
    Image<uint8_t> mask(spec.width, spec.height, 0);
    if (!spec.occluder.enabled) return mask;

    const auto frac_rect = [&](double fx, double fy, double fw, double fh) {
        return PixelRect{board.x + int(std::lround(fx * board.width)),
                         board.y + int(std::lround(fy * board.height)),
                         int(std::lround(fw * board.width)),
                         int(std::lround(fh * board.height))};
    };
    const PixelRect bar = frac_rect(0.10, 0.12, 0.80, 0.15);
    const PixelRect stem = frac_rect(0.43, 0.27, 0.14, 0.48);

    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            if (bar.contains(x, y) || stem.contains(x, y)) mask.at(x, y) = 1;
    return mask;
}

std::vector<std::pair<int, int>> scan_pixels(const SceneSpec& spec, SimRng& rng) {
    const size_t total = size_t(spec.width) * spec.height;
    std::vector<std::pair<int, int>> picks;

    switch (spec.lidar.pattern) {
        case ScanPattern::RegularGrid: {
            // Even spacing along the row-major scan; hits any coverage
            // fraction without pattern-size quantization.
            size_t prev = 0;
            for (size_t i = 0; i < total; ++i) {
                const size_t now = size_t(std::floor(double(i + 1) * spec.lidar.coverage));
                if (now > prev) picks.emplace_back(int(i % spec.width), int(i / spec.width));
                prev = now;
            }
            break;
        }
        case ScanPattern::Random: {
            std::vector<size_t> idx(total);
            for (size_t i = 0; i < total; ++i) idx[i] = i;
            // Fisher-Yates with the scene stream.
            for (size_t i = total - 1; i > 0; --i) {
                const size_t j = rng.next_u64() % (i + 1);
                std::swap(idx[i], idx[j]);
            }
            const size_t n = std::max<size_t>(1, size_t(std::floor(double(total) * spec.lidar.coverage)));
            for (size_t i = 0; i < n; ++i)
                picks.emplace_back(int(idx[i] % spec.width), int(idx[i] / spec.width));
            std::sort(picks.begin(), picks.end(), [](const auto& a, const auto& b) {
                return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
            break;
        }
        case ScanPattern::Scanline: {
            const int stride = std::max(1, int(std::lround(1.0 / spec.lidar.coverage)));
            for (int y = stride / 2; y < spec.height; y += stride)
                for (int x = 0; x < spec.width; ++x) picks.emplace_back(x, y);
            break;
        }
    }
    if (picks.empty()) picks.emplace_back(spec.width / 2, spec.height / 2);
    return picks;
}

}  // namespace

SceneBundle render_scene(const SceneSpec& spec, const Image<float>* shading_multiplier) {
    spec.validate();
    if (shading_multiplier &&
        (shading_multiplier->width != spec.width || shading_multiplier->height != spec.height))
        throw Error("render_scene: shading multiplier size mismatch");

    const BoardLayout layout = board_layout(spec);
    const int bands = spec.grid.band_count();
    const int bg_material = spec.board_rows * spec.board_cols;

    SceneBundle bundle;
    bundle.material_id = Image<uint8_t>(spec.width, spec.height, uint8_t(bg_material));
    for (int p = 0; p < bg_material; ++p) {
        const PixelRect& cell = layout.patch_cells[size_t(p)];
        for (int y = cell.y; y < cell.y + cell.height; ++y)
            for (int x = cell.x; x < cell.x + cell.width; ++x)
                bundle.material_id.at(x, y) = uint8_t(p);
    }
    bundle.shadow_mask = make_shadow_mask(spec, layout.board);

    // Board plane: through (0,0,depth), normal tilted about the vertical
    // axis, facing the camera at the origin.
    const double tilt = spec.camera.tilt_deg * std::numbers::pi / 180.0;
    const Vec3 plane_n = Vec3{std::sin(tilt), 0.0, -std::cos(tilt)};
    const Vec3 plane_p0{0.0, 0.0, spec.camera.board_depth_m};
    const PinholeIntrinsics intr{spec.camera.fx, spec.camera.fy, spec.camera.cx, spec.camera.cy};
    const Vec3 light = spec.light_dir.normalized();
    const double m_light = std::max(0.0, plane_n.dot(light));
    if (!(m_light > 0.0)) throw Error("render_scene: light direction leaves the board unlit");

    SimRng rng(spec.seed);

    // Scene radiance and shading field.
    bundle.cube = SpectralCube(spec.grid, spec.width, spec.height);
    bundle.shading = Image<float>(spec.width, spec.height, 0.0f);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double m = m_light;
            if (bundle.shadow_mask.at(x, y)) m *= spec.occluder.attenuation;
            if (shading_multiplier) m *= double(shading_multiplier->at(x, y));
            bundle.shading.at(x, y) = float(m);

            const auto& rho = spec.materials[bundle.material_id.at(x, y)].reflectance;
            for (int b = 0; b < bands; ++b) {
                double v = m * spec.illuminant[size_t(b)] * rho[size_t(b)];
                v += rng.gaussian(spec.noise.radiance_sigma);
                bundle.cube.set(x, y, b, float(std::max(0.0, v)));
            }
        }
    }

    // White reference: unit reflector filling the frame, unshaded.
    bundle.white_cube = SpectralCube(spec.grid, spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            for (int b = 0; b < bands; ++b) {
                double v = spec.illuminant[size_t(b)] + rng.gaussian(spec.noise.radiance_sigma);
                bundle.white_cube.set(x, y, b, float(std::max(0.0, v)));
            }

    // LiDAR pass over the shared geometry.
    const int lidar_band = lidar_band_index(spec.grid, spec.lidar.constants.lidar_wavelength_nm);
    bundle.lidar.constants = spec.lidar.constants;
    bundle.lidar.frame_width = spec.width;
    bundle.lidar.frame_height = spec.height;
    for (const auto& [u, v] : scan_pixels(spec, rng)) {
        const Vec3 dir = intr.ray_direction(u, v);
        const double denom = plane_n.dot(dir);
        if (denom >= 0.0) continue;  // ray parallel to or away from the board
        const double range = plane_n.dot(plane_p0) / denom;
        if (!(range > 0.0)) continue;
        const double cos_theta = std::min(1.0, std::abs(denom));

        const double rho_lidar =
            spec.materials[bundle.material_id.at(u, v)].reflectance[size_t(lidar_band)];
        double intensity = forward_intensity(spec.lidar.constants, rho_lidar, range, cos_theta);
        intensity = std::max(0.0, intensity + rng.gaussian(spec.noise.lidar_sigma));
        bundle.lidar.samples.push_back({u, v, range, intensity, cos_theta});
    }
    bundle.lidar.validate();

    // Ground truth albedo and the reference chart, both rendered with the
    // same spectral-to-color path the pipeline uses.
    const std::vector<double> render_illum = d65_on_grid(spec.grid);
    std::vector<RgbTriple> material_rgb(spec.materials.size());
    for (size_t i = 0; i < spec.materials.size(); ++i) {
        const auto xyz = spectrum_to_xyz(spec.materials[i].reflectance, spec.grid, render_illum);
        material_rgb[i] = xyz_to_srgb(xyz).linear;
    }

    bundle.truth_albedo = AlbedoMap(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x)
            bundle.truth_albedo.set(x, y, material_rgb[bundle.material_id.at(x, y)],
                                    PixelProvenance::Measured);

    for (int p = 0; p < bg_material; ++p) {
        const PixelRect& cell = layout.patch_cells[size_t(p)];
        // Core region, one pixel in from the cell edge.
        const PixelRect core{cell.x + 1, cell.y + 1, cell.width - 2, cell.height - 2};
        if (core.empty()) continue;
        bundle.chart.patches.push_back(
            {spec.materials[size_t(p)].name, core, material_rgb[size_t(p)]});
    }
    bundle.chart.validate(spec.width, spec.height);

    return bundle;
}

// --- default scene ------------------------------------------------------------

namespace {

struct GaussTerm {
    double amp, center_nm, width_nm;
};

}  // namespace

SceneSpec default_colorboard_spec() {
    SceneSpec spec;

    std::vector<double> bands;
    for (int nm = 400; nm <= 700; nm += 10) bands.push_back(double(nm));
    bands.push_back(905.0);
    spec.grid = WavelengthGrid(bands);

    // Smooth Gaussian-mixture reflectances spanning hue and lightness, plus
    // a broad near-infrared lobe so every material anchors the 905 nm band.
    struct Def {
        const char* name;
        double base;
        std::vector<GaussTerm> terms;
    };
    const std::vector<Def> defs = {
        {"dark_skin", 0.10, {{0.25, 600, 80}}},
        {"light_skin", 0.28, {{0.35, 610, 100}}},
        {"blue_sky", 0.10, {{0.32, 460, 50}}},
        {"foliage", 0.08, {{0.26, 540, 40}}},
        {"blue_flower", 0.14, {{0.30, 450, 60}, {0.16, 640, 60}}},
        {"bluish_green", 0.14, {{0.36, 500, 60}}},
        {"orange", 0.08, {{0.52, 620, 60}}},
        {"purplish_blue", 0.09, {{0.36, 445, 45}}},
        {"moderate_red", 0.10, {{0.46, 645, 70}}},
        {"purple", 0.07, {{0.22, 430, 40}, {0.20, 690, 50}}},
        {"yellow_green", 0.10, {{0.42, 560, 60}}},
        {"orange_yellow", 0.10, {{0.46, 590, 55}}},
        {"blue", 0.06, {{0.32, 440, 35}}},
        {"green", 0.07, {{0.36, 525, 45}}},
        {"red", 0.06, {{0.52, 665, 60}}},
        {"yellow", 0.12, {{0.50, 580, 70}}},
        {"magenta", 0.11, {{0.30, 430, 45}, {0.36, 665, 70}}},
        {"cyan", 0.10, {{0.32, 480, 55}}},
        {"white", 0.85, {}},
        {"neutral_8", 0.60, {}},
        {"neutral_6_5", 0.42, {}},
        {"neutral_5", 0.28, {}},
        {"neutral_3_5", 0.16, {}},
        {"black", 0.06, {}},
    };

    const auto build = [&](const Def& d) {
        MaterialSpectrum m;
        m.name = d.name;
        for (double nm : spec.grid.bands()) {
            double v = d.base;
            for (const auto& t : d.terms) {
                const double u = (nm - t.center_nm) / t.width_nm;
                v += t.amp * std::exp(-u * u);
            }
            // Near-infrared lobe keeps rho(905) well away from zero.
            const double unir = (nm - 905.0) / 150.0;
            v += 0.25 * std::exp(-unir * unir);
            m.reflectance.push_back(std::clamp(v, 0.02, 0.98));
        }
        return m;
    };
    for (const auto& d : defs) spec.materials.push_back(build(d));
    spec.materials.push_back(build({"board_frame", 0.20, {}}));

    // Daylight-like illuminant: 5500 K Planck curve, peak-normalized.
    std::vector<double> e;
    double peak = 0.0;
    for (double nm : spec.grid.bands()) {
        const double l = nm * 1e-9;
        const double c2 = 1.4388e-2;  // second radiation constant, m K
        const double v = 1.0 / (l * l * l * l * l) / (std::exp(c2 / (l * 5500.0)) - 1.0);
        e.push_back(v);
        peak = std::max(peak, v);
    }
    for (double& v : e) v /= peak;
    spec.illuminant = e;

    return spec;
}

// --- scene spec JSON -----------------------------------------------------------

namespace {

std::string pattern_to_string(ScanPattern p) {
    switch (p) {
        case ScanPattern::RegularGrid: return "regular_grid";
        case ScanPattern::Random: return "random";
        case ScanPattern::Scanline: return "scanline";
    }
    throw Error("scene spec: bad scan pattern");
}

ScanPattern pattern_from_string(const std::string& s) {
    if (s == "regular_grid") return ScanPattern::RegularGrid;
    if (s == "random") return ScanPattern::Random;
    if (s == "scanline") return ScanPattern::Scanline;
    throw Error("scene spec: unknown scan pattern '" + s + "'");
}

}  // namespace

void save_scene_spec(const std::string& path, const SceneSpec& spec) {
    spec.validate();
    json j;
    j["frame"] = {{"width", spec.width}, {"height", spec.height}};
    j["board"] = {{"rows", spec.board_rows},
                  {"cols", spec.board_cols},
                  {"margin_px", spec.board_margin_px}};
    j["bands"] = spec.grid.bands();
    json mats = json::array();
    for (const auto& m : spec.materials)
        mats.push_back({{"name", m.name}, {"reflectance", m.reflectance}});
    j["materials"] = mats;
    j["illuminant"] = spec.illuminant;
    j["light_dir"] = {spec.light_dir.x, spec.light_dir.y, spec.light_dir.z};
    j["occluder"] = {{"enabled", spec.occluder.enabled},
                     {"attenuation", spec.occluder.attenuation}};
    j["lidar"] = {{"coverage", spec.lidar.coverage},
                  {"pattern", pattern_to_string(spec.lidar.pattern)},
                  {"receiver_aperture_d_r", spec.lidar.constants.receiver_aperture_d_r},
                  {"eta_sys", spec.lidar.constants.eta_sys},
                  {"eta_atm", spec.lidar.constants.eta_atm},
                  {"lidar_wavelength_nm", spec.lidar.constants.lidar_wavelength_nm}};
    j["camera"] = {{"fx", spec.camera.fx},
                   {"fy", spec.camera.fy},
                   {"cx", spec.camera.cx},
                   {"cy", spec.camera.cy},
                   {"board_depth_m", spec.camera.board_depth_m},
                   {"tilt_deg", spec.camera.tilt_deg}};
    j["noise"] = {{"radiance_sigma", spec.noise.radiance_sigma},
                  {"lidar_sigma", spec.noise.lidar_sigma}};
    j["seed"] = spec.seed;
    io::write_file_text(path, j.dump(2) + "\n");
}

SceneSpec load_scene_spec(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file_text(path));
    } catch (const json::exception& e) {
        throw Error("scene spec: bad JSON in " + path + ": " + e.what());
    }

    SceneSpec spec;
    try {
        spec.width = j.at("frame").at("width").get<int>();
        spec.height = j.at("frame").at("height").get<int>();
        spec.board_rows = j.at("board").at("rows").get<int>();
        spec.board_cols = j.at("board").at("cols").get<int>();
        spec.board_margin_px = j.at("board").at("margin_px").get<int>();
        spec.grid = WavelengthGrid(j.at("bands").get<std::vector<double>>());
        for (const auto& m : j.at("materials"))
            spec.materials.push_back({m.at("name").get<std::string>(),
                                      m.at("reflectance").get<std::vector<double>>()});
        spec.illuminant = j.at("illuminant").get<std::vector<double>>();
        const auto l = j.at("light_dir").get<std::vector<double>>();
        if (l.size() != 3) throw Error("scene spec: light_dir must be [x,y,z]");
        spec.light_dir = {l[0], l[1], l[2]};
        spec.occluder.enabled = j.at("occluder").at("enabled").get<bool>();
        spec.occluder.attenuation = j.at("occluder").at("attenuation").get<double>();
        const auto& lj = j.at("lidar");
        spec.lidar.coverage = lj.at("coverage").get<double>();
        spec.lidar.pattern = pattern_from_string(lj.at("pattern").get<std::string>());
        spec.lidar.constants.receiver_aperture_d_r = lj.at("receiver_aperture_d_r").get<double>();
        spec.lidar.constants.eta_sys = lj.at("eta_sys").get<double>();
        spec.lidar.constants.eta_atm = lj.at("eta_atm").get<double>();
        spec.lidar.constants.lidar_wavelength_nm = lj.at("lidar_wavelength_nm").get<double>();
        const auto& cj = j.at("camera");
        spec.camera = {cj.at("fx").get<double>(),      cj.at("fy").get<double>(),
                       cj.at("cx").get<double>(),      cj.at("cy").get<double>(),
                       cj.at("board_depth_m").get<double>(), cj.at("tilt_deg").get<double>()};
        spec.noise.radiance_sigma = j.at("noise").at("radiance_sigma").get<double>();
        spec.noise.lidar_sigma = j.at("noise").at("lidar_sigma").get<double>();
        spec.seed = j.at("seed").get<uint64_t>();
    } catch (const json::exception& e) {
        throw Error("scene spec: missing or mistyped field in " + path + ": " + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace hsal
