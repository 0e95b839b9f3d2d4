// Command-line front end: simulate / recover / densify / report.

#include "hsal/albedo.hpp"
#include "hsal/densify.hpp"
#include "hsal/io.hpp"
#include "hsal/lidar.hpp"
#include "hsal/metrics.hpp"
#include "hsal/sim.hpp"
#include "hsal/simd.hpp"
#include "hsal/spectral.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string cube_path;
    std::string white_path;
    std::string illuminant_path;
    std::string lidar_csv_path;
    std::string lidar_meta_path;
    std::string registration_path;
    std::string annotations_path;
    std::string chart_path;
    std::string albedo_path;
    std::string sparse_path;
    std::string baseline_path;
    std::string spec_path;
    std::string out_dir;

    std::vector<int> white_region;  // x y w h; empty = full frame
    double whiteboard_reflectance = 1.0;
    double lidar_wavelength = 0.0;  // 0 = take from the sidecar
    double alpha = 1.0;
    int k_neighbors = 3;
    double delta = hsal::kDefaultWhdrDelta;
    double cos_min = hsal::kDefaultCosMin;
    double clamp_max = hsal::kDefaultClampMax;
    std::string kernels = "auto";
    uint64_t seed = 1;
    bool full_outputs = false;
    bool emit_rho = false;
    bool emit_rgb_baseline = false;
};

// --config JSON overrides any flag value present in the file.
void apply_config_file(RunConfig& cfg, const std::string& path) {
    json j;
    try {
        j = json::parse(hsal::io::read_file_text(path));
    } catch (const json::exception& e) {
        throw hsal::Error("config: bad JSON in " + path + ": " + e.what());
    }
    auto str = [&](const char* key, std::string& out) {
        if (j.contains(key)) out = j.at(key).get<std::string>();
    };
    str("cube", cfg.cube_path);
    str("white", cfg.white_path);
    str("illuminant", cfg.illuminant_path);
    str("lidar", cfg.lidar_csv_path);
    str("lidar_meta", cfg.lidar_meta_path);
    str("registration", cfg.registration_path);
    str("annotations", cfg.annotations_path);
    str("chart", cfg.chart_path);
    str("albedo", cfg.albedo_path);
    str("sparse", cfg.sparse_path);
    str("baseline", cfg.baseline_path);
    str("spec", cfg.spec_path);
    str("out", cfg.out_dir);
    str("kernels", cfg.kernels);
    if (j.contains("white_region")) cfg.white_region = j.at("white_region").get<std::vector<int>>();
    if (j.contains("whiteboard_reflectance"))
        cfg.whiteboard_reflectance = j.at("whiteboard_reflectance").get<double>();
    if (j.contains("lidar_wavelength")) cfg.lidar_wavelength = j.at("lidar_wavelength").get<double>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("k_neighbors")) cfg.k_neighbors = j.at("k_neighbors").get<int>();
    if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
    if (j.contains("cos_min")) cfg.cos_min = j.at("cos_min").get<double>();
    if (j.contains("clamp_max")) cfg.clamp_max = j.at("clamp_max").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<uint64_t>();
}

hsal::simd::IsaChoice kernel_choice(const std::string& name) {
    if (name == "scalar") return hsal::simd::IsaChoice::Scalar;
    if (name == "auto") return hsal::simd::IsaChoice::Auto;
    throw hsal::Error("unknown kernels choice '" + name + "' (use auto or scalar)");
}

void ensure_out_dir(const std::string& dir) {
    if (dir.empty()) throw hsal::Error("--out directory is required");
    fs::create_directories(dir);
}

void write_manifest(const std::string& out_dir, const json& extra,
                    const std::vector<std::pair<std::string, std::string>>& files) {
    json manifest = extra;
    json jfiles = json::object();
    json hashes = json::object();
    for (const auto& [key, name] : files) {
        jfiles[key] = name;
        hashes[key] = hsal::io::hash_file_hex((fs::path(out_dir) / name).string());
    }
    manifest["files"] = jfiles;
    manifest["hashes"] = hashes;
    hsal::io::write_file_text((fs::path(out_dir) / "manifest.json").string(),
                              manifest.dump(2) + "\n");
}

// --- simulate -------------------------------------------------------------

int cmd_simulate(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);

    hsal::SceneSpec spec =
        cfg.spec_path.empty() ? hsal::default_colorboard_spec() : hsal::load_scene_spec(cfg.spec_path);
    if (cfg.spec_path.empty()) spec.seed = cfg.seed;

    const hsal::SceneBundle bundle = hsal::render_scene(spec);
    const fs::path out(cfg.out_dir);

    hsal::save_cube((out / "cube.hsc").string(), bundle.cube);
    hsal::save_cube((out / "white.hsc").string(), bundle.white_cube);
    hsal::save_lidar_csv((out / "lidar.csv").string(), (out / "lidar.json").string(), bundle.lidar);
    hsal::save_albedo_npy((out / "truth_albedo.npy").string(), bundle.truth_albedo);
    hsal::save_chart((out / "chart.json").string(), bundle.chart);

    std::vector<std::pair<std::string, std::string>> files = {
        {"cube", "cube.hsc"},     {"white", "white.hsc"},
        {"lidar", "lidar.csv"},   {"lidar_meta", "lidar.json"},
        {"truth_albedo", "truth_albedo.npy"}, {"chart", "chart.json"},
    };

    if (cfg.full_outputs) {
        hsal::io::save_npy((out / "shading.npy").string(),
                           {size_t(bundle.shading.height), size_t(bundle.shading.width)},
                           bundle.shading.data.data(), bundle.shading.data.size());
        hsal::save_albedo_png((out / "truth_albedo.png").string(), bundle.truth_albedo);
        files.emplace_back("shading", "shading.npy");
        files.emplace_back("truth_albedo_png", "truth_albedo.png");
    }

    json extra;
    extra["seed"] = spec.seed;
    extra["frame"] = {{"width", spec.width}, {"height", spec.height}};
    extra["bands"] = spec.grid.band_count();
    extra["lidar_samples"] = bundle.lidar.samples.size();
    write_manifest(cfg.out_dir, extra, files);

    std::cout << "simulate: wrote " << files.size() << " files + manifest to " << cfg.out_dir
              << "\n";
    return 0;
}

// --- recover --------------------------------------------------------------

int cmd_recover(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    if (cfg.cube_path.empty()) throw hsal::Error("recover: --cube is required");
    if (cfg.lidar_csv_path.empty()) throw hsal::Error("recover: --lidar is required");

    const hsal::SpectralCube cube = hsal::load_cube(cfg.cube_path);

    const std::string meta = cfg.lidar_meta_path.empty()
                                 ? (fs::path(cfg.lidar_csv_path).replace_extension(".json").string())
                                 : cfg.lidar_meta_path;
    hsal::LidarSampleSet lidar = hsal::load_lidar_csv(cfg.lidar_csv_path, meta);
    if (!cfg.registration_path.empty()) hsal::apply_registration_table(lidar, cfg.registration_path);
    if (cfg.lidar_wavelength > 0.0) lidar.constants.lidar_wavelength_nm = cfg.lidar_wavelength;

    hsal::IlluminantSpectrum illum;
    std::string illum_source;
    if (!cfg.illuminant_path.empty()) {
        illum = hsal::load_illuminant(cfg.illuminant_path);
        illum_source = "file:" + fs::path(cfg.illuminant_path).filename().string();
    } else if (!cfg.white_path.empty()) {
        const hsal::SpectralCube white = hsal::load_cube(cfg.white_path);
        hsal::PixelRect region{0, 0, white.width(), white.height()};
        if (!cfg.white_region.empty()) {
            if (cfg.white_region.size() != 4)
                throw hsal::Error("recover: --white-region needs x y w h");
            region = {cfg.white_region[0], cfg.white_region[1], cfg.white_region[2],
                      cfg.white_region[3]};
        }
        illum = hsal::calibrate_illuminant(white, region, cfg.whiteboard_reflectance);
        illum_source = "calibrated:" + fs::path(cfg.white_path).filename().string();
    } else {
        throw hsal::Error("recover: provide --white or --illuminant");
    }

    hsal::RecoverOptions opt;
    opt.cos_min = cfg.cos_min;
    opt.clamp_max = cfg.clamp_max;
    const hsal::SparseAlbedoResult result = hsal::compute_sparse_albedo(cube, illum, lidar, opt);

    const fs::path out(cfg.out_dir);
    hsal::save_albedo_npy((out / "albedo.npy").string(), result.albedo);
    hsal::save_albedo_png((out / "albedo.png").string(), result.albedo);

    std::vector<std::pair<std::string, std::string>> files = {{"albedo", "albedo.npy"},
                                                              {"albedo_png", "albedo.png"}};
    if (cfg.emit_rho) {
        // Reflectance spectra as a cube; invalid pixels are all-zero rows.
        hsal::SpectralCube rho_cube(cube.grid(), cube.width(), cube.height());
        for (int y = 0; y < cube.height(); ++y)
            for (int x = 0; x < cube.width(); ++x) {
                if (!result.spectra.valid(x, y)) continue;
                const auto s = result.spectra.spectrum(x, y);
                for (int b = 0; b < cube.band_count(); ++b)
                    rho_cube.set(x, y, b, float(std::max(0.0, s[size_t(b)])));
            }
        hsal::save_cube((out / "rho.hsc").string(), rho_cube);
        files.emplace_back("rho", "rho.hsc");
    }
    if (cfg.emit_rgb_baseline) {
        const hsal::AlbedoMap baseline = hsal::rgb_baseline_from_cube(cube, illum);
        hsal::save_albedo_npy((out / "rgb_baseline.npy").string(), baseline);
        hsal::save_albedo_png((out / "rgb_baseline.png").string(), baseline);
        files.emplace_back("rgb_baseline", "rgb_baseline.npy");
        files.emplace_back("rgb_baseline_png", "rgb_baseline.png");
    }

    json summary;
    summary["illuminant"] = illum_source;
    summary["counts"] = {{"samples_total", result.summary.samples_total},
                         {"accepted", result.summary.accepted},
                         {"rejected_grazing", result.summary.rejected_grazing},
                         {"rejected_low_signal", result.summary.rejected_low_signal},
                         {"clamped_reflectance", result.summary.clamped_reflectance},
                         {"gamut_clipped", result.summary.gamut_clipped}};
    json warnings = json::array();
    if (result.summary.clamped_reflectance > 0)
        warnings.push_back("some inverted reflectances hit the clamp; check sensor constants");
    summary["warnings"] = warnings;
    hsal::io::write_file_text((out / "summary.json").string(), summary.dump(2) + "\n");
    files.emplace_back("summary", "summary.json");

    write_manifest(cfg.out_dir, json{{"seed", cfg.seed}}, files);
    std::cout << "recover: " << result.summary.accepted << "/" << result.summary.samples_total
              << " samples accepted\n";
    return 0;
}

// --- densify ----------------------------------------------------------------

int cmd_densify(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    if (cfg.cube_path.empty()) throw hsal::Error("densify: --cube is required");
    if (cfg.sparse_path.empty()) throw hsal::Error("densify: --sparse is required");

    const hsal::SpectralCube cube = hsal::load_cube(cfg.cube_path);
    const hsal::AlbedoMap sparse = hsal::load_albedo_npy(cfg.sparse_path);

    hsal::DensifierConfig dcfg;
    dcfg.alpha = cfg.alpha;
    dcfg.k_neighbors = cfg.k_neighbors;
    dcfg.kernels = kernel_choice(cfg.kernels);

    hsal::DensifyStats stats;
    const hsal::AlbedoMap dense = hsal::densify(cube, sparse, dcfg, &stats);

    const fs::path out(cfg.out_dir);
    hsal::save_albedo_npy((out / "dense.npy").string(), dense);
    hsal::save_albedo_png((out / "dense.png").string(), dense);

    json summary;
    summary["alpha"] = dcfg.alpha;
    summary["k_requested"] = dcfg.k_neighbors;
    summary["k_effective"] = stats.effective_k;
    summary["filled"] = stats.filled;
    summary["degenerate_signatures"] = stats.degenerate_signatures;
    summary["kernels"] = dcfg.kernels == hsal::simd::IsaChoice::Scalar
                             ? "scalar"
                             : hsal::simd::active_kernel_name();
    json warnings = json::array();
    if (stats.k_reduced)
        warnings.push_back("dictionary smaller than k_neighbors; reduced k to " +
                           std::to_string(stats.effective_k));
    summary["warnings"] = warnings;
    hsal::io::write_file_text((out / "summary.json").string(), summary.dump(2) + "\n");

    write_manifest(cfg.out_dir, json{{"seed", cfg.seed}},
                   {{"dense", "dense.npy"}, {"dense_png", "dense.png"}, {"summary", "summary.json"}});
    std::cout << "densify: filled " << stats.filled << " pixels (k=" << stats.effective_k << ")\n";
    return 0;
}

// --- report -----------------------------------------------------------------

json chart_report_to_json(const hsal::ChartReport& report) {
    json patches = json::array();
    for (const auto& p : report.patches) {
        patches.push_back({{"name", p.name},
                           {"valid_pixels", p.valid_pixels},
                           {"mean_linear_rgb", {p.mean_linear.r, p.mean_linear.g, p.mean_linear.b}},
                           {"truth_linear_rgb", {p.truth_linear.r, p.truth_linear.g, p.truth_linear.b}},
                           {"cie76", p.cie76},
                           {"ciede2000", p.ciede2000},
                           {"mse", p.mse}});
    }
    return json{{"patches", patches},
                {"skipped_patches", report.skipped_patches},
                {"aggregate",
                 {{"cie76", report.mean_cie76},
                  {"ciede2000", report.mean_ciede2000},
                  {"mse", report.mse},
                  {"luminance_correlation", report.luminance_correlation}}}};
}

int cmd_report(const RunConfig& cfg) {
    ensure_out_dir(cfg.out_dir);
    if (cfg.albedo_path.empty()) throw hsal::Error("report: --albedo is required");
    if (cfg.chart_path.empty()) throw hsal::Error("report: --chart is required");

    const hsal::AlbedoMap albedo = hsal::load_albedo_npy(cfg.albedo_path);
    const hsal::ReferenceChart chart = hsal::load_chart(cfg.chart_path);

    const hsal::ChartReport report = hsal::chart_report(albedo, chart);
    const hsal::RatioScatter scatter = hsal::ratio_scatter_report(albedo, chart);

    json j;
    j["chart"] = chart_report_to_json(report);
    j["ratio_scatter"] = {{"points", scatter.points.size()},
                          {"skipped_pairs", scatter.skipped_pairs},
                          {"rms_deviation", scatter.rms_deviation}};

    if (!cfg.annotations_path.empty()) {
        const auto annotations = hsal::load_annotations(cfg.annotations_path);
        j["whdr"] = {{"value", hsal::whdr(albedo, annotations, cfg.delta)},
                     {"delta", cfg.delta},
                     {"annotations", annotations.size()}};
    }

    if (!cfg.baseline_path.empty()) {
        const hsal::AlbedoMap baseline = hsal::load_albedo_npy(cfg.baseline_path);
        const hsal::ChartReport base_report = hsal::chart_report(baseline, chart);
        j["baseline"] = chart_report_to_json(base_report);
        j["beats_baseline"] = {
            {"cie76", report.mean_cie76 < base_report.mean_cie76},
            {"ciede2000", report.mean_ciede2000 < base_report.mean_ciede2000},
            {"mse", report.mse < base_report.mse},
            {"luminance_correlation",
             report.luminance_correlation > base_report.luminance_correlation}};
    }

    const fs::path out(cfg.out_dir);
    hsal::io::write_file_text((out / "report.json").string(), j.dump(2) + "\n");

    // Per-patch CSV.
    std::string csv = "patch,valid_pixels,cie76,ciede2000,mse,luminance_pred,luminance_truth\n";
    char line[256];
    for (const auto& p : report.patches) {
        std::snprintf(line, sizeof(line), "%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g\n", p.name.c_str(),
                      p.valid_pixels, p.cie76, p.ciede2000, p.mse, p.luminance_pred,
                      p.luminance_truth);
        csv += line;
    }
    hsal::io::write_file_text((out / "report.csv").string(), csv);

    hsal::save_ratio_scatter_csv((out / "ratio_scatter.csv").string(), scatter);
    hsal::save_ratio_scatter_png((out / "ratio_scatter.png").string(), scatter);

    write_manifest(cfg.out_dir, json{{"seed", cfg.seed}},
                   {{"report", "report.json"},
                    {"report_csv", "report.csv"},
                    {"ratio_scatter_csv", "ratio_scatter.csv"},
                    {"ratio_scatter_png", "ratio_scatter.png"}});

    std::cout << "report: ciede2000=" << report.mean_ciede2000
              << " cie76=" << report.mean_cie76 << " corr=" << report.luminance_correlation
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Physics-based albedo recovery from hyperspectral imagery and LiDAR intensity"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config; overrides flags");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "seed recorded in the manifest");
    };

    CLI::App* sim = app.add_subcommand("simulate", "render a synthetic scene bundle");
    add_common(sim);
    sim->add_option("--spec", cfg.spec_path, "scene spec JSON (default: built-in color board)");
    sim->add_flag("--full", cfg.full_outputs, "also write shading.npy and truth_albedo.png");

    CLI::App* rec = app.add_subcommand("recover", "sparse albedo from cube + white + LiDAR");
    add_common(rec);
    rec->add_option("--cube", cfg.cube_path, "scene cube (.hsc)");
    rec->add_option("--white", cfg.white_path, "white-reference cube (.hsc)");
    rec->add_option("--white-region", cfg.white_region, "calibration rect x y w h")
        ->expected(4);
    rec->add_option("--whiteboard-reflectance", cfg.whiteboard_reflectance,
                    "reflectance of the white target");
    rec->add_option("--illuminant", cfg.illuminant_path, "pre-calibrated illuminant JSON");
    rec->add_option("--lidar", cfg.lidar_csv_path, "LiDAR samples CSV");
    rec->add_option("--lidar-meta", cfg.lidar_meta_path,
                    "sensor constants sidecar (default: csv path with .json)");
    rec->add_option("--registration", cfg.registration_path, "index,u,v registration table CSV");
    rec->add_option("--lidar-wavelength", cfg.lidar_wavelength,
                    "override the sidecar LiDAR wavelength (nm)");
    rec->add_option("--cos-min", cfg.cos_min, "grazing-angle rejection threshold");
    rec->add_option("--clamp-max", cfg.clamp_max, "inverted reflectance clamp");
    rec->add_flag("--emit-rho", cfg.emit_rho, "also write the reflectance spectra as rho.hsc");
    rec->add_flag("--emit-rgb-baseline", cfg.emit_rgb_baseline,
                  "also write the white-balanced RGB rendering of the cube");

    CLI::App* den = app.add_subcommand("densify", "fill uncovered pixels by spectral similarity");
    add_common(den);
    den->add_option("--cube", cfg.cube_path, "scene cube (.hsc)");
    den->add_option("--sparse", cfg.sparse_path, "sparse albedo NPY");
    den->add_option("--alpha", cfg.alpha, "cosine term weight");
    den->add_option("--k", cfg.k_neighbors, "neighbors to average");
    den->add_option("--kernels", cfg.kernels, "auto|scalar scan kernels");

    CLI::App* rep = app.add_subcommand("report", "chart metrics, WHDR, ratio scatter");
    add_common(rep);
    rep->add_option("--albedo", cfg.albedo_path, "albedo NPY to evaluate");
    rep->add_option("--chart", cfg.chart_path, "reference chart JSON");
    rep->add_option("--annotations", cfg.annotations_path, "pair annotations JSON");
    rep->add_option("--delta", cfg.delta, "WHDR equality band");
    rep->add_option("--baseline", cfg.baseline_path, "baseline albedo NPY to compare against");

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) apply_config_file(cfg, config_path);
        if (sim->parsed()) return cmd_simulate(cfg);
        if (rec->parsed()) return cmd_recover(cfg);
        if (den->parsed()) return cmd_densify(cfg);
        if (rep->parsed()) return cmd_report(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
