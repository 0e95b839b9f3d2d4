#include "hsal/lidar.hpp"

#include "hsal/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace hsal {

using nlohmann::json;

void SensorConstants::validate() const {
    if (!(receiver_aperture_d_r > 0.0)) throw Error("sensor constants: D_r must be positive");
    if (!(eta_sys > 0.0 && eta_sys <= 1.0)) throw Error("sensor constants: eta_sys in (0,1]");
    if (!(eta_atm > 0.0 && eta_atm <= 1.0)) throw Error("sensor constants: eta_atm in (0,1]");
    if (!(lidar_wavelength_nm > 0.0))
        throw Error("sensor constants: lidar wavelength must be positive");
}

void LidarSampleSet::validate() const {
    constants.validate();
    if (frame_width <= 0 || frame_height <= 0)
        throw Error("lidar sample set: nonpositive frame size");
    std::unordered_set<int64_t> seen;
    for (const auto& s : samples) {
        if (s.u < 0 || s.u >= frame_width || s.v < 0 || s.v >= frame_height)
            throw Error("lidar sample at (" + std::to_string(s.u) + ", " + std::to_string(s.v) +
                        ") outside frame");
        if (!(s.range_m > 0.0)) throw Error("lidar sample: range must be positive");
        if (!(s.intensity >= 0.0)) throw Error("lidar sample: intensity must be nonnegative");
        if (!(s.cos_theta > 0.0 && s.cos_theta <= 1.0))
            throw Error("lidar sample: cos(theta) must be in (0,1]");
        const int64_t key = int64_t(s.v) * frame_width + s.u;
        if (!seen.insert(key).second)
            throw Error("lidar sample set: duplicate pixel (" + std::to_string(s.u) + ", " +
                        std::to_string(s.v) + ")");
    }
}

double forward_intensity(const SensorConstants& c, double rho_lidar, double range_m,
                         double cos_theta) {
    c.validate();
    if (!(rho_lidar >= 0.0 && rho_lidar <= 1.0))
        throw Error("forward_intensity: rho must be in [0,1]");
    if (!(range_m > 0.0)) throw Error("forward_intensity: range must be positive");
    if (!(cos_theta > 0.0 && cos_theta <= 1.0))
        throw Error("forward_intensity: cos(theta) must be in (0,1]");

    const double d2 = c.receiver_aperture_d_r * c.receiver_aperture_d_r;
    return d2 * c.eta_sys * c.eta_atm * rho_lidar * cos_theta / (4.0 * range_m * range_m);
}

InvertResult invert_reflectance(const SensorConstants& c, const LidarSample& s,
                                const InvertOptions& opt) {
    c.validate();
    InvertResult out;
    if (s.cos_theta < opt.cos_min) {
        out.rejected = true;
        return out;
    }
    const double d2 = c.receiver_aperture_d_r * c.receiver_aperture_d_r;
    double rho = 4.0 * s.intensity * s.range_m * s.range_m / (d2 * c.eta_sys * c.eta_atm * s.cos_theta);
    if (rho > opt.clamp_max) {
        rho = opt.clamp_max;
        out.clamped = true;
    }
    out.rho = rho;
    return out;
}

NormalMap normals_from_depth(const Image<double>& depth, const PinholeIntrinsics& intr) {
    const int w = depth.width, h = depth.height;
    NormalMap out;
    out.normals = Image<Vec3>(w, h);
    out.valid = Image<uint8_t>(w, h, 0);

    auto has_depth = [&](int x, int y) { return depth.in_bounds(x, y) && depth.at(x, y) > 0.0; };

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!has_depth(x, y)) continue;
            // Full central-difference cross required.
            if (!has_depth(x - 1, y) || !has_depth(x + 1, y) || !has_depth(x, y - 1) ||
                !has_depth(x, y + 1))
                continue;

            const Vec3 px0 = intr.back_project(x - 1, y, depth.at(x - 1, y));
            const Vec3 px1 = intr.back_project(x + 1, y, depth.at(x + 1, y));
            const Vec3 py0 = intr.back_project(x, y - 1, depth.at(x, y - 1));
            const Vec3 py1 = intr.back_project(x, y + 1, depth.at(x, y + 1));

            Vec3 n = (px1 - px0).cross(py1 - py0);
            const double len = n.norm();
            if (len <= 0.0) continue;
            n = n * (1.0 / len);

            // Orient toward the sensor: the normal must face against the ray.
            if (n.dot(intr.ray_direction(x, y)) > 0.0) n = n * -1.0;

            out.normals.at(x, y) = n;
            out.valid.at(x, y) = 1;
        }
    }
    return out;
}

Image<double> incidence_cosines(const NormalMap& normals, const PinholeIntrinsics& intr,
                                const Image<double>& depth) {
    const int w = depth.width, h = depth.height;
    if (normals.normals.width != w || normals.normals.height != h)
        throw Error("incidence_cosines: normal map and depth map size mismatch");

    Image<double> out(w, h, -1.0);  // -1 marks invalid
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!normals.valid.at(x, y)) continue;
            const double c = std::abs(normals.normals.at(x, y).dot(intr.ray_direction(x, y)));
            out.at(x, y) = std::min(c, 1.0);
        }
    }
    return out;
}

// --- file formats -----------------------------------------------------------

void save_lidar_csv(const std::string& csv_path, const std::string& sidecar_path,
                    const LidarSampleSet& set) {
    set.validate();
    std::ostringstream csv;
    csv << "u,v,range_m,intensity,cos_theta\n";
    csv.precision(17);
    for (const auto& s : set.samples)
        csv << s.u << "," << s.v << "," << s.range_m << "," << s.intensity << "," << s.cos_theta
            << "\n";
    io::write_file_text(csv_path, csv.str());

    json j;
    j["constants"] = {{"receiver_aperture_d_r", set.constants.receiver_aperture_d_r},
                      {"eta_sys", set.constants.eta_sys},
                      {"eta_atm", set.constants.eta_atm},
                      {"lidar_wavelength_nm", set.constants.lidar_wavelength_nm}};
    j["frame"] = {{"width", set.frame_width}, {"height", set.frame_height}};
    io::write_file_text(sidecar_path, j.dump(2) + "\n");
}

LidarSampleSet load_lidar_csv(const std::string& csv_path, const std::string& sidecar_path) {
    LidarSampleSet set;

    json j;
    try {
        j = json::parse(io::read_file_text(sidecar_path));
    } catch (const json::exception& e) {
        throw Error("lidar sidecar: bad JSON in " + sidecar_path + ": " + e.what());
    }
    const auto& c = j.at("constants");
    set.constants.receiver_aperture_d_r = c.at("receiver_aperture_d_r").get<double>();
    set.constants.eta_sys = c.at("eta_sys").get<double>();
    set.constants.eta_atm = c.at("eta_atm").get<double>();
    set.constants.lidar_wavelength_nm = c.at("lidar_wavelength_nm").get<double>();
    set.frame_width = j.at("frame").at("width").get<int>();
    set.frame_height = j.at("frame").at("height").get<int>();

    std::istringstream in(io::read_file_text(csv_path));
    std::string line;
    if (!std::getline(in, line) || line != "u,v,range_m,intensity,cos_theta")
        throw Error("lidar csv: bad or missing header in " + csv_path);
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 5)
            throw Error("lidar csv: line " + std::to_string(line_no) + " has " +
                        std::to_string(fields.size()) + " fields, want 5");
        LidarSample s;
        try {
            s.u = std::stoi(fields[0]);
            s.v = std::stoi(fields[1]);
            s.range_m = std::stod(fields[2]);
            s.intensity = std::stod(fields[3]);
            s.cos_theta = std::stod(fields[4]);
        } catch (const std::exception&) {
            throw Error("lidar csv: unparseable number at line " + std::to_string(line_no));
        }
        set.samples.push_back(s);
    }
    set.validate();
    return set;
}

void apply_registration_table(LidarSampleSet& set, const std::string& table_csv_path) {
    std::istringstream in(io::read_file_text(table_csv_path));
    std::string line;
    if (!std::getline(in, line) || line != "index,u,v")
        throw Error("registration table: bad or missing header in " + table_csv_path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string f0, f1, f2;
        if (!std::getline(row, f0, ',') || !std::getline(row, f1, ',') || !std::getline(row, f2))
            throw Error("registration table: malformed row: " + line);
        const size_t idx = std::stoul(f0);
        if (idx >= set.samples.size())
            throw Error("registration table: index " + std::to_string(idx) + " out of range");
        set.samples[idx].u = std::stoi(f1);
        set.samples[idx].v = std::stoi(f2);
    }
    set.validate();
}

}  // namespace hsal
