#include "hsal/metrics.hpp"

#include "hsal/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hsal {

using nlohmann::json;

namespace {

constexpr double kDeg2Rad = std::numbers::pi / 180.0;
constexpr double kRad2Deg = 180.0 / std::numbers::pi;

double lab_f(double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

void require_same_white(const LabColor& a, const LabColor& b) {
    if (a.white != b.white)
        throw Error("color difference: Lab values use different white points");
}

}  // namespace

LabColor xyz_to_lab(const XyzTriple& xyz, WhitePoint wp) {
    const XyzTriple wn = white_point_xyz(wp);
    const double fx = lab_f(xyz.x / wn.x);
    const double fy = lab_f(xyz.y / wn.y);
    const double fz = lab_f(xyz.z / wn.z);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz), wp};
}

LabColor linear_rgb_to_lab(const RgbTriple& rgb, WhitePoint wp) {
    return xyz_to_lab(linear_rgb_to_xyz(rgb), wp);
}

double cie76(const LabColor& a, const LabColor& b) {
    require_same_white(a, b);
    const double dL = a.L - b.L, da = a.a - b.a, db = a.b - b.b;
    return std::sqrt(dL * dL + da * da + db * db);
}

double ciede2000(const LabColor& lab1, const LabColor& lab2) {
    require_same_white(lab1, lab2);

    const double c1 = std::hypot(lab1.a, lab1.b);
    const double c2 = std::hypot(lab2.a, lab2.b);
    const double c_bar = (c1 + c2) / 2.0;

    const double c_bar7 = std::pow(c_bar, 7.0);
    constexpr double k257 = 6103515625.0;  // 25^7
    const double g = 0.5 * (1.0 - std::sqrt(c_bar7 / (c_bar7 + k257)));

    const double a1p = (1.0 + g) * lab1.a;
    const double a2p = (1.0 + g) * lab2.a;
    const double c1p = std::hypot(a1p, lab1.b);
    const double c2p = std::hypot(a2p, lab2.b);

    auto hue_deg = [](double a, double b) {
        if (a == 0.0 && b == 0.0) return 0.0;
        double h = std::atan2(b, a) * kRad2Deg;
        return h < 0.0 ? h + 360.0 : h;
    };
    const double h1p = hue_deg(a1p, lab1.b);
    const double h2p = hue_deg(a2p, lab2.b);

    const double dLp = lab2.L - lab1.L;
    const double dCp = c2p - c1p;

    double dhp = 0.0;
    if (c1p * c2p != 0.0) {
        dhp = h2p - h1p;
        if (dhp > 180.0)
            dhp -= 360.0;
        else if (dhp < -180.0)
            dhp += 360.0;
    }
    const double dHp = 2.0 * std::sqrt(c1p * c2p) * std::sin(dhp / 2.0 * kDeg2Rad);

    const double l_bar = (lab1.L + lab2.L) / 2.0;
    const double cp_bar = (c1p + c2p) / 2.0;

    double hp_bar = h1p + h2p;
    if (c1p * c2p != 0.0) {
        if (std::abs(h1p - h2p) <= 180.0)
            hp_bar = (h1p + h2p) / 2.0;
        else if (h1p + h2p < 360.0)
            hp_bar = (h1p + h2p + 360.0) / 2.0;
        else
            hp_bar = (h1p + h2p - 360.0) / 2.0;
    }

    const double t = 1.0 - 0.17 * std::cos((hp_bar - 30.0) * kDeg2Rad) +
                     0.24 * std::cos(2.0 * hp_bar * kDeg2Rad) +
                     0.32 * std::cos((3.0 * hp_bar + 6.0) * kDeg2Rad) -
                     0.20 * std::cos((4.0 * hp_bar - 63.0) * kDeg2Rad);

    const double d_theta = 30.0 * std::exp(-((hp_bar - 275.0) / 25.0) * ((hp_bar - 275.0) / 25.0));
    const double cp_bar7 = std::pow(cp_bar, 7.0);
    const double rc = 2.0 * std::sqrt(cp_bar7 / (cp_bar7 + k257));
    const double rt = -std::sin(2.0 * d_theta * kDeg2Rad) * rc;

    const double l50 = (l_bar - 50.0) * (l_bar - 50.0);
    const double sl = 1.0 + 0.015 * l50 / std::sqrt(20.0 + l50);
    const double sc = 1.0 + 0.045 * cp_bar;
    const double sh = 1.0 + 0.015 * cp_bar * t;

    const double vl = dLp / sl;
    const double vc = dCp / sc;
    const double vh = dHp / sh;
    return std::sqrt(vl * vl + vc * vc + vh * vh + rt * vc * vh);
}

// --- chart -------------------------------------------------------------------

void ReferenceChart::validate(int frame_width, int frame_height) const {
    for (size_t i = 0; i < patches.size(); ++i) {
        const auto& p = patches[i];
        if (!p.region.inside(frame_width, frame_height))
            throw Error("chart patch '" + p.name + "' outside frame");
        for (size_t j = i + 1; j < patches.size(); ++j) {
            const auto& q = patches[j].region;
            const bool overlap = p.region.x < q.x + q.width && q.x < p.region.x + p.region.width &&
                                 p.region.y < q.y + q.height && q.y < p.region.y + p.region.height;
            if (overlap)
                throw Error("chart patches '" + p.name + "' and '" + patches[j].name +
                            "' overlap");
        }
    }
}

ReferenceChart load_chart(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file_text(path));
    } catch (const json::exception& e) {
        throw Error("load_chart: bad JSON in " + path + ": " + e.what());
    }
    ReferenceChart chart;
    for (const auto& p : j.at("patches")) {
        const auto rect = p.at("rect").get<std::vector<int>>();
        const auto rgb = p.at("truth_linear_rgb").get<std::vector<double>>();
        if (rect.size() != 4 || rgb.size() != 3)
            throw Error("load_chart: patch rect must be [x,y,w,h], truth [r,g,b]");
        chart.patches.push_back({p.at("name").get<std::string>(),
                                 PixelRect{rect[0], rect[1], rect[2], rect[3]},
                                 RgbTriple{rgb[0], rgb[1], rgb[2]}});
    }
    return chart;
}

void save_chart(const std::string& path, const ReferenceChart& chart) {
    json patches = json::array();
    for (const auto& p : chart.patches) {
        patches.push_back({{"name", p.name},
                           {"rect", {p.region.x, p.region.y, p.region.width, p.region.height}},
                           {"truth_linear_rgb", {p.truth_linear.r, p.truth_linear.g, p.truth_linear.b}}});
    }
    io::write_file_text(path, json{{"patches", patches}}.dump(2) + "\n");
}

ChartReport chart_report(const AlbedoMap& albedo, const ReferenceChart& chart) {
    chart.validate(albedo.width(), albedo.height());
    if (chart.patches.empty()) throw Error("chart_report: chart has no patches");

    ChartReport report;
    for (const auto& patch : chart.patches) {
        RgbTriple sum;
        size_t n = 0;
        for (int y = patch.region.y; y < patch.region.y + patch.region.height; ++y) {
            for (int x = patch.region.x; x < patch.region.x + patch.region.width; ++x) {
                if (!albedo.valid(x, y)) continue;
                const RgbTriple c = albedo.linear(x, y);
                sum.r += c.r;
                sum.g += c.g;
                sum.b += c.b;
                ++n;
            }
        }
        if (n == 0) {
            report.skipped_patches.push_back(patch.name);
            continue;
        }

        PatchReport pr;
        pr.name = patch.name;
        pr.valid_pixels = n;
        pr.mean_linear = {sum.r / double(n), sum.g / double(n), sum.b / double(n)};
        pr.truth_linear = patch.truth_linear;

        const LabColor lab_pred = linear_rgb_to_lab(pr.mean_linear);
        const LabColor lab_true = linear_rgb_to_lab(pr.truth_linear);
        pr.cie76 = cie76(lab_pred, lab_true);
        pr.ciede2000 = ciede2000(lab_pred, lab_true);

        const double dr = pr.mean_linear.r - pr.truth_linear.r;
        const double dg = pr.mean_linear.g - pr.truth_linear.g;
        const double db = pr.mean_linear.b - pr.truth_linear.b;
        pr.mse = (dr * dr + dg * dg + db * db) / 3.0;

        pr.luminance_pred = luminance(pr.mean_linear);
        pr.luminance_truth = luminance(pr.truth_linear);
        report.patches.push_back(pr);
    }

    if (report.patches.empty()) throw Error("chart_report: every patch lacked valid pixels");

    double sum76 = 0.0, sum2000 = 0.0, sum_mse = 0.0;
    for (const auto& p : report.patches) {
        sum76 += p.cie76;
        sum2000 += p.ciede2000;
        sum_mse += p.mse;
    }
    const double n = double(report.patches.size());
    report.mean_cie76 = sum76 / n;
    report.mean_ciede2000 = sum2000 / n;
    report.mse = sum_mse / n;

    // Pearson correlation of patch luminances.
    double mean_p = 0.0, mean_t = 0.0;
    for (const auto& p : report.patches) {
        mean_p += p.luminance_pred;
        mean_t += p.luminance_truth;
    }
    mean_p /= n;
    mean_t /= n;
    double cov = 0.0, var_p = 0.0, var_t = 0.0;
    for (const auto& p : report.patches) {
        const double dp = p.luminance_pred - mean_p;
        const double dt = p.luminance_truth - mean_t;
        cov += dp * dt;
        var_p += dp * dp;
        var_t += dt * dt;
    }
    report.luminance_correlation =
        (var_p > 0.0 && var_t > 0.0) ? cov / std::sqrt(var_p * var_t) : 0.0;
    return report;
}

// --- WHDR ---------------------------------------------------------------------

namespace {

PairJudgment judgment_from_string(const std::string& s) {
    if (s == "A_darker") return PairJudgment::ADarker;
    if (s == "B_darker") return PairJudgment::BDarker;
    if (s == "Equal") return PairJudgment::Equal;
    throw Error("annotations: unknown judgment '" + s + "'");
}

std::string judgment_to_string(PairJudgment j) {
    switch (j) {
        case PairJudgment::ADarker: return "A_darker";
        case PairJudgment::BDarker: return "B_darker";
        case PairJudgment::Equal: return "Equal";
    }
    throw Error("annotations: bad judgment value");
}

}  // namespace

std::vector<PairAnnotation> load_annotations(const std::string& path) {
    json j;
    try {
        j = json::parse(io::read_file_text(path));
    } catch (const json::exception& e) {
        throw Error("load_annotations: bad JSON in " + path + ": " + e.what());
    }
    std::vector<PairAnnotation> out;
    for (const auto& a : j) {
        const auto pa = a.at("a").get<std::vector<int>>();
        const auto pb = a.at("b").get<std::vector<int>>();
        if (pa.size() != 2 || pb.size() != 2)
            throw Error("load_annotations: points must be [u,v]");
        PairAnnotation ann;
        ann.ax = pa[0];
        ann.ay = pa[1];
        ann.bx = pb[0];
        ann.by = pb[1];
        ann.judgment = judgment_from_string(a.at("judgment").get<std::string>());
        ann.weight = a.value("weight", 1.0);
        out.push_back(ann);
    }
    return out;
}

void save_annotations(const std::string& path, const std::vector<PairAnnotation>& annotations) {
    json j = json::array();
    for (const auto& a : annotations) {
        j.push_back({{"a", {a.ax, a.ay}},
                     {"b", {a.bx, a.by}},
                     {"judgment", judgment_to_string(a.judgment)},
                     {"weight", a.weight}});
    }
    io::write_file_text(path, j.dump(2) + "\n");
}

PairJudgment predict_judgment(double y_a, double y_b, double delta) {
    if (y_b == 0.0) {
        if (y_a == 0.0) return PairJudgment::Equal;
        return PairJudgment::BDarker;
    }
    const double ratio = y_a / y_b;
    if (ratio >= 1.0 / (1.0 + delta) && ratio <= 1.0 + delta) return PairJudgment::Equal;
    return ratio < 1.0 ? PairJudgment::ADarker : PairJudgment::BDarker;
}

double whdr(const AlbedoMap& albedo, const std::vector<PairAnnotation>& annotations,
            double delta) {
    double total = 0.0, disagree = 0.0;
    for (const auto& a : annotations) {
        if (a.ax == a.bx && a.ay == a.by) throw Error("whdr: annotation points must be distinct");
        if (!albedo.in_bounds(a.ax, a.ay) || !albedo.in_bounds(a.bx, a.by))
            throw Error("whdr: annotation point outside frame");
        if (!albedo.valid(a.ax, a.ay) || !albedo.valid(a.bx, a.by))
            throw Error("whdr: annotation point on invalid albedo pixel");
        if (!(a.weight > 0.0)) throw Error("whdr: weights must be positive");

        const PairJudgment pred = predict_judgment(luminance(albedo.linear(a.ax, a.ay)),
                                                   luminance(albedo.linear(a.bx, a.by)), delta);
        total += a.weight;
        if (pred != a.judgment) disagree += a.weight;
    }
    if (total == 0.0) throw Error("whdr: zero total weight");
    return disagree / total;
}

// --- ratio scatter -------------------------------------------------------------

RatioScatter ratio_scatter_report(const AlbedoMap& albedo, const ReferenceChart& chart) {
    if (chart.patches.size() < 2) throw Error("ratio_scatter_report: need at least 2 patches");
    const ChartReport report = chart_report(albedo, chart);

    RatioScatter scatter;
    double sq_sum = 0.0;
    for (size_t i = 0; i < report.patches.size(); ++i) {
        for (size_t j = i + 1; j < report.patches.size(); ++j) {
            const auto& a = report.patches[i];
            const auto& b = report.patches[j];
            if (a.luminance_truth == 0.0 || b.luminance_truth == 0.0 ||
                b.luminance_pred == 0.0) {
                scatter.skipped_pairs.push_back(a.name + "/" + b.name);
                continue;
            }
            RatioPoint pt;
            pt.patch_a = a.name;
            pt.patch_b = b.name;
            pt.truth_ratio = a.luminance_truth / b.luminance_truth;
            pt.predicted_ratio = a.luminance_pred / b.luminance_pred;
            const double d = pt.predicted_ratio - pt.truth_ratio;
            sq_sum += d * d;
            scatter.points.push_back(pt);
        }
    }
    if (!scatter.points.empty())
        scatter.rms_deviation = std::sqrt(sq_sum / double(scatter.points.size()));
    return scatter;
}

void save_ratio_scatter_csv(const std::string& path, const RatioScatter& scatter) {
    std::string csv = "patch_a,patch_b,truth_ratio,predicted_ratio\n";
    char line[256];
    for (const auto& p : scatter.points) {
        std::snprintf(line, sizeof(line), "%s,%s,%.9g,%.9g\n", p.patch_a.c_str(),
                      p.patch_b.c_str(), p.truth_ratio, p.predicted_ratio);
        csv += line;
    }
    io::write_file_text(path, csv);
}

}  // namespace hsal
