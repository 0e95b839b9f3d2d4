#pragma once

#include "hsal/albedo.hpp"
#include "hsal/color.hpp"
#include "hsal/types.hpp"

#include <string>
#include <vector>

namespace hsal {

struct LabColor {
    double L = 0.0, a = 0.0, b = 0.0;
    WhitePoint white = WhitePoint::D65;
};

LabColor xyz_to_lab(const XyzTriple& xyz, WhitePoint wp = WhitePoint::D65);
LabColor linear_rgb_to_lab(const RgbTriple& rgb, WhitePoint wp = WhitePoint::D65);

// Euclidean distance in Lab. Mixing white points is a hard error.
double cie76(const LabColor& a, const LabColor& b);

// CIEDE2000 with unit parametric factors (kL = kC = kH = 1), including the
// chroma-dependent G correction, hue weighting and the rotation term.
double ciede2000(const LabColor& a, const LabColor& b);

// Ground-truth patch chart: the synthetic stand-in for a reference color
// board.
struct ChartPatch {
    std::string name;
    PixelRect region;
    RgbTriple truth_linear;
};

struct ReferenceChart {
    std::vector<ChartPatch> patches;

    // Regions must be disjoint and inside the frame.
    void validate(int frame_width, int frame_height) const;
};

ReferenceChart load_chart(const std::string& path);
void save_chart(const std::string& path, const ReferenceChart& chart);

struct PatchReport {
    std::string name;
    RgbTriple mean_linear;   // over valid pixels
    RgbTriple truth_linear;
    size_t valid_pixels = 0;
    double cie76 = 0.0;
    double ciede2000 = 0.0;
    double mse = 0.0;        // over linear-RGB channels
    double luminance_pred = 0.0;
    double luminance_truth = 0.0;
};

struct ChartReport {
    std::vector<PatchReport> patches;
    std::vector<std::string> skipped_patches;  // zero valid albedo pixels
    double mean_cie76 = 0.0;
    double mean_ciede2000 = 0.0;
    double mse = 0.0;
    double luminance_correlation = 0.0;  // Pearson, patch luminances vs truth
};

// Per-patch mean albedo against chart truth. Patch statistics use the mean
// over valid pixels; empty patches are excluded and reported.
ChartReport chart_report(const AlbedoMap& albedo, const ReferenceChart& chart);

enum class PairJudgment { ADarker, BDarker, Equal };

struct PairAnnotation {
    int ax = 0, ay = 0;
    int bx = 0, by = 0;
    PairJudgment judgment = PairJudgment::Equal;
    double weight = 1.0;
};

std::vector<PairAnnotation> load_annotations(const std::string& path);
void save_annotations(const std::string& path, const std::vector<PairAnnotation>& annotations);

constexpr double kDefaultWhdrDelta = 0.10;

// Judgment predicted from the luminance ratio Y_A / Y_B: Equal inside
// [1/(1+delta), 1+delta], otherwise the darker side.
PairJudgment predict_judgment(double y_a, double y_b, double delta);

// Weighted disagreement rate between predictions and annotations, in [0,1].
double whdr(const AlbedoMap& albedo, const std::vector<PairAnnotation>& annotations,
            double delta = kDefaultWhdrDelta);

struct RatioPoint {
    std::string patch_a, patch_b;
    double truth_ratio = 0.0;      // Y_A^G / Y_B^G
    double predicted_ratio = 0.0;  // Y_A / Y_B
};

struct RatioScatter {
    std::vector<RatioPoint> points;           // canonical order: patch index a < b
    std::vector<std::string> skipped_pairs;   // zero-luminance truth patch
    double rms_deviation = 0.0;               // RMS distance from the identity line
};

// Luminance-ratio scatter over all patch pairs, the densitometric view of
// chart fidelity.
RatioScatter ratio_scatter_report(const AlbedoMap& albedo, const ReferenceChart& chart);

void save_ratio_scatter_csv(const std::string& path, const RatioScatter& scatter);

// Scatter PNG with the identity line; predicted vs truth ratios.
void save_ratio_scatter_png(const std::string& path, const RatioScatter& scatter,
                            int size_px = 512);

}  // namespace hsal
