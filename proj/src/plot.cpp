#include "hsal/io.hpp"
#include "hsal/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace hsal {

namespace {

struct Canvas {
    int size;
    std::vector<uint8_t> rgba;

    explicit Canvas(int s) : size(s), rgba(size_t(s) * s * 4, 255) {}

    void put(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
        if (x < 0 || x >= size || y < 0 || y >= size) return;
        const size_t i = (size_t(y) * size + x) * 4;
        rgba[i] = r;
        rgba[i + 1] = g;
        rgba[i + 2] = b;
        rgba[i + 3] = 255;
    }

    void square(int cx, int cy, int half, uint8_t r, uint8_t g, uint8_t b) {
        for (int dy = -half; dy <= half; ++dy)
            for (int dx = -half; dx <= half; ++dx) put(cx + dx, cy + dy, r, g, b);
    }
};

}  // namespace

void save_ratio_scatter_png(const std::string& path, const RatioScatter& scatter, int size_px) {
    Canvas canvas(size_px);
    const int margin = size_px / 16;
    const int plot = size_px - 2 * margin;

    double lo = 0.0, hi = 1.0;
    for (const auto& p : scatter.points) {
        lo = std::min({lo, p.truth_ratio, p.predicted_ratio});
        hi = std::max({hi, p.truth_ratio, p.predicted_ratio});
    }
    const double pad = 0.05 * (hi - lo + 1e-12);
    lo -= pad;
    hi += pad;

    auto to_px_x = [&](double v) { return margin + int(std::lround((v - lo) / (hi - lo) * plot)); };
    auto to_px_y = [&](double v) {
        return size_px - margin - int(std::lround((v - lo) / (hi - lo) * plot));
    };

    // Frame.
    for (int i = 0; i <= plot; ++i) {
        canvas.put(margin + i, margin, 0, 0, 0);
        canvas.put(margin + i, size_px - margin, 0, 0, 0);
        canvas.put(margin, margin + i, 0, 0, 0);
        canvas.put(size_px - margin, margin + i, 0, 0, 0);
    }
    // Identity line.
    for (int i = 0; i <= plot * 2; ++i) {
        const double v = lo + (hi - lo) * double(i) / double(plot * 2);
        canvas.put(to_px_x(v), to_px_y(v), 120, 120, 120);
    }
    // Points: truth on x, prediction on y.
    for (const auto& p : scatter.points)
        canvas.square(to_px_x(p.truth_ratio), to_px_y(p.predicted_ratio), 2, 200, 30, 30);

    io::save_png_rgba(path, size_px, size_px, canvas.rgba);
}

}  // namespace hsal
