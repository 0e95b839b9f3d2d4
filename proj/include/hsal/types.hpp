#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hsal {

// All library errors derive from this; the CLI maps them to nonzero exit codes.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{};
    }
};

struct PixelRect {
    int x = 0, y = 0, width = 0, height = 0;

    bool empty() const { return width <= 0 || height <= 0; }
    bool contains(int px, int py) const {
        return px >= x && px < x + width && py >= y && py < y + height;
    }
    bool inside(int frame_w, int frame_h) const {
        return x >= 0 && y >= 0 && width > 0 && height > 0 &&
               x + width <= frame_w && y + height <= frame_h;
    }
};

// Dense row-major 2-D grid; the workhorse for depth maps, masks and shading fields.
template <typename T>
struct Image {
    int width = 0, height = 0;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, T fill = T{}) : width(w), height(h), data(size_t(w) * h, fill) {}

    T& at(int x, int y) { return data[size_t(y) * width + x]; }
    const T& at(int x, int y) const { return data[size_t(y) * width + x]; }
    bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
    size_t pixel_count() const { return size_t(width) * height; }
};

struct RgbTriple {
    double r = 0.0, g = 0.0, b = 0.0;
};

// Rec.709 / sRGB luminance of a linear-RGB triple.
inline double luminance(const RgbTriple& c) {
    return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

}  // namespace hsal
