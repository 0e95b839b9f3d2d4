#include "hsal/simd.hpp"

namespace hsal::simd {

namespace {

float dot_scalar(const float* a, const float* b, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += double(a[i]) * double(b[i]);
    return float(acc);
}

float l2_sq_scalar(const float* a, const float* b, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = double(a[i]) - double(b[i]);
        acc += d * d;
    }
    return float(acc);
}

float sum_scalar(const float* a, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) acc += double(a[i]);
    return float(acc);
}

void l2sq_dot_scalar(const float* a, const float* b, size_t n, float* l2_sq, float* dot) {
    double acc_l2 = 0.0, acc_dot = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double d = double(a[i]) - double(b[i]);
        acc_l2 += d * d;
        acc_dot += double(a[i]) * double(b[i]);
    }
    *l2_sq = float(acc_l2);
    *dot = float(acc_dot);
}

}  // namespace

const Kernels& scalar_kernels() {
    static const Kernels k{"scalar", dot_scalar, l2_sq_scalar, sum_scalar, l2sq_dot_scalar};
    return k;
}

}  // namespace hsal::simd
