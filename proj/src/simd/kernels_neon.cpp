#include "hsal/simd.hpp"

#if defined(__aarch64__) || defined(__ARM_NEON)

#include <arm_neon.h>

namespace hsal::simd {

namespace {

float dot_neon(const float* a, const float* b, size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = vmlaq_f32(acc, vld1q_f32(a + i), vld1q_f32(b + i));
    }
    float r = vaddvq_f32(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

float l2_sq_neon(const float* a, const float* b, size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t d = vsubq_f32(vld1q_f32(a + i), vld1q_f32(b + i));
        acc = vmlaq_f32(acc, d, d);
    }
    float r = vaddvq_f32(acc);
    for (; i < n; ++i) {
        const float d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

float sum_neon(const float* a, size_t n) {
    float32x4_t acc = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = vaddq_f32(acc, vld1q_f32(a + i));
    float r = vaddvq_f32(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

void l2sq_dot_neon(const float* a, const float* b, size_t n, float* l2_sq, float* dot) {
    float32x4_t acc_l2 = vdupq_n_f32(0.0f);
    float32x4_t acc_dot = vdupq_n_f32(0.0f);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t va = vld1q_f32(a + i);
        float32x4_t vb = vld1q_f32(b + i);
        float32x4_t d = vsubq_f32(va, vb);
        acc_l2 = vmlaq_f32(acc_l2, d, d);
        acc_dot = vmlaq_f32(acc_dot, va, vb);
    }
    float r_l2 = vaddvq_f32(acc_l2);
    float r_dot = vaddvq_f32(acc_dot);
    for (; i < n; ++i) {
        const float d = a[i] - b[i];
        r_l2 += d * d;
        r_dot += a[i] * b[i];
    }
    *l2_sq = r_l2;
    *dot = r_dot;
}

}  // namespace

const Kernels& neon_kernels() {
    static const Kernels k{"neon", dot_neon, l2_sq_neon, sum_neon, l2sq_dot_neon};
    return k;
}

}  // namespace hsal::simd

#endif
