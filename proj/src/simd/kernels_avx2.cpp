#include "hsal/simd.hpp"

#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)

#include <immintrin.h>

namespace hsal::simd {

namespace {

inline float hadd256(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    __m128 s = _mm_add_ps(lo, hi);
    s = _mm_add_ps(s, _mm_movehl_ps(s, s));
    s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
    return _mm_cvtss_f32(s);
}

float dot_avx2(const float* a, const float* b, size_t n) {
    __m256 acc = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        acc = _mm256_add_ps(acc, _mm256_mul_ps(va, vb));
    }
    float r = hadd256(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

float l2_sq_avx2(const float* a, const float* b, size_t n) {
    __m256 acc = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 d = _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i));
        acc = _mm256_add_ps(acc, _mm256_mul_ps(d, d));
    }
    float r = hadd256(acc);
    for (; i < n; ++i) {
        const float d = a[i] - b[i];
        r += d * d;
    }
    return r;
}

float sum_avx2(const float* a, size_t n) {
    __m256 acc = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) acc = _mm256_add_ps(acc, _mm256_loadu_ps(a + i));
    float r = hadd256(acc);
    for (; i < n; ++i) r += a[i];
    return r;
}

void l2sq_dot_avx2(const float* a, const float* b, size_t n, float* l2_sq, float* dot) {
    __m256 acc_l2 = _mm256_setzero_ps();
    __m256 acc_dot = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 va = _mm256_loadu_ps(a + i);
        __m256 vb = _mm256_loadu_ps(b + i);
        __m256 d = _mm256_sub_ps(va, vb);
        acc_l2 = _mm256_add_ps(acc_l2, _mm256_mul_ps(d, d));
        acc_dot = _mm256_add_ps(acc_dot, _mm256_mul_ps(va, vb));
    }
    float r_l2 = hadd256(acc_l2);
    float r_dot = hadd256(acc_dot);
    for (; i < n; ++i) {
        const float d = a[i] - b[i];
        r_l2 += d * d;
        r_dot += a[i] * b[i];
    }
    *l2_sq = r_l2;
    *dot = r_dot;
}

}  // namespace

const Kernels& avx2_kernels() {
    static const Kernels k{"avx2", dot_avx2, l2_sq_avx2, sum_avx2, l2sq_dot_avx2};
    return k;
}

}  // namespace hsal::simd

#endif
