#pragma once

#include <cstddef>
#include <string>

namespace hsal::simd {

// Band-vector reduction kernels used by the hot loops (spectral similarity
// scan, color integration, image metrics). Each entry point exists as a
// scalar reference and, where the target supports it, a vectorized variant.
// Variants are selected once at runtime; all of them must agree with the
// scalar reference within floating-point reassociation error, which the
// kernel equivalence tests enforce.
struct Kernels {
    const char* name;

    float (*dot)(const float* a, const float* b, size_t n);
    float (*l2_sq)(const float* a, const float* b, size_t n);
    float (*sum)(const float* a, size_t n);
    // Fused pass for the hybrid spectral distance: squared Euclidean
    // distance and dot product of the same two vectors in one sweep.
    void (*l2sq_dot)(const float* a, const float* b, size_t n, float* l2_sq, float* dot);
};

enum class IsaChoice {
    Auto,    // probe the CPU, prefer the widest supported variant
    Scalar,  // force the reference kernels
};

const Kernels& scalar_kernels();

// Kernel set for the requested choice. Auto consults the CPU once and caches
// the answer; the HSAL_KERNELS environment variable ("scalar", "avx2",
// "neon") overrides the probe.
const Kernels& kernels(IsaChoice choice = IsaChoice::Auto);

// Name of the variant Auto resolves to, for logs and summaries.
std::string active_kernel_name();

}  // namespace hsal::simd
