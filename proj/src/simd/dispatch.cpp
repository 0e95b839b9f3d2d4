#include "hsal/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace hsal::simd {

#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)
const Kernels& avx2_kernels();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
const Kernels& neon_kernels();
#endif

namespace {

const Kernels& probe() {
    if (const char* env = std::getenv("HSAL_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return scalar_kernels();
#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)
        if (std::strcmp(env, "avx2") == 0) return avx2_kernels();
#endif
#if defined(__aarch64__) || defined(__ARM_NEON)
        if (std::strcmp(env, "neon") == 0) return neon_kernels();
#endif
        // Unknown or unsupported request falls back to the reference.
        return scalar_kernels();
    }
#if defined(__x86_64__) || defined(__i386__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return avx2_kernels();
#elif defined(__aarch64__)
    return neon_kernels();
#endif
    return scalar_kernels();
}

}  // namespace

const Kernels& kernels(IsaChoice choice) {
    if (choice == IsaChoice::Scalar) return scalar_kernels();
    static const Kernels& selected = probe();
    return selected;
}

std::string active_kernel_name() {
    return kernels(IsaChoice::Auto).name;
}

}  // namespace hsal::simd
