#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tlf::kernels {

// Pixel-rate inner loops used by frame blending and heatmap accumulation.
// Each kernel has a scalar reference implementation and, on x86, an AVX2
// variant selected at runtime. Variants are bit-exact equivalents of the
// scalar reference; blend_u8 keeps a fixed mul/add order (no FMA) so the
// float path matches lane for lane.
struct KernelOps {
    const char* name;

    // dst[i] = clamp255(trunc(c1*a[i] + c2*b[i] + 0.5f)), float32 arithmetic
    void (*blend_u8)(uint8_t* dst, const uint8_t* a, const uint8_t* b,
                     float c1, float c2, size_t n);

    // p[i] += delta
    void (*add_span_u32)(uint32_t* p, size_t n, uint32_t delta);

    // dst[i] += src[i]
    void (*acc_u64)(uint64_t* dst, const uint64_t* src, size_t n);
};

const KernelOps& scalar_ops();

#if defined(__x86_64__) || defined(_M_X64)
const KernelOps& avx2_ops();
bool cpu_has_avx2();
#endif

// Runtime-selected implementation. TLF_KERNELS=scalar|avx2 forces a variant
// (avx2 errors out if the CPU lacks it); otherwise the best available wins.
const KernelOps& active_ops();

// Every variant runnable on this machine, for equivalence tests.
std::vector<const KernelOps*> available_ops();

}  // namespace tlf::kernels
