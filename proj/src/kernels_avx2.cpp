// AVX2 variants of the pixel kernels. This translation unit is the only one
// compiled with -mavx2; callers reach it through the runtime dispatch in
// kernels.cpp, which checks cpuid first.

#include "tlf/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace tlf::kernels {

namespace {

void blend_u8_avx2(uint8_t* dst, const uint8_t* a, const uint8_t* b,
                   float c1, float c2, size_t n) {
    const __m256 c1v = _mm256_set1_ps(c1);
    const __m256 c2v = _mm256_set1_ps(c2);
    const __m256 half = _mm256_set1_ps(0.5f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i a8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(a + i));
        __m128i b8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b + i));
        __m256 af = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(a8));
        __m256 bf = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(b8));
        // same op order as the scalar reference: mul, mul, add, add
        __m256 v = _mm256_add_ps(_mm256_mul_ps(c1v, af), _mm256_mul_ps(c2v, bf));
        v = _mm256_add_ps(v, half);
        __m256i iv = _mm256_cvttps_epi32(v);
        __m128i lo = _mm256_castsi256_si128(iv);
        __m128i hi = _mm256_extracti128_si256(iv, 1);
        __m128i p16 = _mm_packus_epi32(lo, hi);   // saturates to u16
        __m128i p8 = _mm_packus_epi16(p16, p16);  // saturates to u8
        _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + i), p8);
    }
    for (; i < n; ++i) {
        float t = c1 * float(a[i]);
        float u = c2 * float(b[i]);
        float v = t + u;
        v += 0.5f;
        int iv = int(v);
        if (iv > 255) iv = 255;
        dst[i] = uint8_t(iv);
    }
}

void add_span_u32_avx2(uint32_t* p, size_t n, uint32_t delta) {
    const __m256i dv = _mm256_set1_epi32(int(delta));
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(p + i), _mm256_add_epi32(v, dv));
    }
    for (; i < n; ++i) p[i] += delta;
}

void acc_u64_avx2(uint64_t* dst, const uint64_t* src, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i d = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dst + i));
        __m256i s = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_add_epi64(d, s));
    }
    for (; i < n; ++i) dst[i] += src[i];
}

}  // namespace

const KernelOps& avx2_ops() {
    static const KernelOps ops{"avx2", blend_u8_avx2, add_span_u32_avx2, acc_u64_avx2};
    return ops;
}

bool cpu_has_avx2() {
    return __builtin_cpu_supports("avx2") != 0;
}

}  // namespace tlf::kernels

#endif  // x86_64
