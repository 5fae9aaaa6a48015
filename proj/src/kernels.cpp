#include "tlf/kernels.hpp"

#include <cstdlib>
#include <cstring>

#include "tlf/types.hpp"

namespace tlf::kernels {

namespace {

void blend_u8_scalar(uint8_t* dst, const uint8_t* a, const uint8_t* b,
                     float c1, float c2, size_t n) {
    for (size_t i = 0; i < n; ++i) {
        float t = c1 * float(a[i]);
        float u = c2 * float(b[i]);
        float v = t + u;
        v += 0.5f;
        int iv = int(v);  // non-negative, truncation == floor
        if (iv > 255) iv = 255;
        dst[i] = uint8_t(iv);
    }
}

void add_span_u32_scalar(uint32_t* p, size_t n, uint32_t delta) {
    for (size_t i = 0; i < n; ++i) p[i] += delta;
}

void acc_u64_scalar(uint64_t* dst, const uint64_t* src, size_t n) {
    for (size_t i = 0; i < n; ++i) dst[i] += src[i];
}

}  // namespace

const KernelOps& scalar_ops() {
    static const KernelOps ops{"scalar", blend_u8_scalar, add_span_u32_scalar, acc_u64_scalar};
    return ops;
}

const KernelOps& active_ops() {
    static const KernelOps* selected = [] {
        const char* env = std::getenv("TLF_KERNELS");
        if (env) {
            std::string want(env);
            if (want == "scalar") return &scalar_ops();
#if defined(__x86_64__) || defined(_M_X64)
            if (want == "avx2") {
                if (!cpu_has_avx2())
                    throw ConfigError("TLF_KERNELS=avx2 requested but CPU lacks AVX2");
                return &avx2_ops();
            }
#endif
            throw ConfigError("unknown TLF_KERNELS value: '" + want + "'");
        }
#if defined(__x86_64__) || defined(_M_X64)
        if (cpu_has_avx2()) return &avx2_ops();
#endif
        return &scalar_ops();
    }();
    return *selected;
}

std::vector<const KernelOps*> available_ops() {
    std::vector<const KernelOps*> out{&scalar_ops()};
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) out.push_back(&avx2_ops());
#endif
    return out;
}

}  // namespace tlf::kernels
