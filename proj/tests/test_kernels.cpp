#include <doctest.h>

#include <random>
#include <vector>

#include "tlf/kernels.hpp"

using namespace tlf;

TEST_SUITE_BEGIN("kernels");

TEST_CASE("every available variant matches the scalar reference bit for bit") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto variants = kernels::available_ops();
    REQUIRE(!variants.empty());

    // sizes straddling the vector width, including ragged tails
    for (size_t n : {size_t(1), size_t(7), size_t(8), size_t(9), size_t(64), size_t(1023)}) {
        std::vector<uint8_t> a(n), b(n);
        for (auto& v : a) v = uint8_t(byte(rng));
        for (auto& v : b) v = uint8_t(byte(rng));
        for (int trial = 0; trial < 16; ++trial) {
            double c1 = unit(rng);
            float c1f = float(c1), c2f = float(1.0 - c1);
            std::vector<uint8_t> ref(n);
            kernels::scalar_ops().blend_u8(ref.data(), a.data(), b.data(), c1f, c2f, n);
            for (const auto* ops : variants) {
                std::vector<uint8_t> out(n, 0xEE);
                ops->blend_u8(out.data(), a.data(), b.data(), c1f, c2f, n);
                CHECK_MESSAGE(out == ref, "blend_u8 variant ", ops->name, " n=", n);
            }
        }

        std::vector<uint32_t> base32(n);
        for (auto& v : base32) v = uint32_t(rng());
        std::vector<uint32_t> ref32 = base32;
        kernels::scalar_ops().add_span_u32(ref32.data(), n, 3);
        for (const auto* ops : variants) {
            std::vector<uint32_t> out32 = base32;
            ops->add_span_u32(out32.data(), n, 3);
            CHECK_MESSAGE(out32 == ref32, "add_span_u32 variant ", ops->name, " n=", n);
        }

        std::vector<uint64_t> dst64(n), src64(n);
        for (auto& v : dst64) v = rng();
        for (auto& v : src64) v = rng();
        std::vector<uint64_t> ref64 = dst64;
        kernels::scalar_ops().acc_u64(ref64.data(), src64.data(), n);
        for (const auto* ops : variants) {
            std::vector<uint64_t> out64 = dst64;
            ops->acc_u64(out64.data(), src64.data(), n);
            CHECK_MESSAGE(out64 == ref64, "acc_u64 variant ", ops->name, " n=", n);
        }
    }
}

TEST_CASE("blend endpoints pass the source through unchanged") {
    std::vector<uint8_t> a = {0, 1, 127, 128, 254, 255, 42, 200, 13};
    std::vector<uint8_t> b = {255, 254, 3, 9, 0, 1, 99, 17, 250};
    for (const auto* ops : kernels::available_ops()) {
        std::vector<uint8_t> out(a.size());
        ops->blend_u8(out.data(), a.data(), b.data(), 1.0f, 0.0f, a.size());
        CHECK(out == a);
        ops->blend_u8(out.data(), a.data(), b.data(), 0.0f, 1.0f, a.size());
        CHECK(out == b);
    }
}

TEST_CASE("midpoint blend of 0 and 90 gives 45") {
    std::vector<uint8_t> a(20, 0), b(20, 90), out(20);
    for (const auto* ops : kernels::available_ops()) {
        ops->blend_u8(out.data(), a.data(), b.data(), 0.5f, 0.5f, 20);
        for (uint8_t v : out) CHECK(v == 45);
    }
}

TEST_CASE("active_ops returns a working implementation") {
    const auto& ops = kernels::active_ops();
    std::vector<uint8_t> a(5, 10), b(5, 20), out(5);
    ops.blend_u8(out.data(), a.data(), b.data(), 0.5f, 0.5f, 5);
    CHECK(out == std::vector<uint8_t>(5, 15));
}

TEST_SUITE_END();
