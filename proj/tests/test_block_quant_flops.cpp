#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "deformsim/block.hpp"
#include "deformsim/engine.hpp"
#include "deformsim/flops.hpp"
#include "deformsim/quantize.hpp"

using namespace deformsim;

TEST_CASE("channel shuffle with two groups") {
    Tensor x({1, 4, 1, 1}, {0.0, 1.0, 2.0, 3.0});
    const Tensor y = channel_shuffle(x, 2);
    CHECK(y[0] == 0.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 1.0);
    CHECK(y[3] == 3.0);
    CHECK_THROWS_AS(channel_shuffle(Tensor({1, 3, 1, 1}), 2), ShapeError);
}

namespace {

DcnBlockParams random_params(std::uint32_t half, std::uint64_t seed) {
    DcnBlockParams p;
    p.pointwise_in.data = tensor_random({half, half, 1, 1}, SeedSpec::uniform(seed, -1, 1));
    p.depthwise.data = tensor_random({half, 1, 3, 3}, SeedSpec::uniform(seed + 1, -1, 1));
    p.pointwise_out.data = tensor_random({half, half, 1, 1}, SeedSpec::uniform(seed + 2, -1, 1));
    p.offset_gen.data = tensor_random({1, half, 3, 3}, SeedSpec::uniform(seed + 3, -0.2, 0.2));
    p.bound = 7;
    return p;
}

} // namespace

TEST_CASE("dcn block with a zeroed transform branch") {
    const Tensor x = tensor_random({1, 4, 3, 3}, SeedSpec::uniform(70, -1, 1));
    DcnBlockParams p = random_params(2, 71);
    p.pointwise_out.data = Tensor({2, 2, 1, 1}); // zero the final mix
    const Tensor y = dcn_block(x, p);

    // shuffle(concat(identity half, zeros))
    Tensor expect({1, 4, 3, 3});
    for (std::uint32_t c = 0; c < 2; ++c) {
        for (std::uint32_t i = 0; i < 3; ++i) {
            for (std::uint32_t j = 0; j < 3; ++j) {
                expect.at(0, 2 * c, i, j) = x.at(0, c, i, j);
            }
        }
    }
    CHECK(tensor_close(y, expect, 1e-12, 0.0).close);
}

TEST_CASE("dcn block equals its step-by-step composition") {
    const Tensor x = tensor_random({1, 8, 6, 6}, SeedSpec::uniform(72, -1, 1));
    const DcnBlockParams p = random_params(4, 73);
    const Tensor got = dcn_block(x, p);

    // Manual composition.
    Tensor x1({1, 4, 6, 6});
    Tensor x2({1, 4, 6, 6});
    for (std::uint32_t c = 0; c < 4; ++c) {
        for (std::uint32_t i = 0; i < 6; ++i) {
            for (std::uint32_t j = 0; j < 6; ++j) {
                x1.at(0, c, i, j) = x.at(0, c, i, j);
                x2.at(0, c, i, j) = x.at(0, c + 4, i, j);
            }
        }
    }
    const OffsetField off =
        offset_gen_conv(x2, p.offset_gen, OffsetLayout::Square, 1, 1, p.bound, {});
    const Tensor t1 = pointwise_conv(x2, p.pointwise_in);
    ConvSpec dw;
    dw.in_shape = t1.shape();
    dw.oc = 4;
    dw.padding = 1;
    dw.depthwise = true;
    dw.variant = Variant::DeformSquare;
    dw.bound = p.bound;
    const Tensor t2 = square_deform_conv(t1, p.depthwise, off, dw);
    const Tensor t3 = pointwise_conv(t2, p.pointwise_out);
    Tensor cat({1, 8, 6, 6});
    for (std::uint32_t c = 0; c < 4; ++c) {
        for (std::uint32_t i = 0; i < 6; ++i) {
            for (std::uint32_t j = 0; j < 6; ++j) {
                cat.at(0, c, i, j) = x1.at(0, c, i, j);
                cat.at(0, c + 4, i, j) = t3.at(0, c, i, j);
            }
        }
    }
    const Tensor want = channel_shuffle(cat, 2);
    CHECK(got == want);
    CHECK_THROWS_AS(dcn_block(Tensor({1, 5, 4, 4}), random_params(2, 1)), ShapeError);
}

TEST_CASE("offset generation layer") {
    const Tensor x = tensor_random({1, 2, 5, 5}, SeedSpec::uniform(80, -1, 1));

    SUBCASE("zero weights feed a standard-equivalent deform conv") {
        const Weights zero{Tensor({18, 2, 3, 3})};
        const OffsetField off = offset_gen_conv(x, zero, OffsetLayout::Full, 1, 1, {}, {});
        for (double v : off.data.data()) {
            CHECK(v == 0.0);
        }
        ConvSpec spec;
        spec.in_shape = x.shape();
        spec.oc = 2;
        spec.padding = 1;
        spec.variant = Variant::DeformRounded;
        const Weights w{tensor_random({2, 2, 3, 3}, SeedSpec::uniform(81, -1, 1))};
        ConvSpec std_spec = spec;
        std_spec.variant = Variant::Standard;
        CHECK(tensor_close(deform_conv(x, w, off, spec), standard_conv(x, w, std_spec),
                           1e-12, 0.0)
                  .close);
    }
    SUBCASE("bias-only generator yields a constant field") {
        const Weights zero{Tensor({1, 2, 3, 3})};
        const double bias[] = {2.0};
        const OffsetField off =
            offset_gen_conv(x, zero, OffsetLayout::Square, 1, 1, 7, bias);
        CHECK(off.layout == OffsetLayout::Square);
        for (double v : off.data.data()) {
            CHECK(v == 2.0);
        }
    }
    SUBCASE("clamp bound keeps every emitted value in range") {
        const Weights w{tensor_random({1, 2, 3, 3}, SeedSpec::uniform(82, -5, 5))};
        const OffsetField off = offset_gen_conv(x, w, OffsetLayout::Square, 1, 1, 7, {});
        for (double v : off.data.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 7.0);
        }
    }
    SUBCASE("channel-count mismatch is rejected") {
        const Weights bad{Tensor({4, 2, 3, 3})};
        CHECK_THROWS_AS(offset_gen_conv(x, bad, OffsetLayout::Full, 1, 1, {}, {}), ShapeError);
    }
}

TEST_CASE("symmetric quantizer") {
    SUBCASE("worked example") {
        const Tensor x({1, 1, 1, 3}, {-1.0, 0.0, 0.5});
        const Quantized q = quantize_symmetric(x, {8, {}});
        CHECK(q.scale == doctest::Approx(1.0 / 127.0).epsilon(1e-15));
        CHECK(q.codes[0] == -127);
        CHECK(q.codes[1] == 0);
        CHECK(q.codes[2] == 64); // 63.5 rounds to even
    }
    SUBCASE("all-zero input") {
        const Quantized q = quantize_symmetric(Tensor({1, 1, 2, 2}), {8, {}});
        CHECK(q.scale == 1.0);
        for (auto c : q.codes) {
            CHECK(c == 0);
        }
    }
    SUBCASE("negation flips the codes") {
        const Tensor x = tensor_random({1, 2, 4, 4}, SeedSpec::uniform(90, -3, 3));
        Tensor neg(x.shape());
        for (std::uint64_t i = 0; i < x.size(); ++i) {
            neg[i] = -x[i];
        }
        for (std::uint32_t bits : {4u, 8u, 12u}) {
            const Quantized qa = quantize_symmetric(x, {bits, {}});
            const Quantized qb = quantize_symmetric(neg, {bits, {}});
            const std::int32_t qmax = (1 << (bits - 1)) - 1;
            for (std::uint64_t i = 0; i < qa.codes.size(); ++i) {
                CHECK(qa.codes[i] == -qb.codes[i]);
                CHECK(std::abs(qa.codes[i]) <= qmax);
            }
        }
    }
    SUBCASE("dequantize reconstructs within half a step") {
        const Tensor x = tensor_random({1, 1, 6, 6}, SeedSpec::uniform(91, -2, 2));
        const Quantized q = quantize_symmetric(x, {8, {}});
        const Tensor back = q.dequantize();
        for (std::uint64_t i = 0; i < x.size(); ++i) {
            CHECK(std::abs(back[i] - x[i]) <= q.scale * 0.5 + 1e-15);
        }
    }
}

TEST_CASE("operation counts") {
    ConvSpec spec;
    spec.in_shape = {1, 256, 64, 64};
    spec.oc = 256;
    spec.padding = 1;

    SUBCASE("full 3x3 at the benchmark size") {
        const FlopsBreakdown f = flops_count(spec);
        CHECK(f.mac_flops == 4'831'838'208ull);
        CHECK(f.bilinear_flops == 0);
        // Cross-check against the reference board's latency x throughput product.
        const double product = 43.1e-3 * 112.0e9;
        CHECK(std::abs(double(f.total) - product) / product < 0.005);
    }
    SUBCASE("depthwise at the benchmark size") {
        spec.depthwise = true;
        const FlopsBreakdown f = flops_count(spec);
        CHECK(f.total == 18'874'368ull);
        const double product = 1.9e-3 * 9.7e9;
        CHECK(std::abs(double(f.total) - product) / product < 0.05);
    }
    SUBCASE("bilinear sampling overhead") {
        spec.variant = Variant::DeformBilinear;
        const FlopsBreakdown f = flops_count(spec);
        CHECK(f.bilinear_flops == 56'623'104ull);
        CHECK(f.total == f.mac_flops + f.bilinear_flops);
        for (Variant v : {Variant::DeformRounded, Variant::DeformBounded,
                          Variant::DeformSquare}) {
            spec.variant = v;
            CHECK(flops_count(spec).bilinear_flops == 0);
        }
    }
    SUBCASE("1x1 pointwise on a single pixel") {
        ConvSpec tiny;
        tiny.in_shape = {1, 1, 1, 1};
        tiny.oc = 1;
        tiny.k = 1;
        CHECK(flops_count(tiny).total == 2);
    }
    SUBCASE("batch scales every term") {
        spec.variant = Variant::DeformBilinear;
        const FlopsBreakdown one = flops_count(spec);
        spec.in_shape.n = 3;
        const FlopsBreakdown three = flops_count(spec);
        CHECK(three.mac_flops == 3 * one.mac_flops);
        CHECK(three.bilinear_flops == 3 * one.bilinear_flops);
    }
}

TEST_CASE("engine compute cycles") {
    ConvSpec spec;
    spec.in_shape = {1, 256, 64, 64};
    spec.oc = 256;
    spec.padding = 1;
    CHECK(compute_cycles(spec, EngineConfig::full_conv()) == 4'194'304ull);
    CHECK(double(compute_cycles(spec, EngineConfig::full_conv())) / (100.0 * 1e3) ==
          doctest::Approx(41.94304));

    spec.depthwise = true;
    CHECK(compute_cycles(spec, EngineConfig::depthwise()) == 65'536ull);

    ConvSpec small;
    small.in_shape = {1, 8, 10, 10};
    small.oc = 8;
    small.padding = 1;
    CHECK(compute_cycles(small, EngineConfig::full_conv()) == 100ull);

    ConvSpec big_kernel;
    big_kernel.in_shape = {1, 8, 10, 10};
    big_kernel.oc = 8;
    big_kernel.k = 5;
    CHECK_THROWS_AS(compute_cycles(big_kernel, EngineConfig::full_conv()), ConfigError);
}
