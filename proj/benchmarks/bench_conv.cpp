#include <benchmark/benchmark.h>

#include "deformsim/conv.hpp"

using namespace deformsim;

namespace {

ConvSpec make_spec(int c, int hw, Variant variant, bool depthwise) {
    ConvSpec spec;
    spec.in_shape = {1, std::uint32_t(c), std::uint32_t(hw), std::uint32_t(hw)};
    spec.oc = std::uint32_t(c);
    spec.padding = 1;
    spec.depthwise = depthwise;
    spec.variant = variant;
    spec.bound = 7;
    return spec;
}

Weights make_weights(const ConvSpec& spec, std::uint64_t seed) {
    const Shape ws = spec.depthwise ? Shape{spec.in_shape.c, 1, 3, 3}
                                    : Shape{spec.oc, spec.in_shape.c, 3, 3};
    return {tensor_random(ws, SeedSpec::uniform(seed, -1, 1))};
}

void StandardConv(benchmark::State& state) {
    const ConvSpec spec = make_spec(int(state.range(0)), 32, Variant::Standard, false);
    const Tensor x = tensor_random(spec.in_shape, SeedSpec::uniform(1, -1, 1));
    const Weights w = make_weights(spec, 2);
    for (auto _ : state) {
        Tensor y = standard_conv(x, w, spec);
        benchmark::DoNotOptimize(y.data().data());
    }
    state.SetItemsProcessed(state.iterations() * spec.out_shape().elems());
}
BENCHMARK(StandardConv)->Arg(8)->Arg(32);

void DeformConvRounded(benchmark::State& state) {
    const ConvSpec spec = make_spec(int(state.range(0)), 32, Variant::DeformRounded, false);
    const Tensor x = tensor_random(spec.in_shape, SeedSpec::uniform(3, -1, 1));
    const Weights w = make_weights(spec, 4);
    const OffsetField off{OffsetLayout::Full,
                          tensor_random({1, 18, spec.out_h(), spec.out_w()},
                                        SeedSpec::uniform(5, -7, 7))};
    for (auto _ : state) {
        Tensor y = deform_conv(x, w, off, spec);
        benchmark::DoNotOptimize(y.data().data());
    }
    state.SetItemsProcessed(state.iterations() * spec.out_shape().elems());
}
BENCHMARK(DeformConvRounded)->Arg(8)->Arg(32);

void SquareDeformDepthwise(benchmark::State& state) {
    const ConvSpec spec = make_spec(int(state.range(0)), 32, Variant::DeformSquare, true);
    const Tensor x = tensor_random(spec.in_shape, SeedSpec::uniform(6, -1, 1));
    const Weights w = make_weights(spec, 7);
    const OffsetField off{OffsetLayout::Square,
                          tensor_random({1, 1, spec.out_h(), spec.out_w()},
                                        SeedSpec::integers(8, 0, 7))};
    for (auto _ : state) {
        Tensor y = square_deform_conv(x, w, off, spec);
        benchmark::DoNotOptimize(y.data().data());
    }
    state.SetItemsProcessed(state.iterations() * spec.out_shape().elems());
}
BENCHMARK(SquareDeformDepthwise)->Arg(32)->Arg(128);

} // namespace
