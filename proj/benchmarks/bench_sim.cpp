#include <benchmark/benchmark.h>

#include "deformsim/simulate.hpp"

using namespace deformsim;

namespace {

ConvSpec bench_spec(bool depthwise, Variant variant) {
    ConvSpec spec;
    spec.in_shape = {1, 256, 64, 64};
    spec.oc = 256;
    spec.padding = 1;
    spec.depthwise = depthwise;
    spec.variant = variant;
    spec.bound = 7;
    return spec;
}

void GenTraceDeform(benchmark::State& state) {
    const ConvSpec spec = bench_spec(false, Variant::DeformBounded);
    const OffsetField off{OffsetLayout::Full,
                          tensor_random({1, 18, 64, 64}, SeedSpec::integers(7, 0, 7))};
    for (auto _ : state) {
        AccessTrace t = gen_trace(spec, &off, EngineConfig::full_conv());
        benchmark::DoNotOptimize(t.events.data());
    }
}
BENCHMARK(GenTraceDeform)->Unit(benchmark::kMillisecond);

void SimulateDirectDram(benchmark::State& state) {
    const ConvSpec spec = bench_spec(true, Variant::DeformRounded);
    const OffsetField off{OffsetLayout::Full,
                          tensor_random({1, 18, 64, 64}, SeedSpec::integers(9, -7, 7))};
    const AccessTrace t = gen_trace(spec, &off, EngineConfig::depthwise());
    const MemoryConfig mem;
    for (auto _ : state) {
        MemSimResult r = sim_direct_dram(t, mem);
        benchmark::DoNotOptimize(r.memory_cycles);
    }
}
BENCHMARK(SimulateDirectDram)->Unit(benchmark::kMillisecond);

void SimulateLlc(benchmark::State& state) {
    const ConvSpec spec = bench_spec(false, Variant::DeformRounded);
    const OffsetField off{OffsetLayout::Full,
                          tensor_random({1, 18, 64, 64}, SeedSpec::integers(9, -7, 7))};
    const AccessTrace t = gen_trace(spec, &off, EngineConfig::full_conv());
    MemoryConfig mem;
    mem.kind = MemoryKind::Llc;
    for (auto _ : state) {
        MemSimResult r = sim_llc(t, mem);
        benchmark::DoNotOptimize(r.llc_hits);
    }
}
BENCHMARK(SimulateLlc)->Unit(benchmark::kMillisecond);

void SimulateLineBufferMultiPort(benchmark::State& state) {
    const ConvSpec spec = bench_spec(true, Variant::DeformSquare);
    const OffsetField off{OffsetLayout::Square,
                          tensor_random({1, 1, 64, 64}, SeedSpec::integers(11, 0, 7))};
    const AccessTrace t = gen_trace(spec, &off, EngineConfig::depthwise());
    MemoryConfig mem;
    mem.kind = MemoryKind::LineBufferMultiPort;
    mem.line_buffer.ports = 3;
    for (auto _ : state) {
        MemSimResult r = sim_line_buffer(t, mem);
        benchmark::DoNotOptimize(r.buffer_hits);
    }
}
BENCHMARK(SimulateLineBufferMultiPort)->Unit(benchmark::kMillisecond);

} // namespace
