#pragma once

#include "deformsim/engine.hpp"
#include "deformsim/flops.hpp"
#include "deformsim/memsim.hpp"

namespace deformsim {

// Compute and memory overlap perfectly (double buffering); a fixed fill
// covers pipeline warmup.
constexpr std::uint64_t kPipelineFillCycles = 1000;

struct SimReport {
    std::uint64_t compute_cycles = 0;
    std::uint64_t memory_cycles = 0;
    std::uint64_t total_cycles = 0; // max(compute, memory) + pipeline fill
    double latency_ms = 0.0;
    double gops = 0.0;
    MemSimResult mem;
    FlopsBreakdown flops;
};

// Full pipeline: gen_trace -> matching memory simulator -> compute_cycles.
// Deterministic: identical (spec, offsets, engine, mem) give a bit-identical
// report.
SimReport simulate(const ConvSpec& spec, const OffsetField* off,
                   const EngineConfig& engine, const MemoryConfig& mem);

// Same, for a pre-built trace.
SimReport simulate_trace(const ConvSpec& spec, const AccessTrace& trace,
                         const EngineConfig& engine, const MemoryConfig& mem);

} // namespace deformsim
