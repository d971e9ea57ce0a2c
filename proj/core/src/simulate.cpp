#include "deformsim/simulate.hpp"

namespace deformsim {

SimReport simulate_trace(const ConvSpec& spec, const AccessTrace& trace,
                         const EngineConfig& engine, const MemoryConfig& mem) {
    SimReport rep;
    rep.compute_cycles = compute_cycles(spec, engine);
    rep.mem = sim_memory(trace, mem);
    rep.memory_cycles = rep.mem.memory_cycles;
    rep.total_cycles = std::max(rep.compute_cycles, rep.memory_cycles) + kPipelineFillCycles;
    rep.latency_ms = double(rep.total_cycles) / (engine.clock_mhz * 1e3);
    rep.flops = flops_count(spec);
    rep.gops = double(rep.flops.total) / (rep.latency_ms * 1e6);
    return rep;
}

SimReport simulate(const ConvSpec& spec, const OffsetField* off,
                   const EngineConfig& engine, const MemoryConfig& mem) {
    const AccessTrace trace = gen_trace(spec, off, engine);
    return simulate_trace(spec, trace, engine, mem);
}

} // namespace deformsim
