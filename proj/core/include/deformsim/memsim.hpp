#pragma once

#include "deformsim/memory.hpp"
#include "deformsim/trace.hpp"

namespace deformsim {

// Memory-side result of replaying a trace against one memory system.
struct MemSimResult {
    std::uint64_t memory_cycles = 0;
    std::uint64_t dram_transactions = 0;
    std::uint64_t dram_beats = 0;
    std::uint64_t llc_hits = 0;
    std::uint64_t llc_misses = 0;
    std::uint64_t buffer_hits = 0;
    std::uint64_t buffer_fills = 0;
    std::uint64_t port_conflicts = 0;
};

// Every access goes to DRAM in trace order; consecutive events at
// consecutive addresses merge into bursts of at most max_burst_beats.
MemSimResult sim_direct_dram(const AccessTrace& trace, const MemoryConfig& mem);

// Input reads go through the set-associative cache (seeded pseudo-random
// replacement); a miss fetches its line in a standalone DRAM transaction.
// Weights, outputs and offsets stream via DRAM as in sim_direct_dram.
MemSimResult sim_llc(const AccessTrace& trace, const MemoryConfig& mem);

// Input rows live in 2N+1 on-chip line buffers indexed row mod (2N+1); the
// first touch of a row streams it from DRAM. Within a cycle-group, distinct
// reads landing on the same line serialize: a group touching L lines with at
// most r distinct reads per line issues in ceil(r*L/ports) slots. Regular
// (Standard/Dilated) traces feed window registers instead and issue each
// group in one slot. Requires a trace whose working set provably fits the
// window: Standard, Dilated, DeformBounded or DeformSquare.
MemSimResult sim_line_buffer(const AccessTrace& trace, const MemoryConfig& mem);

// Dispatch on mem.kind.
MemSimResult sim_memory(const AccessTrace& trace, const MemoryConfig& mem);

} // namespace deformsim
