#pragma once

#include <cstdint>
#include <string>

#include "deformsim/error.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Memory-system configurations evaluated by the simulator.
//
//   DirectDram          every access goes to DRAM; consecutive addresses
//                       merge into bursts
//   Llc                 input reads go through a shared last-level cache
//                       (1 MB, 16-way, seeded pseudo-random replacement)
//   LineBuffer          input rows cached in 2N+1 on-chip line buffers,
//                       one read port
//   LineBufferMultiPort same, three ports over different line buffers
//
// Weights, outputs and offset streams always use plain DRAM ports.
// ---------------------------------------------------------------------------
enum class MemoryKind { DirectDram, Llc, LineBuffer, LineBufferMultiPort };

[[nodiscard]] std::string memory_kind_name(MemoryKind k);

struct DramConfig {
    std::uint32_t first_access_cycles = 30;
    std::uint32_t per_beat_cycles = 1;
    std::uint32_t max_burst_beats = 16;
    std::uint32_t bus_bytes = 8;
};

struct LlcConfig {
    std::uint64_t capacity_bytes = 1u << 20;
    std::uint32_t ways = 16;
    std::uint32_t line_bytes = 64;
    // ACP round-trip cost per hit: cheaper than an isolated DRAM access,
    // pricier than a streamed burst beat, so caching pays off only for
    // irregular reads.
    std::uint32_t hit_cycles = 22;
    std::uint64_t replacement_seed = 1;
};

struct LineBufferConfig {
    std::uint32_t bound = 7;      // N; the buffer holds 2N+1 input rows
    std::uint32_t ports = 1;      // 1 or 3
    std::uint32_t hit_cycles = 1; // on-chip read latency

    [[nodiscard]] std::uint32_t lines() const { return 2 * bound + 1; }
};

struct MemoryConfig {
    MemoryKind kind = MemoryKind::DirectDram;
    DramConfig dram;
    LlcConfig llc;
    LineBufferConfig line_buffer;

    void validate() const;
};

} // namespace deformsim
