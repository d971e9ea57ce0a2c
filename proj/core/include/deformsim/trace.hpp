#pragma once

#include <iosfwd>
#include <map>
#include <vector>

#include "deformsim/conv.hpp"
#include "deformsim/engine.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Memory access trace of one convolution on the engine.
//
// Address map (byte addresses, elem_bytes-wide elements):
//   inputs  at 0x0000'0000, stored padded, channels innermost:
//           ((y_p * w_p + x_p) * ic + c) — one packed word per ic-group
//   weights at 0x4000'0000, row-major (oc, ic, k, k), streamed sequentially
//   outputs at 0x8000'0000, channels innermost ((i * ow + j) * oc + o)
//   offsets at 0xc000'0000, per-position values contiguous
//
// Event order is output-stationary: for each output position (row-major),
// offset reads, then the k^2 in-bounds input reads per ic-group, then one
// output write per oc-group. The weight stream is amortized once per layer
// and appended after the position stream (it flows on its own port).
// A cycle-group spans the taps of one (position, ic-group) pair.
// ---------------------------------------------------------------------------
enum class EventKind { InputRead, WeightRead, OutputWrite, OffsetRead };

[[nodiscard]] const char* event_kind_name(EventKind k);

struct AccessEvent {
    EventKind kind;
    std::uint64_t address;
    std::int32_t row;    // padded input row for input reads, output row for
                         // writes/offsets, -1 for weights
    std::uint32_t group; // cycle-group id; 0 for the weight stream
};

struct AccessTrace {
    std::vector<AccessEvent> events;

    // Geometry the memory simulators need.
    Variant variant = Variant::Standard;
    bool depthwise = false;
    std::uint32_t k = 3;
    std::uint32_t stride = 1;
    std::uint32_t elem_bytes = 1;
    std::uint32_t input_word_bytes = 1;
    std::uint32_t weight_word_bytes = 1;
    std::uint32_t output_word_bytes = 1;
    std::uint32_t offset_word_bytes = 1;
    std::uint32_t padded_h = 0;         // input rows, padding included
    std::uint32_t padded_w = 0;         // input columns, padding included
    std::uint32_t pixel_bytes = 1;      // bytes per padded pixel (all channels)
    std::uint32_t interior_margin = 0;  // border width outside which every
                                        // window reaching a pixel exists
    std::uint64_t row_bytes = 0;        // bytes of one padded input row
    std::uint64_t input_base = 0;
    std::uint64_t input_item_bytes = 0; // per-batch-item input region size

    [[nodiscard]] std::uint32_t word_bytes(EventKind kind) const;
    [[nodiscard]] std::uint64_t count(EventKind kind) const;
};

// Builds the trace. Deformable variants need an offset field with integral
// values (round_offsets first); DeformBilinear cannot be traced. Bounded and
// Square offsets are clamped to [0, N] as the engine would.
AccessTrace gen_trace(const ConvSpec& spec, const OffsetField* off,
                      const EngineConfig& engine);

// Text dump, one event per line: <seq> <kind> <address-hex> <row> <group>.
void dump_trace(const AccessTrace& trace, std::ostream& os, std::uint64_t limit);

// ---------------------------------------------------------------------------
// Input reuse statistics over interior addresses (those far enough from the
// image border that every kernel window reaching them exists).
// ---------------------------------------------------------------------------
struct ReuseStats {
    double mean_uses = 0.0;
    std::uint64_t interior_addresses = 0;
    std::map<std::uint64_t, std::uint64_t> histogram; // uses -> address count
};

ReuseStats reuse_stats(const AccessTrace& trace);

} // namespace deformsim
