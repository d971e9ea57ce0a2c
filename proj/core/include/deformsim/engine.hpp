#pragma once

#include "deformsim/conv.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Compute engine: a MAC array processing par_ic input channels x par_oc
// output channels x par_taps kernel taps per cycle. Full 3x3 convolutions
// default to 8x8x9, depthwise to 16x1x9 (16 channels in parallel).
// elem_bytes is the datapath element width used for trace addresses
// (1 byte: quantized inference).
// ---------------------------------------------------------------------------
struct EngineConfig {
    std::uint32_t par_ic = 8;
    std::uint32_t par_oc = 8;
    std::uint32_t par_taps = 9;
    double clock_mhz = 100.0;
    std::uint32_t elem_bytes = 1;

    static EngineConfig full_conv() { return {}; }
    static EngineConfig depthwise() { return {16, 1, 9, 100.0, 1}; }
    static EngineConfig defaults_for(bool depthwise_conv) {
        return depthwise_conv ? depthwise() : full_conv();
    }

    void validate() const;
};

// Cycles to compute one conv on the engine, batch included. The k*k taps of
// one window are consumed in a single cycle (requires k^2 <= par_taps):
//   full:      oh * ow * ceil(ic/par_ic) * ceil(oc/par_oc)
//   depthwise: oh * ow * ceil(ic/par_ic)
std::uint64_t compute_cycles(const ConvSpec& spec, const EngineConfig& engine);

} // namespace deformsim
