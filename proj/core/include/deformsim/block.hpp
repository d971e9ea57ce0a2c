#pragma once

#include <vector>

#include "deformsim/conv.hpp"

namespace deformsim {

// Channel shuffle with the given group count: view channels as
// (groups, c/groups), transpose, flatten. groups=2 on [0,1,2,3] -> [0,2,1,3].
Tensor channel_shuffle(const Tensor& x, std::uint32_t groups);

// ---------------------------------------------------------------------------
// Building block: split channels in half, keep the first half, transform the
// second half with pointwise -> depthwise 3x3 DeformSquare -> pointwise,
// concatenate, shuffle with 2 groups. Offsets come from offset_gen_conv on
// the transform-branch input. Spatial dims are preserved (stride 1, pad 1).
// ---------------------------------------------------------------------------
struct DcnBlockParams {
    Weights pointwise_in;     // (c/2, c/2, 1, 1)
    Weights depthwise;        // (c/2, 1, 3, 3)
    Weights pointwise_out;    // (c/2, c/2, 1, 1)
    Weights offset_gen;       // (1, c/2, 3, 3), Square layout
    std::vector<double> offset_bias; // optional, length 1
    std::uint32_t bound = 7;  // N for the square deform conv
};

Tensor dcn_block(const Tensor& x, const DcnBlockParams& params);

} // namespace deformsim
