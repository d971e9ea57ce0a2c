#pragma once

#include "deformsim/conv.hpp"

namespace deformsim {

// Operation counts for one convolution instance, summed over the batch.
// MACs count as 2 ops. Bilinear sampling is charged 6 multiplies per sample;
// only DeformBilinear pays it (rounded/bounded/square variants sample at
// integral locations).
struct FlopsBreakdown {
    std::uint64_t mac_flops = 0;
    std::uint64_t bilinear_flops = 0;
    std::uint64_t total = 0;

    [[nodiscard]] double total_gops() const { return double(total) * 1e-9; }
};

FlopsBreakdown flops_count(const ConvSpec& spec);

} // namespace deformsim
