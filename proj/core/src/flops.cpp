#include "deformsim/flops.hpp"

namespace deformsim {

FlopsBreakdown flops_count(const ConvSpec& spec) {
    spec.validate();
    const std::uint64_t oh = spec.out_h();
    const std::uint64_t ow = spec.out_w();
    const std::uint64_t k2 = std::uint64_t(spec.k) * spec.k;
    const std::uint64_t ic = spec.in_shape.c;
    const std::uint64_t n = spec.in_shape.n;

    FlopsBreakdown f;
    f.mac_flops = 2 * oh * ow * k2 * ic * (spec.depthwise ? 1 : spec.oc) * n;
    if (spec.variant == Variant::DeformBilinear) {
        f.bilinear_flops = 6 * oh * ow * ic * k2 * n;
    }
    f.total = f.mac_flops + f.bilinear_flops;
    return f;
}

} // namespace deformsim
