#include "deformsim/block.hpp"

namespace deformsim {

Tensor channel_shuffle(const Tensor& x, std::uint32_t groups) {
    const Shape& s = x.shape();
    if (groups == 0 || s.c % groups != 0) {
        throw ShapeError("channel_shuffle: " + std::to_string(s.c) +
                         " channels not divisible into " + std::to_string(groups) + " groups");
    }
    const std::uint32_t per_group = s.c / groups;
    Tensor y(s);
    for (std::uint32_t b = 0; b < s.n; ++b) {
        for (std::uint32_t c = 0; c < s.c; ++c) {
            // destination channel for source channel c = (g, m) is m*groups + g
            const std::uint32_t g = c / per_group;
            const std::uint32_t m = c % per_group;
            const std::uint32_t dst = m * groups + g;
            for (std::uint32_t i = 0; i < s.h; ++i) {
                for (std::uint32_t j = 0; j < s.w; ++j) {
                    y.at(b, dst, i, j) = x.at(b, c, i, j);
                }
            }
        }
    }
    return y;
}

namespace {

Tensor slice_channels(const Tensor& x, std::uint32_t begin, std::uint32_t count) {
    const Shape& s = x.shape();
    Tensor y({s.n, count, s.h, s.w});
    for (std::uint32_t b = 0; b < s.n; ++b) {
        for (std::uint32_t c = 0; c < count; ++c) {
            for (std::uint32_t i = 0; i < s.h; ++i) {
                for (std::uint32_t j = 0; j < s.w; ++j) {
                    y.at(b, c, i, j) = x.at(b, begin + c, i, j);
                }
            }
        }
    }
    return y;
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
    const Shape& sa = a.shape();
    const Shape& sb = b.shape();
    Tensor y({sa.n, sa.c + sb.c, sa.h, sa.w});
    for (std::uint32_t n = 0; n < sa.n; ++n) {
        for (std::uint32_t c = 0; c < sa.c; ++c) {
            for (std::uint32_t i = 0; i < sa.h; ++i) {
                for (std::uint32_t j = 0; j < sa.w; ++j) {
                    y.at(n, c, i, j) = a.at(n, c, i, j);
                }
            }
        }
        for (std::uint32_t c = 0; c < sb.c; ++c) {
            for (std::uint32_t i = 0; i < sa.h; ++i) {
                for (std::uint32_t j = 0; j < sa.w; ++j) {
                    y.at(n, sa.c + c, i, j) = b.at(n, c, i, j);
                }
            }
        }
    }
    return y;
}

} // namespace

Tensor dcn_block(const Tensor& x, const DcnBlockParams& params) {
    const Shape& s = x.shape();
    if (s.c % 2 != 0) {
        throw ShapeError("dcn_block needs an even channel count, got " + std::to_string(s.c));
    }
    const std::uint32_t half = s.c / 2;
    const Tensor identity = slice_channels(x, 0, half);
    const Tensor branch_in = slice_channels(x, half, half);

    const OffsetField offsets =
        offset_gen_conv(branch_in, params.offset_gen, OffsetLayout::Square,
                        /*stride=*/1, /*padding=*/1, params.bound, params.offset_bias);

    const Tensor t1 = pointwise_conv(branch_in, params.pointwise_in);

    ConvSpec dw;
    dw.in_shape = t1.shape();
    dw.oc = half;
    dw.k = 3;
    dw.stride = 1;
    dw.padding = 1;
    dw.depthwise = true;
    dw.variant = Variant::DeformSquare;
    dw.bound = params.bound;
    const Tensor t2 = square_deform_conv(t1, params.depthwise, offsets, dw);

    const Tensor t3 = pointwise_conv(t2, params.pointwise_out);

    return channel_shuffle(concat_channels(identity, t3), 2);
}

} // namespace deformsim
