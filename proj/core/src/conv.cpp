#include "deformsim/conv.hpp"

#include <cmath>

namespace deformsim {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::Standard: return "standard";
        case Variant::Dilated: return "dilated";
        case Variant::DeformBilinear: return "bilinear";
        case Variant::DeformRounded: return "rounded";
        case Variant::DeformBounded: return "bounded";
        case Variant::DeformSquare: return "square";
    }
    return "?";
}

bool variant_is_deformable(Variant v) {
    return v == Variant::DeformBilinear || v == Variant::DeformRounded ||
           v == Variant::DeformBounded || v == Variant::DeformSquare;
}

namespace {

std::uint32_t out_extent(std::uint32_t in, std::uint32_t pad, std::uint32_t eff_k,
                         std::uint32_t stride) {
    const std::int64_t span = std::int64_t(in) + 2 * std::int64_t(pad) - std::int64_t(eff_k);
    if (span < 0 || stride == 0) {
        return 0;
    }
    return std::uint32_t(span / stride + 1);
}

} // namespace

std::uint32_t ConvSpec::out_h() const {
    return out_extent(in_shape.h, padding, effective_k(), stride);
}

std::uint32_t ConvSpec::out_w() const {
    return out_extent(in_shape.w, padding, effective_k(), stride);
}

void ConvSpec::validate() const {
    in_shape.validate();
    if (k == 0 || k % 2 == 0) {
        throw ShapeError("kernel size must be odd, got " + std::to_string(k));
    }
    if (stride == 0) {
        throw ShapeError("stride must be >= 1");
    }
    if (depthwise && oc != in_shape.c) {
        throw ShapeError("depthwise requires oc == ic (" + std::to_string(oc) +
                         " vs " + std::to_string(in_shape.c) + ")");
    }
    if (variant == Variant::Dilated && dilation < 1) {
        throw ShapeError("dilation must be >= 1");
    }
    if ((variant == Variant::DeformBounded || variant == Variant::DeformSquare) && bound < 1) {
        throw ShapeError("offset bound must be >= 1");
    }
    if (out_h() == 0 || out_w() == 0) {
        throw ShapeError("empty output for input " + in_shape.str() + ", k=" +
                         std::to_string(effective_k()) + ", stride=" + std::to_string(stride) +
                         ", padding=" + std::to_string(padding));
    }
}

void OffsetField::validate_for(const ConvSpec& spec) const {
    const Shape& s = data.shape();
    const std::uint32_t want_c = layout == OffsetLayout::Full ? 2 * spec.k * spec.k : 1;
    if (s.c != want_c) {
        throw ShapeError("offset field has " + std::to_string(s.c) + " channels, expected " +
                         std::to_string(want_c));
    }
    if (s.n != spec.in_shape.n || s.h != spec.out_h() || s.w != spec.out_w()) {
        throw ShapeError("offset field shape " + s.str() + " does not match output " +
                         spec.out_shape().str());
    }
}

void Weights::validate_for(const ConvSpec& spec) const {
    const Shape& s = data.shape();
    const bool ok = spec.depthwise
        ? (s.n == spec.in_shape.c && s.c == 1 && s.h == spec.k && s.w == spec.k)
        : (s.n == spec.oc && s.c == spec.in_shape.c && s.h == spec.k && s.w == spec.k);
    if (!ok) {
        throw ShapeError("weight shape " + s.str() + " inconsistent with conv spec (" +
                         std::string(spec.depthwise ? "depthwise" : "full") + ", k=" +
                         std::to_string(spec.k) + ")");
    }
}

PlaneView plane(const Tensor& t, std::uint32_t n, std::uint32_t c) {
    const Shape& s = t.shape();
    return {t.data().data() + t.index(n, c, 0, 0), s.h, s.w};
}

double bilinear_sample(const PlaneView& p, double x, double y) {
    if (std::isnan(x) || std::isnan(y)) {
        throw Error("bilinear_sample: NaN coordinate");
    }
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    if (fx == x && fy == y) {
        // Integral coordinate: return the stored value untouched.
        return p.at(std::int64_t(fy), std::int64_t(fx));
    }
    const auto x0 = std::int64_t(fx);
    const auto y0 = std::int64_t(fy);
    const double ax = x - fx;
    const double ay = y - fy;
    const double top = (1.0 - ax) * p.at(y0, x0) + ax * p.at(y0, x0 + 1);
    const double bot = (1.0 - ax) * p.at(y0 + 1, x0) + ax * p.at(y0 + 1, x0 + 1);
    return (1.0 - ay) * top + ay * bot;
}

OffsetField round_offsets(const OffsetField& off) {
    OffsetField out = off;
    for (double& v : out.data.data()) {
        v = std::round(v); // half away from zero
    }
    return out;
}

OffsetField clamp_offsets(const OffsetField& off, std::uint32_t bound) {
    if (bound < 1) {
        throw Error("clamp_offsets: bound must be >= 1");
    }
    OffsetField out = off;
    const double hi = double(bound);
    for (double& v : out.data.data()) {
        v = std::min(std::max(v, 0.0), hi);
    }
    return out;
}

Tensor standard_conv(const Tensor& x, const Weights& w, const ConvSpec& spec) {
    if (spec.variant != Variant::Standard && spec.variant != Variant::Dilated) {
        throw ShapeError("standard_conv requires Standard or Dilated variant");
    }
    spec.validate();
    if (x.shape() != spec.in_shape) {
        throw ShapeError("input shape " + x.shape().str() + " != spec " + spec.in_shape.str());
    }
    w.validate_for(spec);

    const std::uint32_t oh = spec.out_h();
    const std::uint32_t ow = spec.out_w();
    const std::uint32_t ic = spec.in_shape.c;
    const std::uint32_t oc = spec.depthwise ? ic : spec.oc;
    const auto d = std::int64_t(spec.variant == Variant::Dilated ? spec.dilation : 1);
    const auto pad = std::int64_t(spec.padding);
    const auto s = std::int64_t(spec.stride);

    Tensor y(spec.out_shape());
    for (std::uint32_t b = 0; b < spec.in_shape.n; ++b) {
        for (std::uint32_t o = 0; o < oc; ++o) {
            const std::uint32_t c_begin = spec.depthwise ? o : 0;
            const std::uint32_t c_end = spec.depthwise ? o + 1 : ic;
            for (std::uint32_t i = 0; i < oh; ++i) {
                for (std::uint32_t j = 0; j < ow; ++j) {
                    double acc = 0.0;
                    for (std::uint32_t c = c_begin; c < c_end; ++c) {
                        const PlaneView in = plane(x, b, c);
                        const std::uint32_t wc = spec.depthwise ? 0 : c;
                        for (std::uint32_t u = 0; u < spec.k; ++u) {
                            const std::int64_t yy = std::int64_t(i) * s + std::int64_t(u) * d - pad;
                            for (std::uint32_t v = 0; v < spec.k; ++v) {
                                const std::int64_t xx =
                                    std::int64_t(j) * s + std::int64_t(v) * d - pad;
                                acc += w.at(o, wc, u, v) * in.at(yy, xx);
                            }
                        }
                    }
                    y.at(b, o, i, j) = acc;
                }
            }
        }
    }
    return y;
}

Tensor deform_conv(const Tensor& x, const Weights& w, const OffsetField& off,
                   const ConvSpec& spec) {
    if (spec.variant != Variant::DeformBilinear && spec.variant != Variant::DeformRounded &&
        spec.variant != Variant::DeformBounded) {
        throw ShapeError("deform_conv requires a Full-layout deformable variant");
    }
    if (off.layout != OffsetLayout::Full) {
        throw ShapeError("deform_conv requires a Full offset layout");
    }
    spec.validate();
    if (x.shape() != spec.in_shape) {
        throw ShapeError("input shape " + x.shape().str() + " != spec " + spec.in_shape.str());
    }
    w.validate_for(spec);
    off.validate_for(spec);

    OffsetField eff = off;
    if (spec.variant == Variant::DeformRounded || spec.variant == Variant::DeformBounded) {
        eff = round_offsets(eff);
    }
    if (spec.variant == Variant::DeformBounded) {
        eff = clamp_offsets(eff, spec.bound);
    }

    const std::uint32_t oh = spec.out_h();
    const std::uint32_t ow = spec.out_w();
    const std::uint32_t ic = spec.in_shape.c;
    const std::uint32_t oc = spec.depthwise ? ic : spec.oc;
    const auto pad = std::int64_t(spec.padding);
    const auto s = std::int64_t(spec.stride);

    Tensor y(spec.out_shape());
    for (std::uint32_t b = 0; b < spec.in_shape.n; ++b) {
        for (std::uint32_t o = 0; o < oc; ++o) {
            const std::uint32_t c_begin = spec.depthwise ? o : 0;
            const std::uint32_t c_end = spec.depthwise ? o + 1 : ic;
            for (std::uint32_t i = 0; i < oh; ++i) {
                for (std::uint32_t j = 0; j < ow; ++j) {
                    double acc = 0.0;
                    for (std::uint32_t c = c_begin; c < c_end; ++c) {
                        const PlaneView in = plane(x, b, c);
                        const std::uint32_t wc = spec.depthwise ? 0 : c;
                        for (std::uint32_t u = 0; u < spec.k; ++u) {
                            for (std::uint32_t v = 0; v < spec.k; ++v) {
                                const std::uint32_t point = u * spec.k + v;
                                const double sy = double(std::int64_t(i) * s +
                                                         std::int64_t(u) - pad) +
                                                  eff.dy(b, point, i, j);
                                const double sx = double(std::int64_t(j) * s +
                                                         std::int64_t(v) - pad) +
                                                  eff.dx(b, point, i, j);
                                acc += w.at(o, wc, u, v) * bilinear_sample(in, sx, sy);
                            }
                        }
                    }
                    y.at(b, o, i, j) = acc;
                }
            }
        }
    }
    return y;
}

Tensor square_deform_conv(const Tensor& x, const Weights& w, const OffsetField& off,
                          const ConvSpec& spec) {
    if (spec.variant != Variant::DeformSquare) {
        throw ShapeError("square_deform_conv requires the DeformSquare variant");
    }
    if (off.layout != OffsetLayout::Square) {
        throw ShapeError("square_deform_conv requires a Square offset layout");
    }
    spec.validate();
    if (x.shape() != spec.in_shape) {
        throw ShapeError("input shape " + x.shape().str() + " != spec " + spec.in_shape.str());
    }
    w.validate_for(spec);
    off.validate_for(spec);

    const OffsetField eff = clamp_offsets(round_offsets(off), spec.bound);

    const std::uint32_t oh = spec.out_h();
    const std::uint32_t ow = spec.out_w();
    const std::uint32_t ic = spec.in_shape.c;
    const std::uint32_t oc = spec.depthwise ? ic : spec.oc;
    const auto pad = std::int64_t(spec.padding);
    const auto s = std::int64_t(spec.stride);
    const auto half = std::int64_t(spec.k / 2);

    Tensor y(spec.out_shape());
    for (std::uint32_t b = 0; b < spec.in_shape.n; ++b) {
        for (std::uint32_t o = 0; o < oc; ++o) {
            const std::uint32_t c_begin = spec.depthwise ? o : 0;
            const std::uint32_t c_end = spec.depthwise ? o + 1 : ic;
            for (std::uint32_t i = 0; i < oh; ++i) {
                for (std::uint32_t j = 0; j < ow; ++j) {
                    const auto dd = std::int64_t(eff.dilation(b, i, j));
                    const std::int64_t cy = std::int64_t(i) * s + half - pad;
                    const std::int64_t cx = std::int64_t(j) * s + half - pad;
                    double acc = 0.0;
                    for (std::uint32_t c = c_begin; c < c_end; ++c) {
                        const PlaneView in = plane(x, b, c);
                        const std::uint32_t wc = spec.depthwise ? 0 : c;
                        for (std::uint32_t u = 0; u < spec.k; ++u) {
                            const std::int64_t yy = cy + dd * (std::int64_t(u) - half);
                            for (std::uint32_t v = 0; v < spec.k; ++v) {
                                const std::int64_t xx = cx + dd * (std::int64_t(v) - half);
                                acc += w.at(o, wc, u, v) * in.at(yy, xx);
                            }
                        }
                    }
                    y.at(b, o, i, j) = acc;
                }
            }
        }
    }
    return y;
}

Tensor pointwise_conv(const Tensor& x, const Weights& w) {
    const Shape& ws = w.data.shape();
    if (ws.h != 1 || ws.w != 1 || ws.c != x.shape().c) {
        throw ShapeError("pointwise weights must be (oc, ic, 1, 1) with ic == input channels, got " +
                         ws.str());
    }
    ConvSpec spec;
    spec.in_shape = x.shape();
    spec.oc = ws.n;
    spec.k = 1;
    spec.stride = 1;
    spec.padding = 0;
    return standard_conv(x, w, spec);
}

OffsetField offset_gen_conv(const Tensor& x, const Weights& w, OffsetLayout layout,
                            std::uint32_t stride, std::uint32_t padding,
                            std::optional<std::uint32_t> clamp_bound,
                            std::span<const double> bias) {
    constexpr std::uint32_t k = 3;
    const std::uint32_t want_c = layout == OffsetLayout::Full ? 2 * k * k : 1;
    const Shape& ws = w.data.shape();
    if (ws.n != want_c || ws.h != k || ws.w != k || ws.c != x.shape().c) {
        throw ShapeError("offset generation weights must be (" + std::to_string(want_c) + ", " +
                         std::to_string(x.shape().c) + ", 3, 3), got " + ws.str());
    }
    if (!bias.empty() && bias.size() != want_c) {
        throw ShapeError("offset bias length " + std::to_string(bias.size()) + " != " +
                         std::to_string(want_c));
    }

    ConvSpec spec;
    spec.in_shape = x.shape();
    spec.oc = want_c;
    spec.k = k;
    spec.stride = stride;
    spec.padding = padding;
    Tensor raw = standard_conv(x, w, spec);
    if (!bias.empty()) {
        const Shape& os = raw.shape();
        for (std::uint32_t b = 0; b < os.n; ++b) {
            for (std::uint32_t c = 0; c < os.c; ++c) {
                for (std::uint32_t i = 0; i < os.h; ++i) {
                    for (std::uint32_t j = 0; j < os.w; ++j) {
                        raw.at(b, c, i, j) += bias[c];
                    }
                }
            }
        }
    }

    OffsetField field{layout, std::move(raw)};
    if (clamp_bound) {
        field = clamp_offsets(field, *clamp_bound);
    }
    return field;
}

Tensor apply_conv(const Tensor& x, const Weights& w, const OffsetField* off,
                  const ConvSpec& spec) {
    switch (spec.variant) {
        case Variant::Standard:
        case Variant::Dilated:
            return standard_conv(x, w, spec);
        case Variant::DeformSquare:
            if (!off) {
                throw ShapeError("DeformSquare needs an offset field");
            }
            return square_deform_conv(x, w, *off, spec);
        default:
            if (!off) {
                throw ShapeError("deformable variants need an offset field");
            }
            return deform_conv(x, w, *off, spec);
    }
}

} // namespace deformsim
