#include "deformsim/quantize.hpp"

#include <cmath>

namespace deformsim {

namespace {

// Round half to even, independent of the floating-point environment.
double round_half_even(double v) {
    const double f = std::floor(v);
    const double frac = v - f;
    if (frac > 0.5) {
        return f + 1.0;
    }
    if (frac < 0.5) {
        return f;
    }
    return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

} // namespace

Tensor Quantized::dequantize() const {
    Tensor t(shape);
    auto out = t.data();
    for (std::uint64_t i = 0; i < codes.size(); ++i) {
        out[i] = double(codes[i]) * scale;
    }
    return t;
}

Quantized quantize_symmetric(const Tensor& x, const QuantSpec& q) {
    if (q.bits < 2 || q.bits > 16) {
        throw Error("quantize_symmetric: bits must be in [2, 16]");
    }
    const double qmax = double((1 << (q.bits - 1)) - 1);

    double scale;
    if (q.scale) {
        if (*q.scale <= 0.0) {
            throw Error("quantize_symmetric: scale must be positive");
        }
        scale = *q.scale;
    } else {
        double max_abs = 0.0;
        for (double v : x.data()) {
            max_abs = std::max(max_abs, std::abs(v));
        }
        scale = max_abs == 0.0 ? 1.0 : max_abs / qmax;
    }

    Quantized out;
    out.shape = x.shape();
    out.scale = scale;
    out.codes.reserve(x.size());
    for (double v : x.data()) {
        const double r = round_half_even(v / scale);
        out.codes.push_back(std::int32_t(std::min(std::max(r, -qmax), qmax)));
    }
    return out;
}

} // namespace deformsim
