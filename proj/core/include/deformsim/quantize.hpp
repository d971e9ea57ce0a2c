#pragma once

#include <optional>

#include "deformsim/tensor.hpp"

namespace deformsim {

struct QuantSpec {
    std::uint32_t bits = 8;          // in [2, 16]
    std::optional<double> scale;     // derived from max|x| when unset
};

struct Quantized {
    Shape shape;
    std::vector<std::int32_t> codes; // in [-(2^(bits-1)-1), +(2^(bits-1)-1)]
    double scale = 1.0;

    [[nodiscard]] Tensor dequantize() const;
};

// Symmetric uniform quantizer. scale = max|x| / (2^(bits-1)-1) when unset
// (1.0 for an all-zero tensor); codes = clamp(round-half-to-even(x / scale)).
Quantized quantize_symmetric(const Tensor& x, const QuantSpec& q);

} // namespace deformsim
