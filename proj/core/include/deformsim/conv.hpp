#pragma once

#include <optional>
#include <string>

#include "deformsim/tensor.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Convolution variants.
//
//   Standard        fixed 3x3 grid
//   Dilated         fixed grid, dilation d
//   DeformBilinear  per-tap fractional offsets, bilinear sampling
//   DeformRounded   offsets rounded to integers before sampling
//   DeformBounded   rounded offsets clamped to [0, N]
//   DeformSquare    one dilation value per output location, clamped to [0, N]
// ---------------------------------------------------------------------------
enum class Variant {
    Standard,
    Dilated,
    DeformBilinear,
    DeformRounded,
    DeformBounded,
    DeformSquare,
};

[[nodiscard]] std::string variant_name(Variant v);
[[nodiscard]] bool variant_is_deformable(Variant v);

struct ConvSpec {
    Shape in_shape{};      // (n, ic, h, w)
    std::uint32_t oc = 1;
    std::uint32_t k = 3;   // odd
    std::uint32_t stride = 1;
    std::uint32_t padding = 0;
    bool depthwise = false;
    Variant variant = Variant::Standard;
    std::uint32_t dilation = 1; // Dilated only
    std::uint32_t bound = 7;    // N for DeformBounded / DeformSquare

    [[nodiscard]] std::uint32_t effective_k() const {
        return variant == Variant::Dilated ? (k - 1) * dilation + 1 : k;
    }
    [[nodiscard]] std::uint32_t out_h() const;
    [[nodiscard]] std::uint32_t out_w() const;
    [[nodiscard]] Shape out_shape() const {
        return {in_shape.n, depthwise ? in_shape.c : oc, out_h(), out_w()};
    }
    void validate() const;
};

// ---------------------------------------------------------------------------
// Per-output-location sampling displacements.
//
// Full layout: (n, 2*k^2, oh, ow). Channel order per kernel point p (row-
// major over the k x k grid): channel 2p holds dp_y, channel 2p+1 holds dp_x.
// Square layout: (n, 1, oh, ow), the per-location dilation dp_d.
// ---------------------------------------------------------------------------
enum class OffsetLayout { Full, Square };

struct OffsetField {
    OffsetLayout layout = OffsetLayout::Full;
    Tensor data;

    [[nodiscard]] double dy(std::uint32_t n, std::uint32_t point,
                            std::uint32_t i, std::uint32_t j) const {
        return data.at(n, 2 * point, i, j);
    }
    [[nodiscard]] double dx(std::uint32_t n, std::uint32_t point,
                            std::uint32_t i, std::uint32_t j) const {
        return data.at(n, 2 * point + 1, i, j);
    }
    [[nodiscard]] double dilation(std::uint32_t n, std::uint32_t i, std::uint32_t j) const {
        return data.at(n, 0, i, j);
    }

    // Checks channel count (2k^2 or 1) and spatial extents against spec.
    void validate_for(const ConvSpec& spec) const;
};

// Weight tensor: full (oc, ic, k, k), depthwise (ic, 1, k, k),
// pointwise (oc, ic, 1, 1).
struct Weights {
    Tensor data;

    [[nodiscard]] double at(std::uint32_t o, std::uint32_t c,
                            std::uint32_t u, std::uint32_t v) const {
        return data.at(o, c, u, v);
    }
    void validate_for(const ConvSpec& spec) const;
};

// ---------------------------------------------------------------------------
// Sampling primitives.
// ---------------------------------------------------------------------------

// Read-only view of one (n, c) plane; (y, x) = (row, column).
struct PlaneView {
    const double* data = nullptr;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;

    [[nodiscard]] double at(std::int64_t y, std::int64_t x) const {
        if (y < 0 || x < 0 || y >= std::int64_t(rows) || x >= std::int64_t(cols)) {
            return 0.0;
        }
        return data[std::uint64_t(y) * cols + x];
    }
};

[[nodiscard]] PlaneView plane(const Tensor& t, std::uint32_t n, std::uint32_t c);

// Bilinear interpolation at fractional (x, y); out-of-plane neighbours
// contribute zero. Exactly-integral coordinates return the stored value with
// no interpolation arithmetic. NaN coordinates are an error.
double bilinear_sample(const PlaneView& p, double x, double y);

// ---------------------------------------------------------------------------
// Offset transforms.
// ---------------------------------------------------------------------------

// Round half away from zero, elementwise. Idempotent.
OffsetField round_offsets(const OffsetField& off);

// Clamp every value to [0, N]. Idempotent.
OffsetField clamp_offsets(const OffsetField& off, std::uint32_t bound);

// ---------------------------------------------------------------------------
// Convolutions. All use zero padding and are deterministic: accumulation
// runs in a fixed sequential order per output element.
// ---------------------------------------------------------------------------

// Standard / Dilated (spec.variant selects); honours spec.depthwise.
Tensor standard_conv(const Tensor& x, const Weights& w, const ConvSpec& spec);

// DeformBilinear / DeformRounded / DeformBounded with a Full-layout field.
// Sampling location = dilation-1 grid point + (dp_y, dp_x).
Tensor deform_conv(const Tensor& x, const Weights& w, const OffsetField& off,
                   const ConvSpec& spec);

// DeformSquare with a Square-layout field. dp_d is rounded half away from
// zero and clamped to [0, N] before use; sample points are
// center + dp_d * (u - k/2, v - k/2), so dp_d = 0 collapses the kernel onto
// the window center and dp_d = 1 reproduces the regular grid.
Tensor square_deform_conv(const Tensor& x, const Weights& w, const OffsetField& off,
                          const ConvSpec& spec);

// 1x1 channel mixing; weights (oc, ic, 1, 1).
Tensor pointwise_conv(const Tensor& x, const Weights& w);

// Offset generation layer: a k=3 standard conv over x (optionally with a
// per-channel bias), clamped to [0, clamp_bound] when set, wrapped as an
// OffsetField of the requested layout. Weight output channels must be 2*k^2
// (Full) or 1 (Square).
OffsetField offset_gen_conv(const Tensor& x, const Weights& w, OffsetLayout layout,
                            std::uint32_t stride, std::uint32_t padding,
                            std::optional<std::uint32_t> clamp_bound,
                            std::span<const double> bias = {});

// Variant dispatch used by the CLI and validation suite.
Tensor apply_conv(const Tensor& x, const Weights& w,
                  const OffsetField* off, const ConvSpec& spec);

} // namespace deformsim
