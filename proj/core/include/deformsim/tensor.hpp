#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "deformsim/error.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Shape of a dense 4-D tensor (batch, channels, rows, columns).
// ---------------------------------------------------------------------------
struct Shape {
    std::uint32_t n = 1;
    std::uint32_t c = 1;
    std::uint32_t h = 1;
    std::uint32_t w = 1;

    [[nodiscard]] std::uint64_t elems() const {
        return std::uint64_t(n) * c * h * w;
    }
    bool operator==(const Shape&) const = default;

    // Throws ShapeError on a zero extent or an element count that does not
    // fit in 64 bits.
    void validate() const;
    [[nodiscard]] std::string str() const;
};

// ---------------------------------------------------------------------------
// Dense row-major tensor of doubles, w fastest, then h, then c, then n.
// Immutable by convention after it leaves the producing operation.
// ---------------------------------------------------------------------------
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Shape shape, double fill = 0.0);
    Tensor(Shape shape, std::vector<double> values);

    [[nodiscard]] const Shape& shape() const { return shape_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] std::span<double> data() { return data_; }

    [[nodiscard]] std::uint64_t size() const { return data_.size(); }

    double operator[](std::uint64_t flat) const { return data_[flat]; }
    double& operator[](std::uint64_t flat) { return data_[flat]; }

    [[nodiscard]] std::uint64_t index(std::uint32_t n, std::uint32_t c,
                                      std::uint32_t y, std::uint32_t x) const {
        return ((std::uint64_t(n) * shape_.c + c) * shape_.h + y) * shape_.w + x;
    }
    [[nodiscard]] double at(std::uint32_t n, std::uint32_t c,
                            std::uint32_t y, std::uint32_t x) const {
        return data_[index(n, c, y, x)];
    }
    [[nodiscard]] double& at(std::uint32_t n, std::uint32_t c,
                             std::uint32_t y, std::uint32_t x) {
        return data_[index(n, c, y, x)];
    }

    bool operator==(const Tensor&) const = default;

private:
    Shape shape_{};
    std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Deterministic generation. Identical SeedSpec -> identical tensor on every
// platform: xorshift64-star stream seeded through splitmix64, reals mapped
// via (x >> 11) * 2^-53.
// ---------------------------------------------------------------------------
struct SeedSpec {
    enum class Dist { Uniform, Integers };

    std::uint64_t seed = 0;
    Dist dist = Dist::Uniform;
    double lo = 0.0;
    double hi = 1.0; // Integers: inclusive upper bound

    static SeedSpec uniform(std::uint64_t seed, double lo, double hi) {
        return {seed, Dist::Uniform, lo, hi};
    }
    static SeedSpec integers(std::uint64_t seed, std::int64_t lo, std::int64_t hi) {
        return {seed, Dist::Integers, double(lo), double(hi)};
    }
};

// The raw generator, exposed because the memory simulators reuse it for
// seeded replacement decisions.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed);
    std::uint64_t next_u64();
    // Uniform in [0, 1).
    double next_real();

private:
    std::uint64_t state_;
};

Tensor tensor_random(Shape shape, const SeedSpec& spec);

// ---------------------------------------------------------------------------
// Comparison with symmetric relative tolerance:
//   |a_i - b_i| <= abs_tol + rel_tol * max(|a_i|, |b_i|)
// ---------------------------------------------------------------------------
struct CloseReport {
    bool close = true;
    std::uint64_t first_mismatch = 0;
    double a_value = 0.0;
    double b_value = 0.0;
    double max_abs_diff = 0.0;

    explicit operator bool() const { return close; }
    [[nodiscard]] std::string str() const;
};

CloseReport tensor_close(const Tensor& a, const Tensor& b,
                         double rel_tol = 1e-12, double abs_tol = 0.0);

} // namespace deformsim
