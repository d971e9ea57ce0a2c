#include "deformsim/tensor.hpp"

#include <cmath>
#include <sstream>

namespace deformsim {

void Shape::validate() const {
    if (n == 0 || c == 0 || h == 0 || w == 0) {
        throw ShapeError("invalid shape " + str() + ": zero extent");
    }
    std::uint64_t total = n;
    for (std::uint64_t e : {std::uint64_t(c), std::uint64_t(h), std::uint64_t(w)}) {
        if (total > UINT64_MAX / e) {
            throw ShapeError("invalid shape " + str() + ": element count overflows 64 bits");
        }
        total *= e;
    }
}

std::string Shape::str() const {
    std::ostringstream os;
    os << "(" << n << "," << c << "," << h << "," << w << ")";
    return os.str();
}

Tensor::Tensor(Shape shape, double fill) : shape_(shape) {
    shape_.validate();
    data_.assign(shape_.elems(), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(shape), data_(std::move(values)) {
    shape_.validate();
    if (data_.size() != shape_.elems()) {
        throw ShapeError("data length " + std::to_string(data_.size()) +
                         " does not match shape " + shape_.str());
    }
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

Xorshift64Star::Xorshift64Star(std::uint64_t seed) {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    if (state_ == 0) {
        state_ = 0x9E3779B97F4A7C15ull; // xorshift state must never be zero
    }
}

std::uint64_t Xorshift64Star::next_u64() {
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1Dull;
}

double Xorshift64Star::next_real() {
    return double(next_u64() >> 11) * 0x1.0p-53;
}

Tensor tensor_random(Shape shape, const SeedSpec& spec) {
    shape.validate();
    Tensor out(shape);
    Xorshift64Star rng(spec.seed);
    auto values = out.data();
    if (spec.dist == SeedSpec::Dist::Uniform) {
        const double span = spec.hi - spec.lo;
        for (double& v : values) {
            v = spec.lo + rng.next_real() * span;
        }
    } else {
        const auto lo = std::int64_t(spec.lo);
        const auto hi = std::int64_t(spec.hi);
        if (hi < lo) {
            throw Error("integers distribution needs lo <= hi");
        }
        const auto range = std::uint64_t(hi - lo) + 1;
        for (double& v : values) {
            v = double(lo + std::int64_t(rng.next_u64() % range));
        }
    }
    return out;
}

CloseReport tensor_close(const Tensor& a, const Tensor& b, double rel_tol, double abs_tol) {
    if (a.shape() != b.shape()) {
        throw ShapeError("tensor_close: shape mismatch " + a.shape().str() +
                         " vs " + b.shape().str());
    }
    CloseReport report;
    const auto av = a.data();
    const auto bv = b.data();
    for (std::uint64_t i = 0; i < av.size(); ++i) {
        const double diff = std::abs(av[i] - bv[i]);
        const double tol = abs_tol + rel_tol * std::max(std::abs(av[i]), std::abs(bv[i]));
        if (diff > report.max_abs_diff) {
            report.max_abs_diff = diff;
        }
        if (!(diff <= tol) && report.close) {
            report.close = false;
            report.first_mismatch = i;
            report.a_value = av[i];
            report.b_value = bv[i];
        }
    }
    return report;
}

std::string CloseReport::str() const {
    if (close) {
        return "close (max abs diff " + std::to_string(max_abs_diff) + ")";
    }
    std::ostringstream os;
    os << "mismatch at flat index " << first_mismatch << ": " << a_value << " vs " << b_value;
    return os.str();
}

} // namespace deformsim
