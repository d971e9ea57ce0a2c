#include "deformsim/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace deformsim {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'T', 'N', 'S'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    std::array<unsigned char, 4> b;
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    os.write(reinterpret_cast<const char*>(b.data()), 4);
}

void put_f32(std::ostream& os, float v) {
    put_u32(os, std::bit_cast<std::uint32_t>(v));
}

bool get_u32(std::istream& is, std::uint32_t& v) {
    std::array<unsigned char, 4> b;
    if (!is.read(reinterpret_cast<char*>(b.data()), 4)) {
        return false;
    }
    v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= std::uint32_t(b[i]) << (8 * i);
    }
    return true;
}

} // namespace

void tensor_write(const Tensor& t, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    os.write(kMagic.data(), kMagic.size());
    put_u32(os, kVersion);
    const Shape& s = t.shape();
    put_u32(os, s.n);
    put_u32(os, s.c);
    put_u32(os, s.h);
    put_u32(os, s.w);
    for (double v : t.data()) {
        put_f32(os, static_cast<float>(v));
    }
    if (!os) {
        throw Error("write failed for " + path.string());
    }
}

Tensor tensor_read(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw ParseError("cannot open " + path.string());
    }
    std::array<char, 4> magic{};
    if (!is.read(magic.data(), magic.size())) {
        throw ParseError(path.string() + ": truncated header");
    }
    if (magic != kMagic) {
        throw ParseError(path.string() + ": bad magic");
    }
    std::uint32_t version = 0;
    if (!get_u32(is, version)) {
        throw ParseError(path.string() + ": truncated header");
    }
    if (version != kVersion) {
        throw ParseError(path.string() + ": unsupported version " + std::to_string(version));
    }
    Shape shape;
    for (std::uint32_t* e : {&shape.n, &shape.c, &shape.h, &shape.w}) {
        if (!get_u32(is, *e)) {
            throw ParseError(path.string() + ": truncated header");
        }
    }
    if (shape.n == 0 || shape.c == 0 || shape.h == 0 || shape.w == 0) {
        throw ParseError(path.string() + ": zero extent");
    }
    std::uint64_t total = shape.n;
    for (std::uint64_t e : {std::uint64_t(shape.c), std::uint64_t(shape.h), std::uint64_t(shape.w)}) {
        if (total > UINT64_MAX / e) {
            throw ParseError(path.string() + ": extent overflow");
        }
        total *= e;
    }
    // Check the payload fits the file before attempting a huge allocation.
    const auto header_bytes = std::uint64_t(4 + 4 + 16);
    const auto file_bytes = std::uint64_t(std::filesystem::file_size(path));
    if (total > (UINT64_MAX - header_bytes) / 4) {
        throw ParseError(path.string() + ": extent overflow");
    }
    if (header_bytes + total * 4 > file_bytes) {
        throw ParseError(path.string() + ": truncated payload");
    }

    std::vector<double> values(total);
    for (std::uint64_t i = 0; i < total; ++i) {
        std::uint32_t bits = 0;
        if (!get_u32(is, bits)) {
            throw ParseError(path.string() + ": truncated payload");
        }
        values[i] = double(std::bit_cast<float>(bits));
    }
    return Tensor(shape, std::move(values));
}

} // namespace deformsim
