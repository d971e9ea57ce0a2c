#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "deformsim/tensor.hpp"
#include "deformsim/tensor_io.hpp"

using namespace deformsim;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("shape validation") {
    CHECK_THROWS_AS(Tensor({0, 1, 1, 1}), ShapeError);
    CHECK_THROWS_AS(tensor_random({1, 1, 0, 1}, SeedSpec::uniform(0, 0, 1)), ShapeError);
    CHECK(Shape{2, 3, 4, 5}.elems() == 120);
}

TEST_CASE("tensor_random is a pure function of shape and seed") {
    const auto spec = SeedSpec::uniform(0, 0.0, 1.0);
    const Tensor a = tensor_random({1, 1, 1, 1}, spec);
    // Frozen: the generator contract pins this value on every platform.
    CHECK(a[0] == doctest::Approx(0.48334813428393808).epsilon(1e-15));
    CHECK(tensor_random({1, 1, 1, 1}, spec) == a);

    const Tensor b = tensor_random({1, 1, 2, 2}, SeedSpec::integers(42, 0, 7));
    for (double v : b.data()) {
        CHECK(v == std::floor(v));
        CHECK(v >= 0.0);
        CHECK(v <= 7.0);
    }
    CHECK(b[0] == 2.0);
    CHECK(b[1] == 3.0);
    CHECK(b[2] == 7.0);
    CHECK(b[3] == 7.0);
}

TEST_CASE("tensor_random uniform sample mean") {
    const Tensor t = tensor_random({1, 1, 64, 64}, SeedSpec::uniform(7, 0.0, 1.0));
    double sum = 0.0;
    for (double v : t.data()) {
        sum += v;
    }
    const double mean = sum / double(t.size());
    CHECK(mean == doctest::Approx(0.5).epsilon(0.04)); // 0.5 +- 0.02
}

TEST_CASE("tensor_close basics") {
    const Tensor a({1, 1, 1, 1}, {1.0});
    const Tensor b({1, 1, 1, 1}, {1.0000001});
    CHECK(tensor_close(a, a, 0.0, 0.0).close);
    CHECK(tensor_close(a, b, 1e-5, 0.0).close);

    const Tensor c({1, 1, 1, 1}, {2.0});
    const CloseReport r = tensor_close(a, c, 1e-5, 0.0);
    CHECK_FALSE(r.close);
    CHECK(r.first_mismatch == 0);
    CHECK(r.a_value == 1.0);
    CHECK(r.b_value == 2.0);

    CHECK_THROWS_AS(tensor_close(a, Tensor({1, 1, 1, 2})), ShapeError);
}

TEST_CASE("tensor_close symmetry property") {
    Xorshift64Star rng(5);
    for (int iter = 0; iter < 20; ++iter) {
        const Tensor a = tensor_random({1, 2, 3, 3}, SeedSpec::uniform(rng.next_u64(), -2, 2));
        Tensor b = a;
        b[rng.next_u64() % b.size()] += 1e-7;
        CHECK(tensor_close(a, b, 1e-5, 0.0).close == tensor_close(b, a, 1e-5, 0.0).close);
        CHECK(tensor_close(a, b, 1e-9, 0.0).close == tensor_close(b, a, 1e-9, 0.0).close);
    }
}

TEST_CASE("tensor file round trip") {
    const auto path = temp_file("deformsim_roundtrip.dtns");
    const Tensor t = tensor_random({2, 3, 4, 5}, SeedSpec::uniform(99, -10.0, 10.0));
    tensor_write(t, path);
    const Tensor back = tensor_read(path);
    REQUIRE(back.shape() == t.shape());
    double max_abs = 0.0;
    for (double v : t.data()) {
        max_abs = std::max(max_abs, std::abs(v));
    }
    // float32 storage: relative error bounded by 2^-20 of the magnitude
    for (std::uint64_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(t[i] - back[i]) <= max_abs * 0x1.0p-20);
    }
    std::filesystem::remove(path);
}

TEST_CASE("float32-exact values round trip bit-exactly") {
    const auto path = temp_file("deformsim_exact.dtns");
    Xorshift64Star rng(3);
    Tensor t({1, 2, 8, 8});
    for (double& v : t.data()) {
        v = double(float(rng.next_real() * 100.0 - 50.0));
    }
    tensor_write(t, path);
    CHECK(tensor_read(path) == t);
    std::filesystem::remove(path);
}

TEST_CASE("tensor file parse errors") {
    const auto path = temp_file("deformsim_bad.dtns");

    SUBCASE("bad magic") {
        std::ofstream os(path, std::ios::binary);
        os << "NOPE" << std::string(20, '\0');
        os.close();
        CHECK_THROWS_WITH_AS(tensor_read(path), doctest::Contains("bad magic"), ParseError);
    }
    SUBCASE("empty file is a truncated header") {
        std::ofstream os(path, std::ios::binary);
        os.close();
        CHECK_THROWS_WITH_AS(tensor_read(path), doctest::Contains("truncated header"),
                             ParseError);
    }
    SUBCASE("extent overflow") {
        std::ofstream os(path, std::ios::binary);
        os << "DTNS";
        const std::uint32_t words[] = {1u, 0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu};
        os.write(reinterpret_cast<const char*>(words), sizeof(words));
        os.close();
        CHECK_THROWS_WITH_AS(tensor_read(path), doctest::Contains("extent overflow"),
                             ParseError);
    }
    SUBCASE("truncated payload") {
        Tensor t({1, 1, 2, 2}, {1, 2, 3, 4});
        tensor_write(t, path);
        std::filesystem::resize_file(path, std::filesystem::file_size(path) - 4);
        CHECK_THROWS_WITH_AS(tensor_read(path), doctest::Contains("truncated payload"),
                             ParseError);
    }
    std::filesystem::remove(path);
}
