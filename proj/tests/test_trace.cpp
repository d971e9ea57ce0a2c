#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "deformsim/trace.hpp"

using namespace deformsim;

TEST_CASE("standard trace event counts") {
    ConvSpec spec;
    spec.in_shape = {1, 1, 4, 4};
    spec.oc = 1;
    spec.padding = 1;
    const AccessTrace t = gen_trace(spec, nullptr, EngineConfig::full_conv());
    CHECK(t.count(EventKind::InputRead) == 16 * 9);
    CHECK(t.count(EventKind::OutputWrite) == 16);
    CHECK(t.count(EventKind::OffsetRead) == 0);
}

TEST_CASE("bilinear variants cannot be traced") {
    ConvSpec spec;
    spec.in_shape = {1, 1, 4, 4};
    spec.oc = 1;
    spec.padding = 1;
    spec.variant = Variant::DeformBilinear;
    const OffsetField off{OffsetLayout::Full, Tensor({1, 18, 4, 4})};
    CHECK_THROWS_AS(gen_trace(spec, &off, EngineConfig::full_conv()), ConfigError);
}

TEST_CASE("fractional offsets are rejected with a rounding hint") {
    ConvSpec spec;
    spec.in_shape = {1, 1, 4, 4};
    spec.oc = 1;
    spec.padding = 1;
    spec.variant = Variant::DeformRounded;
    OffsetField off{OffsetLayout::Full, Tensor({1, 18, 4, 4})};
    off.data[5] = 0.25;
    CHECK_THROWS_WITH_AS(gen_trace(spec, &off, EngineConfig::full_conv()),
                         doctest::Contains("round_offsets"), ConfigError);
    const OffsetField rounded = round_offsets(off);
    CHECK_NOTHROW(gen_trace(spec, &rounded, EngineConfig::full_conv()));
}

TEST_CASE("zero-offset deformable trace reads the standard addresses") {
    ConvSpec spec;
    spec.in_shape = {1, 4, 6, 6};
    spec.oc = 4;
    spec.padding = 1;
    const AccessTrace std_t = gen_trace(spec, nullptr, EngineConfig::full_conv());
    spec.variant = Variant::DeformRounded;
    const OffsetField zeros{OffsetLayout::Full, Tensor({1, 18, 6, 6})};
    const AccessTrace def_t = gen_trace(spec, &zeros, EngineConfig::full_conv());

    std::vector<std::uint64_t> a;
    std::vector<std::uint64_t> b;
    for (const AccessEvent& e : std_t.events) {
        if (e.kind == EventKind::InputRead) a.push_back(e.address);
    }
    for (const AccessEvent& e : def_t.events) {
        if (e.kind == EventKind::InputRead) b.push_back(e.address);
    }
    CHECK(a == b);
    CHECK(def_t.count(EventKind::OffsetRead) == 18 * 36);
}

TEST_CASE("deformable offsets are required") {
    ConvSpec spec;
    spec.in_shape = {1, 1, 4, 4};
    spec.oc = 1;
    spec.padding = 1;
    spec.variant = Variant::DeformRounded;
    CHECK_THROWS_AS(gen_trace(spec, nullptr, EngineConfig::full_conv()), ConfigError);
}

TEST_CASE("trace dump is deterministic and respects the limit") {
    ConvSpec spec;
    spec.in_shape = {1, 1, 4, 4};
    spec.oc = 1;
    spec.padding = 1;
    const AccessTrace t = gen_trace(spec, nullptr, EngineConfig::full_conv());

    std::ostringstream a;
    dump_trace(t, a, 5);
    std::ostringstream b;
    dump_trace(t, b, 5);
    CHECK(a.str() == b.str());

    std::istringstream lines(a.str());
    std::string line;
    int n = 0;
    bool first_is_input = false;
    while (std::getline(lines, line)) {
        if (n == 1) {
            first_is_input = line.find("input-read") != std::string::npos;
        }
        ++n;
    }
    CHECK(n == 6); // header + 5 events
    CHECK(first_is_input);

    std::ostringstream header_only;
    dump_trace(t, header_only, 0);
    CHECK(header_only.str() == "# seq kind address row group\n");
}

namespace {

// Window-coverage count per padded input pixel, straight from the
// convolution geometry.
std::map<std::uint64_t, std::uint64_t> coverage_counts(std::uint32_t h, std::uint32_t pad,
                                                       std::uint32_t k, std::uint32_t stride) {
    const std::uint32_t hp = h + 2 * pad;
    const std::uint32_t oh = (hp - k) / stride + 1;
    std::map<std::uint64_t, std::uint64_t> axis; // padded coordinate -> windows
    for (std::uint32_t i = 0; i < oh; ++i) {
        for (std::uint32_t u = 0; u < k; ++u) {
            axis[i * stride + u]++;
        }
    }
    return axis;
}

} // namespace

TEST_CASE("reuse statistics") {
    SUBCASE("standard stride-1 interior pixels are read nine times") {
        ConvSpec spec;
        spec.in_shape = {1, 1, 32, 32};
        spec.oc = 1;
        spec.padding = 1;
        const ReuseStats st = reuse_stats(gen_trace(spec, nullptr, EngineConfig::full_conv()));
        CHECK(st.mean_uses == 9.0);
        CHECK(st.histogram.size() == 1);
        CHECK(st.histogram.begin()->first == 9);
    }
    SUBCASE("standard stride-2 matches the counting oracle, mean near 2.25") {
        ConvSpec spec;
        spec.in_shape = {1, 1, 64, 64};
        spec.oc = 1;
        spec.padding = 1;
        spec.stride = 2;
        const AccessTrace t = gen_trace(spec, nullptr, EngineConfig::full_conv());
        const ReuseStats st = reuse_stats(t);

        const auto axis = coverage_counts(64, 1, 3, 2);
        double total = 0.0;
        std::uint64_t count = 0;
        const std::uint32_t margin = t.interior_margin;
        for (const auto& [y, cy] : axis) {
            if (y < margin || y + margin >= t.padded_h) continue;
            for (const auto& [x, cx] : axis) {
                if (x < margin || x + margin >= t.padded_w) continue;
                total += double(cy * cx);
                count++;
            }
        }
        CHECK(st.interior_addresses == count);
        CHECK(st.mean_uses == doctest::Approx(total / double(count)).epsilon(1e-12));
        CHECK(st.mean_uses == doctest::Approx(2.25).epsilon(0.02));
    }
    SUBCASE("bounded uniform offsets keep the nine-uses expectation") {
        ConvSpec spec;
        spec.in_shape = {1, 1, 128, 128};
        spec.oc = 1;
        spec.padding = 1;
        spec.variant = Variant::DeformBounded;
        spec.bound = 7;
        const OffsetField off{OffsetLayout::Full,
                              tensor_random({1, 18, 128, 128}, SeedSpec::integers(777, 0, 7))};
        const ReuseStats st = reuse_stats(gen_trace(spec, &off, EngineConfig::full_conv()));
        CHECK(st.mean_uses > 8.5);
        CHECK(st.mean_uses < 9.5);
    }
    SUBCASE("a trace without input reads is an error") {
        AccessTrace empty;
        CHECK_THROWS_AS(reuse_stats(empty), Error);
    }
}

TEST_CASE("batched traces scale event counts and keep regions disjoint") {
    ConvSpec spec;
    spec.in_shape = {2, 2, 6, 6};
    spec.oc = 2;
    spec.padding = 1;
    const AccessTrace two = gen_trace(spec, nullptr, EngineConfig::full_conv());
    spec.in_shape.n = 1;
    const AccessTrace one = gen_trace(spec, nullptr, EngineConfig::full_conv());
    CHECK(two.count(EventKind::InputRead) == 2 * one.count(EventKind::InputRead));
    CHECK(two.count(EventKind::OutputWrite) == 2 * one.count(EventKind::OutputWrite));
    // Weights stream once per layer, not per item.
    CHECK(two.count(EventKind::WeightRead) == one.count(EventKind::WeightRead));

    // Batch items occupy disjoint address windows.
    std::uint64_t max_item0 = 0;
    std::uint64_t min_item1 = UINT64_MAX;
    for (const AccessEvent& e : two.events) {
        if (e.kind != EventKind::InputRead) continue;
        if (e.address < two.input_item_bytes) {
            max_item0 = std::max(max_item0, e.address);
        } else {
            min_item1 = std::min(min_item1, e.address);
        }
    }
    CHECK(max_item0 < two.input_item_bytes);
    CHECK(min_item1 >= two.input_item_bytes);
}

TEST_CASE("trace generation is deterministic") {
    ConvSpec spec;
    spec.in_shape = {1, 8, 12, 12};
    spec.oc = 8;
    spec.padding = 1;
    spec.variant = Variant::DeformBounded;
    spec.bound = 7;
    const OffsetField off{OffsetLayout::Full,
                          tensor_random({1, 18, 12, 12}, SeedSpec::integers(3, -7, 7))};
    const AccessTrace a = gen_trace(spec, &off, EngineConfig::full_conv());
    const AccessTrace b = gen_trace(spec, &off, EngineConfig::full_conv());
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].address == b.events[i].address);
        CHECK(a.events[i].kind == b.events[i].kind);
        CHECK(a.events[i].group == b.events[i].group);
    }
}
