#include "deformsim/trace.hpp"

#include <cmath>
#include <ostream>

namespace deformsim {

namespace {

constexpr std::uint64_t kInputBase = 0x0000'0000ull;
constexpr std::uint64_t kWeightBase = 0x4000'0000ull;
constexpr std::uint64_t kOutputBase = 0x8000'0000ull;
constexpr std::uint64_t kOffsetBase = 0xc000'0000ull;
constexpr std::uint64_t kRegionBytes = 0x4000'0000ull;

std::uint32_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return std::uint32_t((a + b - 1) / b);
}

void require_integral(const OffsetField& off) {
    for (double v : off.data.data()) {
        if (v != std::round(v)) {
            throw ConfigError("fractional offsets cannot be traced: apply round_offsets first");
        }
    }
}

} // namespace

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::InputRead: return "input-read";
        case EventKind::WeightRead: return "weight-read";
        case EventKind::OutputWrite: return "output-write";
        case EventKind::OffsetRead: return "offset-read";
    }
    return "?";
}

std::uint32_t AccessTrace::word_bytes(EventKind kind) const {
    switch (kind) {
        case EventKind::InputRead: return input_word_bytes;
        case EventKind::WeightRead: return weight_word_bytes;
        case EventKind::OutputWrite: return output_word_bytes;
        case EventKind::OffsetRead: return offset_word_bytes;
    }
    return elem_bytes;
}

std::uint64_t AccessTrace::count(EventKind kind) const {
    std::uint64_t n = 0;
    for (const AccessEvent& e : events) {
        n += e.kind == kind;
    }
    return n;
}

AccessTrace gen_trace(const ConvSpec& spec, const OffsetField* off, const EngineConfig& engine) {
    spec.validate();
    engine.validate();
    if (spec.variant == Variant::DeformBilinear) {
        throw ConfigError("DeformBilinear cannot be traced: sampling addresses are fractional; "
                          "use DeformRounded instead");
    }
    const bool deformable = variant_is_deformable(spec.variant);
    OffsetField eff;
    if (deformable) {
        if (!off) {
            throw ConfigError("deformable variants need an offset field to trace");
        }
        const OffsetLayout want = spec.variant == Variant::DeformSquare ? OffsetLayout::Square
                                                                        : OffsetLayout::Full;
        if (off->layout != want) {
            throw ConfigError("offset layout does not match variant " + variant_name(spec.variant));
        }
        off->validate_for(spec);
        require_integral(*off);
        eff = (spec.variant == Variant::DeformBounded || spec.variant == Variant::DeformSquare)
                  ? clamp_offsets(*off, spec.bound)
                  : *off;
    }

    const std::uint32_t n = spec.in_shape.n;
    const std::uint32_t ic = spec.in_shape.c;
    const std::uint32_t oc = spec.depthwise ? ic : spec.oc;
    const std::uint32_t oh = spec.out_h();
    const std::uint32_t ow = spec.out_w();
    const std::uint32_t k = spec.k;
    const std::uint32_t eb = engine.elem_bytes;
    const std::uint32_t h_p = spec.in_shape.h + 2 * spec.padding;
    const std::uint32_t w_p = spec.in_shape.w + 2 * spec.padding;
    const std::uint32_t icg = ceil_div(ic, engine.par_ic);
    const std::uint32_t ocg = spec.depthwise ? icg : ceil_div(oc, engine.par_oc);
    // Packed words stay aligned: the channel extent is padded to a whole
    // number of engine words.
    const std::uint32_t ic_padded = icg * engine.par_ic;
    const std::uint32_t oc_padded = spec.depthwise ? ic_padded : ocg * engine.par_oc;
    const std::uint32_t off_ch = !deformable ? 0
                                 : spec.variant == Variant::DeformSquare ? 1
                                                                         : 2 * k * k;

    AccessTrace t;
    t.variant = spec.variant;
    t.depthwise = spec.depthwise;
    t.k = k;
    t.stride = spec.stride;
    t.elem_bytes = eb;
    t.input_word_bytes = engine.par_ic * eb;
    t.weight_word_bytes = engine.par_ic * eb;
    t.output_word_bytes = (spec.depthwise ? engine.par_ic : engine.par_oc) * eb;
    t.offset_word_bytes = eb;
    t.padded_h = h_p;
    t.padded_w = w_p;
    t.pixel_bytes = ic_padded * eb;
    t.row_bytes = std::uint64_t(w_p) * ic_padded * eb;
    t.input_base = kInputBase;
    t.input_item_bytes = std::uint64_t(h_p) * t.row_bytes;

    // How far a tap can land from its window base, for interior accounting.
    std::int64_t reach = 0;
    if (deformable) {
        double max_abs = 0.0;
        for (double v : eff.data.data()) {
            max_abs = std::max(max_abs, std::abs(v));
        }
        reach = spec.variant == Variant::DeformSquare
                    ? (std::int64_t(max_abs) + 1) * (k / 2) - std::int64_t(k - 1)
                    : std::int64_t(max_abs);
        reach = std::max<std::int64_t>(reach, 0);
    }
    t.interior_margin = std::uint32_t(std::int64_t(spec.effective_k()) - 1 + reach);

    const std::uint64_t out_item_bytes = std::uint64_t(oh) * ow * oc_padded * eb;
    const std::uint64_t off_item_bytes = std::uint64_t(oh) * ow * off_ch * eb;
    if (t.input_item_bytes * n > kRegionBytes || out_item_bytes * n > kRegionBytes ||
        off_item_bytes * n > kRegionBytes) {
        throw Error("convolution too large for the trace address map");
    }

    t.events.reserve(std::uint64_t(n) * oh * ow * (std::uint64_t(icg) * k * k + ocg + off_ch));

    const auto s = std::int64_t(spec.stride);
    const auto dil = std::int64_t(spec.variant == Variant::Dilated ? spec.dilation : 1);
    const auto half = std::int64_t(k / 2);

    std::uint32_t group_base = 1; // 0 is reserved for the weight stream
    for (std::uint32_t b = 0; b < n; ++b) {
        const std::uint64_t in_base = kInputBase + std::uint64_t(b) * t.input_item_bytes;
        const std::uint64_t out_base = kOutputBase + std::uint64_t(b) * out_item_bytes;
        const std::uint64_t off_base = kOffsetBase + std::uint64_t(b) * off_item_bytes;
        for (std::uint32_t i = 0; i < oh; ++i) {
            for (std::uint32_t j = 0; j < ow; ++j) {
                if (deformable) {
                    const std::uint64_t pos_off =
                        off_base + (std::uint64_t(i) * ow + j) * off_ch * eb;
                    for (std::uint32_t v = 0; v < off_ch; ++v) {
                        t.events.push_back({EventKind::OffsetRead, pos_off + v * eb,
                                            std::int32_t(i), group_base});
                    }
                }
                // Sampling position of tap (u, v), in padded coordinates.
                auto sample_at = [&](std::uint32_t u, std::uint32_t v,
                                     std::int64_t& yy, std::int64_t& xx) {
                    switch (spec.variant) {
                        case Variant::DeformSquare: {
                            const auto dd = std::int64_t(eff.dilation(b, i, j));
                            yy = std::int64_t(i) * s + half + dd * (std::int64_t(u) - half);
                            xx = std::int64_t(j) * s + half + dd * (std::int64_t(v) - half);
                            break;
                        }
                        case Variant::DeformRounded:
                        case Variant::DeformBounded: {
                            const std::uint32_t point = u * k + v;
                            yy = std::int64_t(i) * s + std::int64_t(u) +
                                 std::int64_t(eff.dy(b, point, i, j));
                            xx = std::int64_t(j) * s + std::int64_t(v) +
                                 std::int64_t(eff.dx(b, point, i, j));
                            break;
                        }
                        default:
                            yy = std::int64_t(i) * s + std::int64_t(u) * dil;
                            xx = std::int64_t(j) * s + std::int64_t(v) * dil;
                            break;
                    }
                };
                auto emit_read = [&](std::int64_t yy, std::int64_t xx, std::uint32_t g) {
                    if (yy < 0 || xx < 0 || yy >= std::int64_t(h_p) || xx >= std::int64_t(w_p)) {
                        return; // zero contribution, nothing fetched
                    }
                    const std::uint64_t addr =
                        in_base + ((std::uint64_t(yy) * w_p + std::uint64_t(xx)) * ic_padded +
                                   std::uint64_t(g) * engine.par_ic) * eb;
                    t.events.push_back({EventKind::InputRead, addr, std::int32_t(yy),
                                        group_base + g});
                };
                if (deformable) {
                    // Gather engine: one computed address per channel word, no
                    // contiguity between successive reads.
                    for (std::uint32_t g = 0; g < icg; ++g) {
                        for (std::uint32_t u = 0; u < k; ++u) {
                            for (std::uint32_t v = 0; v < k; ++v) {
                                std::int64_t yy;
                                std::int64_t xx;
                                sample_at(u, v, yy, xx);
                                emit_read(yy, xx, g);
                            }
                        }
                    }
                } else {
                    // Static-grid fetcher: all channel words of one site issue
                    // back to back, so window fetches merge into bursts.
                    for (std::uint32_t u = 0; u < k; ++u) {
                        for (std::uint32_t v = 0; v < k; ++v) {
                            std::int64_t yy;
                            std::int64_t xx;
                            sample_at(u, v, yy, xx);
                            for (std::uint32_t g = 0; g < icg; ++g) {
                                emit_read(yy, xx, g);
                            }
                        }
                    }
                }
                const std::uint64_t pos_out = out_base + (std::uint64_t(i) * ow + j) * oc_padded * eb;
                for (std::uint32_t g = 0; g < ocg; ++g) {
                    const std::uint32_t par = spec.depthwise ? engine.par_ic : engine.par_oc;
                    t.events.push_back({EventKind::OutputWrite, pos_out + std::uint64_t(g) * par * eb,
                                        std::int32_t(i), group_base + icg - 1});
                }
                group_base += icg;
            }
        }
    }

    // Weight stream, loaded once per layer into the on-chip weight buffer.
    const std::uint64_t weight_bytes =
        (spec.depthwise ? std::uint64_t(ic) * k * k : std::uint64_t(oc) * ic * k * k) * eb;
    for (std::uint64_t a = 0; a < weight_bytes; a += t.weight_word_bytes) {
        t.events.push_back({EventKind::WeightRead, kWeightBase + a, -1, 0});
    }

    return t;
}

void dump_trace(const AccessTrace& trace, std::ostream& os, std::uint64_t limit) {
    os << "# seq kind address row group\n";
    const std::uint64_t count = std::min<std::uint64_t>(limit, trace.events.size());
    const auto flags = os.flags();
    for (std::uint64_t i = 0; i < count; ++i) {
        const AccessEvent& e = trace.events[i];
        os << std::dec << i << ' ' << event_kind_name(e.kind) << " 0x" << std::hex << e.address
           << std::dec << ' ' << e.row << ' ' << e.group << '\n';
    }
    os.flags(flags);
}

ReuseStats reuse_stats(const AccessTrace& trace) {
    std::map<std::uint64_t, std::uint64_t> uses; // input word address -> reads
    bool any_input = false;
    for (const AccessEvent& e : trace.events) {
        if (e.kind != EventKind::InputRead) {
            continue;
        }
        any_input = true;
        uses[e.address]++;
    }
    if (!any_input) {
        throw Error("reuse_stats: trace has no input reads");
    }

    const std::uint64_t margin = trace.interior_margin;
    ReuseStats stats;
    std::uint64_t total = 0;
    for (const auto& [addr, count] : uses) {
        const std::uint64_t rel = addr - trace.input_base;
        const std::uint64_t within_item = rel % trace.input_item_bytes;
        const std::uint64_t row = within_item / trace.row_bytes;
        const std::uint64_t col = (within_item % trace.row_bytes) / trace.pixel_bytes;
        const bool interior = row >= margin && row + margin < trace.padded_h &&
                              col >= margin && col + margin < trace.padded_w;
        if (interior) {
            stats.interior_addresses++;
            total += count;
            stats.histogram[count]++;
        }
    }
    if (stats.interior_addresses == 0) {
        throw Error("reuse_stats: no interior addresses (image too small for margin " +
                    std::to_string(margin) + ")");
    }
    stats.mean_uses = double(total) / double(stats.interior_addresses);
    return stats;
}

} // namespace deformsim
