#include "deformsim/validate.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "deformsim/block.hpp"
#include "deformsim/config.hpp"
#include "deformsim/quantize.hpp"
#include "deformsim/report.hpp"

namespace deformsim {

namespace {

// ---------------------------------------------------------------------------
// Reference convolution, kept deliberately separate from the production
// path: materializes an explicitly padded buffer per channel and evaluates
// each output with plain gather loops.
// ---------------------------------------------------------------------------
struct PaddedPlane {
    std::vector<double> values;
    std::int64_t h = 0;
    std::int64_t w = 0;
    std::int64_t pad = 0;

    // (y, x) in original (unpadded) coordinates; anything outside is 0.
    double sample(double y, double x) const {
        const double py = y + double(pad);
        const double px = x + double(pad);
        const auto y0 = std::int64_t(std::floor(py));
        const auto x0 = std::int64_t(std::floor(px));
        const double fy = py - double(y0);
        const double fx = px - double(x0);
        auto get = [&](std::int64_t yy, std::int64_t xx) {
            if (yy < 0 || xx < 0 || yy >= h + 2 * pad || xx >= w + 2 * pad) {
                return 0.0;
            }
            return values[std::size_t(yy * (w + 2 * pad) + xx)];
        };
        if (fy == 0.0 && fx == 0.0) {
            return get(y0, x0);
        }
        return (1.0 - fy) * ((1.0 - fx) * get(y0, x0) + fx * get(y0, x0 + 1)) +
               fy * ((1.0 - fx) * get(y0 + 1, x0) + fx * get(y0 + 1, x0 + 1));
    }
};

PaddedPlane pad_plane(const Tensor& x, std::uint32_t b, std::uint32_t c, std::uint32_t pad) {
    const Shape& s = x.shape();
    PaddedPlane p;
    p.h = s.h;
    p.w = s.w;
    p.pad = pad;
    p.values.assign(std::size_t((s.h + 2 * pad)) * (s.w + 2 * pad), 0.0);
    for (std::uint32_t i = 0; i < s.h; ++i) {
        for (std::uint32_t j = 0; j < s.w; ++j) {
            p.values[std::size_t((i + pad)) * (s.w + 2 * pad) + j + pad] = x.at(b, c, i, j);
        }
    }
    return p;
}

double ref_round(double v) {
    return v < 0.0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
}

Tensor reference_conv(const Tensor& x, const Weights& w, const OffsetField* off,
                      const ConvSpec& spec) {
    const std::uint32_t oh = spec.out_h();
    const std::uint32_t ow = spec.out_w();
    const std::uint32_t ic = spec.in_shape.c;
    const std::uint32_t oc = spec.depthwise ? ic : spec.oc;
    const std::uint32_t k = spec.k;
    Tensor y(spec.out_shape());

    for (std::uint32_t b = 0; b < spec.in_shape.n; ++b) {
        std::vector<PaddedPlane> planes;
        planes.reserve(ic);
        for (std::uint32_t c = 0; c < ic; ++c) {
            planes.push_back(pad_plane(x, b, c, spec.padding));
        }
        for (std::uint32_t o = 0; o < oc; ++o) {
            for (std::uint32_t i = 0; i < oh; ++i) {
                for (std::uint32_t j = 0; j < ow; ++j) {
                    double acc = 0.0;
                    for (std::uint32_t c = spec.depthwise ? o : 0;
                         c < (spec.depthwise ? o + 1 : ic); ++c) {
                        for (std::uint32_t u = 0; u < k; ++u) {
                            for (std::uint32_t v = 0; v < k; ++v) {
                                double sy = double(i * spec.stride + u) - double(spec.padding);
                                double sx = double(j * spec.stride + v) - double(spec.padding);
                                switch (spec.variant) {
                                    case Variant::Dilated:
                                        sy = double(i * spec.stride + u * spec.dilation) -
                                             double(spec.padding);
                                        sx = double(j * spec.stride + v * spec.dilation) -
                                             double(spec.padding);
                                        break;
                                    case Variant::DeformBilinear:
                                    case Variant::DeformRounded:
                                    case Variant::DeformBounded: {
                                        const std::uint32_t point = u * k + v;
                                        double dy = off->dy(b, point, i, j);
                                        double dx = off->dx(b, point, i, j);
                                        if (spec.variant != Variant::DeformBilinear) {
                                            dy = ref_round(dy);
                                            dx = ref_round(dx);
                                        }
                                        if (spec.variant == Variant::DeformBounded) {
                                            dy = std::min(std::max(dy, 0.0), double(spec.bound));
                                            dx = std::min(std::max(dx, 0.0), double(spec.bound));
                                        }
                                        sy += dy;
                                        sx += dx;
                                        break;
                                    }
                                    case Variant::DeformSquare: {
                                        double dd = ref_round(off->dilation(b, i, j));
                                        dd = std::min(std::max(dd, 0.0), double(spec.bound));
                                        const double cy =
                                            double(i * spec.stride + k / 2) - double(spec.padding);
                                        const double cx =
                                            double(j * spec.stride + k / 2) - double(spec.padding);
                                        sy = cy + dd * (double(u) - double(k / 2));
                                        sx = cx + dd * (double(v) - double(k / 2));
                                        break;
                                    }
                                    default:
                                        break;
                                }
                                const std::uint32_t wc = spec.depthwise ? 0 : c;
                                acc += w.at(o, wc, u, v) * planes[c].sample(sy, sx);
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

// ---------------------------------------------------------------------------
// Random instance generation.
// ---------------------------------------------------------------------------
struct Instance {
    ConvSpec spec;
    Tensor x;
    Weights w;
    OffsetField off;
};

Instance random_instance(Xorshift64Star& rng, Variant variant, bool depthwise) {
    ConvSpec spec;
    spec.variant = variant;
    spec.depthwise = depthwise;
    spec.k = 3;
    spec.in_shape.n = 1 + std::uint32_t(rng.next_u64() % 2);
    spec.in_shape.c = 1 + std::uint32_t(rng.next_u64() % 4);
    spec.in_shape.h = 5 + std::uint32_t(rng.next_u64() % 4);
    spec.in_shape.w = 5 + std::uint32_t(rng.next_u64() % 4);
    spec.oc = depthwise ? spec.in_shape.c : 1 + std::uint32_t(rng.next_u64() % 4);
    spec.stride = 1 + std::uint32_t(rng.next_u64() % 2);
    spec.padding = std::uint32_t(rng.next_u64() % 3);
    spec.dilation = variant == Variant::Dilated ? 1 + std::uint32_t(rng.next_u64() % 2) : 1;
    spec.bound = 3;
    if (spec.out_h() == 0 || spec.out_w() == 0) {
        spec.padding = 2;
    }

    Instance inst{spec, {}, {}, {}};
    const std::uint64_t base = rng.next_u64();
    inst.x = tensor_random(spec.in_shape, SeedSpec::uniform(base, -1.0, 1.0));
    const Shape ws = depthwise ? Shape{spec.in_shape.c, 1, spec.k, spec.k}
                               : Shape{spec.oc, spec.in_shape.c, spec.k, spec.k};
    inst.w.data = tensor_random(ws, SeedSpec::uniform(base + 1, -1.0, 1.0));
    if (variant_is_deformable(variant)) {
        const bool square = variant == Variant::DeformSquare;
        const Shape os{spec.in_shape.n, square ? 1u : 2 * spec.k * spec.k,
                       spec.out_h(), spec.out_w()};
        const double lo = square ? 0.0 : -2.5;
        const double hi = square ? 2.5 : 2.5;
        inst.off = {square ? OffsetLayout::Square : OffsetLayout::Full,
                    tensor_random(os, SeedSpec::uniform(base + 2, lo, hi))};
    }
    return inst;
}

class Checker {
public:
    explicit Checker(std::vector<CheckResult>& out) : out_(out) {}

    void add(const std::string& name, bool passed, const std::string& detail = "") {
        out_.push_back({name, passed, detail});
    }

    void run(const std::string& name, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool passed = false;
        try {
            passed = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        out_.push_back({name, passed, detail});
    }

private:
    std::vector<CheckResult>& out_;
};

} // namespace

std::vector<CheckResult> run_validation(const ValidationOptions& options) {
    std::vector<CheckResult> results;
    Checker check(results);

    // --- functional operators ---------------------------------------------
    check.run("rng-determinism", [](std::string& detail) {
        const Tensor a = tensor_random({1, 1, 4, 4}, SeedSpec::uniform(123, 0.0, 1.0));
        const Tensor b = tensor_random({1, 1, 4, 4}, SeedSpec::uniform(123, 0.0, 1.0));
        const Tensor c = tensor_random({1, 1, 4, 4}, SeedSpec::uniform(124, 0.0, 1.0));
        detail = "same seed identical, different seed distinct";
        return a == b && !(a == c);
    });

    check.run("conv-vs-reference", [](std::string& detail) {
        Xorshift64Star rng(2024);
        double worst = 0.0;
        const Variant variants[] = {Variant::Standard, Variant::Dilated, Variant::DeformBilinear,
                                    Variant::DeformRounded, Variant::DeformBounded,
                                    Variant::DeformSquare};
        for (int iter = 0; iter < 36; ++iter) {
            const Variant v = variants[iter % 6];
            const bool dw = (iter / 6) % 2 == 1;
            const Instance inst = random_instance(rng, v, dw);
            const Tensor got = apply_conv(inst.x, inst.w,
                                          variant_is_deformable(v) ? &inst.off : nullptr,
                                          inst.spec);
            const Tensor want = reference_conv(inst.x, inst.w,
                                               variant_is_deformable(v) ? &inst.off : nullptr,
                                               inst.spec);
            const CloseReport rep = tensor_close(got, want, 1e-12, 1e-13);
            worst = std::max(worst, rep.max_abs_diff);
            if (!rep) {
                detail = variant_name(v) + (dw ? "/depthwise" : "") + ": " + rep.str();
                return false;
            }
        }
        std::ostringstream os;
        os << "36 instances, max abs diff " << worst;
        detail = os.str();
        return true;
    });

    check.run("zero-offset-degeneracy", [](std::string& detail) {
        Xorshift64Star rng(11);
        for (int iter = 0; iter < 6; ++iter) {
            Instance inst = random_instance(rng, Variant::DeformRounded, iter % 2 == 1);
            inst.off.data = Tensor(inst.off.data.shape()); // zeros
            for (Variant v : {Variant::DeformBilinear, Variant::DeformRounded,
                              Variant::DeformBounded}) {
                inst.spec.variant = v;
                const Tensor got = deform_conv(inst.x, inst.w, inst.off, inst.spec);
                ConvSpec std_spec = inst.spec;
                std_spec.variant = Variant::Standard;
                const Tensor want = standard_conv(inst.x, inst.w, std_spec);
                if (!tensor_close(got, want, 1e-12, 0.0)) {
                    detail = "zero-offset " + variant_name(v) + " != standard";
                    return false;
                }
            }
        }
        return true;
    });

    check.run("rounding-commutation", [&options](std::string& detail) {
        Xorshift64Star rng(12);
        for (int iter = 0; iter < 6; ++iter) {
            const Instance inst = random_instance(rng, Variant::DeformRounded, false);
            const Tensor got = deform_conv(inst.x, inst.w, inst.off, inst.spec);

            OffsetField rounded = inst.off;
            for (double& v : rounded.data.data()) {
                // The injected fault truncates instead of rounding.
                v = options.inject_rounding_fault ? std::trunc(v) : std::round(v);
            }
            ConvSpec bspec = inst.spec;
            bspec.variant = Variant::DeformBilinear;
            const Tensor want = deform_conv(inst.x, inst.w, rounded, bspec);
            if (!(got == want)) {
                detail = "DeformRounded != DeformBilinear on pre-rounded field";
                return false;
            }
        }
        detail = "exact equality";
        return true;
    });

    check.run("bounding-pipeline", [](std::string& detail) {
        Xorshift64Star rng(13);
        for (int iter = 0; iter < 6; ++iter) {
            const Instance inst = random_instance(rng, Variant::DeformBounded, false);
            const Tensor got = deform_conv(inst.x, inst.w, inst.off, inst.spec);
            const OffsetField pre = clamp_offsets(round_offsets(inst.off), inst.spec.bound);
            ConvSpec bspec = inst.spec;
            bspec.variant = Variant::DeformBilinear;
            const Tensor want = deform_conv(inst.x, inst.w, pre, bspec);
            if (!(got == want)) {
                detail = "DeformBounded != DeformBilinear after round+clamp";
                return false;
            }
        }
        detail = "exact equality";
        return true;
    });

    check.run("square-dilated-equivalence", [](std::string& detail) {
        Xorshift64Star rng(14);
        for (std::uint32_t d = 1; d <= 3; ++d) {
            ConvSpec spec;
            spec.variant = Variant::DeformSquare;
            spec.in_shape = {1, 2, 9, 9};
            spec.oc = 2;
            spec.k = 3;
            spec.padding = 1;
            spec.bound = 4;
            const std::uint64_t base = rng.next_u64();
            const Tensor x = tensor_random(spec.in_shape, SeedSpec::uniform(base, -1.0, 1.0));
            Weights w{tensor_random({2, 2, 3, 3}, SeedSpec::uniform(base + 1, -1.0, 1.0))};
            const OffsetField off{OffsetLayout::Square,
                                  Tensor({1, 1, spec.out_h(), spec.out_w()}, double(d))};
            const Tensor got = square_deform_conv(x, w, off, spec);

            ConvSpec dil = spec;
            dil.variant = Variant::Dilated;
            dil.dilation = d;
            dil.padding = spec.padding + (d - 1) * (spec.k / 2); // keep windows centered
            const Tensor want = standard_conv(x, w, dil);
            if (!tensor_close(got, want, 1e-12, 0.0)) {
                detail = "square dp_d=" + std::to_string(d) + " != dilated-" + std::to_string(d);
                return false;
            }
        }
        return true;
    });

    check.run("depthwise-embedding", [](std::string& detail) {
        Xorshift64Star rng(15);
        for (int iter = 0; iter < 4; ++iter) {
            Instance inst = random_instance(rng, Variant::Standard, true);
            const Tensor got = standard_conv(inst.x, inst.w, inst.spec);

            // Full conv with a channel-diagonal weight tensor.
            ConvSpec full = inst.spec;
            full.depthwise = false;
            full.oc = inst.spec.in_shape.c;
            Tensor diag({full.oc, full.in_shape.c, full.k, full.k});
            for (std::uint32_t c = 0; c < full.oc; ++c) {
                for (std::uint32_t u = 0; u < full.k; ++u) {
                    for (std::uint32_t v = 0; v < full.k; ++v) {
                        diag.at(c, c, u, v) = inst.w.data.at(c, 0, u, v);
                    }
                }
            }
            const Tensor want = standard_conv(inst.x, Weights{std::move(diag)}, full);
            if (!tensor_close(got, want, 1e-12, 0.0)) {
                detail = "depthwise != channel-diagonal full conv";
                return false;
            }
        }
        return true;
    });

    check.run("linearity", [](std::string& detail) {
        Xorshift64Star rng(16);
        for (int iter = 0; iter < 4; ++iter) {
            const Instance inst = random_instance(rng, Variant::DeformBounded, false);
            const Tensor y = tensor_random(inst.spec.in_shape,
                                           SeedSpec::uniform(rng.next_u64(), -1.0, 1.0));
            const double a = 0.75;
            const double b = -1.25;
            Tensor mix(inst.spec.in_shape);
            for (std::uint64_t i = 0; i < mix.size(); ++i) {
                mix[i] = a * inst.x[i] + b * y[i];
            }
            const Tensor lhs = deform_conv(mix, inst.w, inst.off, inst.spec);
            const Tensor fx = deform_conv(inst.x, inst.w, inst.off, inst.spec);
            const Tensor fy = deform_conv(y, inst.w, inst.off, inst.spec);
            Tensor rhs(lhs.shape());
            for (std::uint64_t i = 0; i < rhs.size(); ++i) {
                rhs[i] = a * fx[i] + b * fy[i];
            }
            if (!tensor_close(lhs, rhs, 1e-9, 1e-12)) {
                detail = "f(ax+by) != a f(x) + b f(y)";
                return false;
            }
        }
        return true;
    });

    check.run("offset-transform-idempotence", [](std::string& detail) {
        const OffsetField off{OffsetLayout::Full,
                              tensor_random({1, 18, 3, 3}, SeedSpec::uniform(99, -9.0, 9.0))};
        const OffsetField r1 = round_offsets(off);
        const OffsetField c1 = clamp_offsets(off, 7);
        bool ok = round_offsets(r1).data == r1.data && clamp_offsets(c1, 7).data == c1.data;
        for (double v : c1.data.data()) {
            ok = ok && v >= 0.0 && v <= 7.0;
        }
        detail = "round/clamp idempotent, clamp range [0, 7]";
        return ok;
    });

    check.run("quantizer-symmetry", [](std::string& detail) {
        const Tensor x = tensor_random({1, 2, 5, 5}, SeedSpec::uniform(7, -3.0, 3.0));
        Tensor neg(x.shape());
        for (std::uint64_t i = 0; i < x.size(); ++i) {
            neg[i] = -x[i];
        }
        const Quantized qa = quantize_symmetric(x, {8, {}});
        const Quantized qb = quantize_symmetric(neg, {8, {}});
        for (std::uint64_t i = 0; i < qa.codes.size(); ++i) {
            if (qa.codes[i] != -qb.codes[i] || std::abs(qa.codes[i]) > 127) {
                detail = "codes not symmetric or out of range";
                return false;
            }
        }
        detail = "codes negate with input, range within +-127";
        return true;
    });

    check.run("flops-bilinear-delta", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {2, 16, 32, 32};
        spec.oc = 24;
        spec.padding = 1;
        spec.variant = Variant::DeformBilinear;
        const FlopsBreakdown fb = flops_count(spec);
        spec.variant = Variant::DeformRounded;
        const FlopsBreakdown fr = flops_count(spec);
        const std::uint64_t want =
            6ull * spec.out_h() * spec.out_w() * spec.in_shape.c * spec.k * spec.k *
            spec.in_shape.n;
        detail = "rounded variant drops exactly the 6-multiply sampling term";
        return fr.bilinear_flops == 0 && fb.total - fr.total == want && fb.bilinear_flops == want;
    });

    // --- simulator ----------------------------------------------------------
    check.run("trace-count-contract", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {1, 1, 4, 4};
        spec.oc = 1;
        spec.padding = 1;
        const AccessTrace t = gen_trace(spec, nullptr, EngineConfig::full_conv());
        std::ostringstream os;
        os << t.count(EventKind::InputRead) << " input reads, "
           << t.count(EventKind::OutputWrite) << " output writes";
        detail = os.str();
        return t.count(EventKind::InputRead) == 16 * 9 && t.count(EventKind::OutputWrite) == 16;
    });

    check.run("trace-zero-offset-equality", [](std::string& detail) {
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
        detail = "input-read address sequences identical";
        return a == b;
    });

    check.run("dram-burst-law", [](std::string& detail) {
        MemoryConfig mem;
        AccessTrace t;
        t.input_word_bytes = 4;
        for (int i = 0; i < 64; ++i) {
            t.events.push_back({EventKind::InputRead, 0x1000 + std::uint64_t(i) * 4, 0, 1});
        }
        const MemSimResult r = sim_direct_dram(t, mem);
        const std::uint64_t beats = (64 * 4) / mem.dram.bus_bytes; // 32
        const std::uint64_t want_tx = (beats + mem.dram.max_burst_beats - 1) /
                                      mem.dram.max_burst_beats;
        std::ostringstream os;
        os << r.dram_transactions << " transactions for " << beats << " beats";
        detail = os.str();
        return r.dram_beats == beats && r.dram_transactions == want_tx;
    });

    check.run("llc-residency", [](std::string& detail) {
        MemoryConfig mem;
        mem.kind = MemoryKind::Llc;
        AccessTrace t;
        t.input_word_bytes = 4;
        for (int i = 0; i < 1000; ++i) {
            t.events.push_back({EventKind::InputRead, 0x2000, 0, 1});
        }
        const MemSimResult r = sim_llc(t, mem);
        std::ostringstream os;
        os << r.llc_misses << " miss, " << r.llc_hits << " hits";
        detail = os.str();
        return r.llc_misses == 1 && r.llc_hits == 999;
    });

    check.run("llc-two-pass-hits", [](std::string& detail) {
        MemoryConfig mem;
        mem.kind = MemoryKind::Llc;
        AccessTrace t;
        t.input_word_bytes = 8;
        const std::uint64_t lines = 4096; // 256 KiB working set, capacity 1 MiB
        for (int pass = 0; pass < 2; ++pass) {
            for (std::uint64_t i = 0; i < lines; ++i) {
                t.events.push_back({EventKind::InputRead, i * mem.llc.line_bytes, 0, 1});
            }
        }
        const MemSimResult r = sim_llc(t, mem);
        detail = "second pass fully hits";
        return r.llc_misses == lines && r.llc_hits == lines;
    });

    check.run("buffer-conservation", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {1, 8, 16, 16};
        spec.oc = 8;
        spec.padding = 1;
        spec.variant = Variant::DeformBounded;
        spec.bound = 3;
        const OffsetField off{OffsetLayout::Full,
                              tensor_random({1, 18, 16, 16}, SeedSpec::integers(5, 0, 3))};
        const AccessTrace t = gen_trace(spec, &off, EngineConfig::full_conv());
        MemoryConfig mem;
        mem.kind = MemoryKind::LineBuffer;
        mem.line_buffer.bound = 3;
        const MemSimResult r = sim_line_buffer(t, mem);
        std::ostringstream os;
        os << r.buffer_hits << " hits + " << r.buffer_fills << " fills vs "
           << t.count(EventKind::InputRead) << " reads";
        detail = os.str();
        return r.buffer_hits + r.buffer_fills == t.count(EventKind::InputRead);
    });

    check.run("port-monotonicity", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {1, 8, 16, 16};
        spec.oc = 8;
        spec.padding = 1;
        spec.variant = Variant::DeformSquare;
        spec.bound = 4;
        const OffsetField off{OffsetLayout::Square,
                              tensor_random({1, 1, 16, 16}, SeedSpec::integers(6, 0, 4))};
        const AccessTrace t = gen_trace(spec, &off, EngineConfig::full_conv());
        MemoryConfig single;
        single.kind = MemoryKind::LineBuffer;
        single.line_buffer.bound = 4;
        MemoryConfig multi = single;
        multi.kind = MemoryKind::LineBufferMultiPort;
        multi.line_buffer.ports = 3;
        const MemSimResult rs = sim_line_buffer(t, single);
        const MemSimResult rm = sim_line_buffer(t, multi);
        std::ostringstream os;
        os << "1-port " << rs.memory_cycles << " cycles, 3-port " << rm.memory_cycles;
        detail = os.str();
        return rm.memory_cycles <= rs.memory_cycles;
    });

    check.run("square-three-lines", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {1, 1, 12, 12};
        spec.oc = 1;
        spec.padding = 1;
        spec.variant = Variant::DeformSquare;
        spec.bound = 4;
        const OffsetField off{OffsetLayout::Square,
                              Tensor({1, 1, spec.out_h(), spec.out_w()}, 2.0)};
        const AccessTrace t = gen_trace(spec, &off, EngineConfig::full_conv());
        // Never more than 3 distinct buffer rows per cycle-group; exactly 3
        // away from the image border (edge groups lose out-of-image taps).
        std::map<std::uint32_t, std::set<std::int32_t>> rows_by_group;
        for (const AccessEvent& e : t.events) {
            if (e.kind == EventKind::InputRead) {
                rows_by_group[e.group].insert(e.row);
            }
        }
        std::uint64_t full_groups = 0;
        for (const auto& [g, rows] : rows_by_group) {
            if (rows.size() > 3) {
                detail = "group " + std::to_string(g) + " touches " +
                         std::to_string(rows.size()) + " rows";
                return false;
            }
            full_groups += rows.size() == 3;
        }
        std::ostringstream os;
        os << rows_by_group.size() << " groups, <= 3 rows each, " << full_groups
           << " with exactly 3";
        detail = os.str();
        // 10 of the 12 output rows are far enough from the border.
        return full_groups == 10 * 12;
    });

    check.run("sim-determinism", [](std::string& detail) {
        const ExperimentConfig cfg = parse_config(bundled_table3_config());
        ExperimentConfig small = cfg;
        small.conv.in_shape.c = 32;
        small.conv.oc = 32;
        small.conv.in_shape.h = 16;
        small.conv.in_shape.w = 16;
        const auto rows_a = run_experiment(small);
        const auto rows_b = run_experiment(small);
        if (rows_a.size() != rows_b.size()) {
            detail = "row count differs";
            return false;
        }
        for (std::size_t i = 0; i < rows_a.size(); ++i) {
            if (rows_a[i].report.total_cycles != rows_b[i].report.total_cycles ||
                rows_a[i].report.mem.llc_hits != rows_b[i].report.mem.llc_hits ||
                rows_a[i].report.gops != rows_b[i].report.gops) {
                detail = "row " + std::to_string(i) + " differs between runs";
                return false;
            }
        }
        detail = std::to_string(rows_a.size()) + " rows bit-identical across runs";
        return true;
    });

    check.run("gops-consistency", [](std::string& detail) {
        ConvSpec spec;
        spec.in_shape = {1, 32, 16, 16};
        spec.oc = 32;
        spec.padding = 1;
        const SimReport rep = simulate(spec, nullptr, EngineConfig::full_conv(), MemoryConfig{});
        const double ops = rep.gops * rep.latency_ms * 1e6;
        const double err = std::abs(ops - double(rep.flops.total)) / double(rep.flops.total);
        std::ostringstream os;
        os << "relative error " << err;
        detail = os.str();
        return err < 1e-3;
    });

    return results;
}

} // namespace deformsim
