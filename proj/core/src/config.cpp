#include "deformsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace deformsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg, line);
}

std::uint64_t parse_u64(const std::string& v, int line) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) {
        fail(line, "expected an unsigned integer, got '" + v + "'");
    }
    return out;
}

double parse_real(const std::string& v, int line) {
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) {
            fail(line, "expected a number, got '" + v + "'");
        }
        return out;
    } catch (const ParseError&) {
        throw;
    } catch (...) {
        fail(line, "expected a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "0" || v == "no") {
        return false;
    }
    fail(line, "expected a boolean, got '" + v + "'");
}

Variant parse_variant(const std::string& v, int line) {
    if (v == "standard") return Variant::Standard;
    if (v == "dilated") return Variant::Dilated;
    if (v == "bilinear") return Variant::DeformBilinear;
    if (v == "rounded") return Variant::DeformRounded;
    if (v == "bounded") return Variant::DeformBounded;
    if (v == "square") return Variant::DeformSquare;
    fail(line, "unknown variant '" + v + "'");
}

MemoryKind parse_memory_kind(const std::string& v, int line) {
    if (v == "direct") return MemoryKind::DirectDram;
    if (v == "llc") return MemoryKind::Llc;
    if (v == "linebuffer") return MemoryKind::LineBuffer;
    if (v == "multiport") return MemoryKind::LineBufferMultiPort;
    fail(line, "unknown memory kind '" + v + "'");
}

std::vector<std::string> split_words(const std::string& v) {
    std::vector<std::string> words;
    std::istringstream is(v);
    std::string w;
    while (is >> w) {
        words.push_back(w);
    }
    return words;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    cfg.conv.in_shape = {1, 1, 8, 8};
    cfg.conv.padding = 1;

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        std::string stripped = hash == std::string::npos ? raw : raw.substr(0, hash);
        stripped = trim(stripped);
        if (stripped.empty()) {
            continue;
        }
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            fail(line, "expected 'section.key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty() || value.empty()) {
            fail(line, "expected 'section.key = value'");
        }

        if (key == "conv.n") cfg.conv.in_shape.n = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.ic") cfg.conv.in_shape.c = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.h") cfg.conv.in_shape.h = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.w") cfg.conv.in_shape.w = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.oc") cfg.conv.oc = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.k") cfg.conv.k = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.stride") cfg.conv.stride = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.padding") cfg.conv.padding = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.depthwise") cfg.conv.depthwise = parse_bool(value, line);
        else if (key == "conv.variant") cfg.conv.variant = parse_variant(value, line);
        else if (key == "conv.dilation") cfg.conv.dilation = std::uint32_t(parse_u64(value, line));
        else if (key == "conv.bound") cfg.conv.bound = std::uint32_t(parse_u64(value, line));
        else if (key == "offsets.kind") {
            if (value == "zeros") cfg.offsets.kind = OffsetSpec::Kind::Zeros;
            else if (value == "uniform") cfg.offsets.kind = OffsetSpec::Kind::Uniform;
            else if (value == "square_uniform") cfg.offsets.kind = OffsetSpec::Kind::SquareUniform;
            else if (value == "file") cfg.offsets.kind = OffsetSpec::Kind::File;
            else fail(line, "unknown offsets kind '" + value + "'");
        } else if (key == "offsets.seed") cfg.offsets.seed = parse_u64(value, line);
        else if (key == "offsets.lo") cfg.offsets.lo = parse_real(value, line);
        else if (key == "offsets.hi") cfg.offsets.hi = parse_real(value, line);
        else if (key == "offsets.path") cfg.offsets.path = value;
        else if (key == "engine.par_ic") {
            cfg.engine.par_ic = std::uint32_t(parse_u64(value, line));
            cfg.engine_dims_set = true;
        } else if (key == "engine.par_oc") {
            cfg.engine.par_oc = std::uint32_t(parse_u64(value, line));
            cfg.engine_dims_set = true;
        } else if (key == "engine.par_taps") {
            cfg.engine.par_taps = std::uint32_t(parse_u64(value, line));
            cfg.engine_dims_set = true;
        } else if (key == "engine.clock_mhz") cfg.engine.clock_mhz = parse_real(value, line);
        else if (key == "engine.elem_bytes") cfg.engine.elem_bytes = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.kind") cfg.memory.kind = parse_memory_kind(value, line);
        else if (key == "memory.dram.first_access_cycles")
            cfg.memory.dram.first_access_cycles = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.dram.per_beat_cycles")
            cfg.memory.dram.per_beat_cycles = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.dram.max_burst_beats")
            cfg.memory.dram.max_burst_beats = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.dram.bus_bytes")
            cfg.memory.dram.bus_bytes = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.llc.capacity_bytes")
            cfg.memory.llc.capacity_bytes = parse_u64(value, line);
        else if (key == "memory.llc.ways")
            cfg.memory.llc.ways = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.llc.line_bytes")
            cfg.memory.llc.line_bytes = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.llc.hit_cycles")
            cfg.memory.llc.hit_cycles = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.llc.replacement_seed")
            cfg.memory.llc.replacement_seed = parse_u64(value, line);
        else if (key == "memory.linebuffer.ports")
            cfg.memory.line_buffer.ports = std::uint32_t(parse_u64(value, line));
        else if (key == "memory.linebuffer.hit_cycles")
            cfg.memory.line_buffer.hit_cycles = std::uint32_t(parse_u64(value, line));
        else if (key == "run.repeats") {
            cfg.repeats = std::uint32_t(parse_u64(value, line));
            if (cfg.repeats < 1) {
                fail(line, "run.repeats must be >= 1");
            }
        } else if (key == "run.cell") {
            const auto words = split_words(value);
            if (words.size() != 3) {
                fail(line, "run.cell needs '<full|depthwise> <variant> <memory>'");
            }
            RunCell cell;
            if (words[0] == "full") cell.depthwise = false;
            else if (words[0] == "depthwise" || words[0] == "dw") cell.depthwise = true;
            else fail(line, "run.cell operation must be 'full' or 'depthwise'");
            cell.variant = parse_variant(words[1], line);
            cell.memory = parse_memory_kind(words[2], line);
            cfg.cells.push_back(cell);
        } else {
            fail(line, "unknown key '" + key + "'");
        }
    }

    // The line buffer is sized for the algorithmic bound.
    cfg.memory.line_buffer.bound = cfg.conv.bound;
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw ParseError("cannot open config " + path.string());
    }
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config(buf.str());
}

const std::string& bundled_table3_config() {
    static const std::string text = R"(# Co-designed hardware comparison grid.
# Full and depthwise 3x3 convolutions, 64x64 feature map, 256 channels,
# offset bound N = 7, each variant against its memory system.

conv.h = 64
conv.w = 64
conv.ic = 256
conv.oc = 256
conv.k = 3
conv.stride = 1
conv.padding = 1
conv.bound = 7

offsets.kind = uniform
offsets.seed = 7
offsets.lo = -7
offsets.hi = 7

engine.clock_mhz = 100

run.cell = full standard linebuffer
run.cell = full rounded direct
run.cell = full bounded linebuffer
run.cell = full square multiport
run.cell = depthwise standard linebuffer
run.cell = depthwise rounded direct
run.cell = depthwise bounded linebuffer
run.cell = depthwise square multiport
)";
    return text;
}

std::string load_config_text(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) {
        std::ifstream is(name_or_path);
        if (!is) {
            throw ParseError("cannot open config " + name_or_path);
        }
        std::ostringstream buf;
        buf << is.rdbuf();
        return buf.str();
    }
    if (name_or_path == "table3" || name_or_path == "table3.cfg") {
        return bundled_table3_config();
    }
    throw ParseError("cannot open config " + name_or_path);
}

} // namespace deformsim
