#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "deformsim/engine.hpp"
#include "deformsim/memory.hpp"

namespace deformsim {

// ---------------------------------------------------------------------------
// Experiment configuration, parsed from line-based text:
//
//   # comment
//   section.key = value
//
// Sections: conv, offsets, engine, memory, run. A config either describes a
// single run (conv.variant + memory.kind) or a grid of cells:
//
//   run.cell = <full|depthwise> <variant> <memory>
//
// Variants: standard dilated bilinear rounded bounded square.
// Memories: direct llc linebuffer multiport.
// ---------------------------------------------------------------------------
struct OffsetSpec {
    enum class Kind { Zeros, Uniform, SquareUniform, File };
    Kind kind = Kind::Zeros;
    std::uint64_t seed = 0;
    double lo = 0.0;
    double hi = 0.0;
    std::string path;
};

struct RunCell {
    bool depthwise = false;
    Variant variant = Variant::Standard;
    MemoryKind memory = MemoryKind::DirectDram;
};

struct ExperimentConfig {
    ConvSpec conv;
    OffsetSpec offsets;
    EngineConfig engine;
    bool engine_dims_set = false; // par_* given explicitly; otherwise the
                                  // per-cell depthwise default applies
    MemoryConfig memory;
    std::uint32_t repeats = 1;
    std::vector<RunCell> cells;   // empty: single run from conv/memory
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// The bundled grid reproducing the co-designed hardware comparison: full and
// depthwise 3x3 on a 64x64x256 feature map against the four memory setups.
const std::string& bundled_table3_config();

// Resolves "--config" arguments: an existing file wins; otherwise "table3" /
// "table3.cfg" map to the bundled text.
std::string load_config_text(const std::string& name_or_path);

} // namespace deformsim
