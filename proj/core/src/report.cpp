#include "deformsim/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

#include "deformsim/tensor_io.hpp"

namespace deformsim {

namespace {

OffsetField realize_offsets(const ExperimentConfig& cfg, const ConvSpec& spec) {
    const OffsetLayout layout = spec.variant == Variant::DeformSquare ? OffsetLayout::Square
                                                                      : OffsetLayout::Full;
    const Shape shape{spec.in_shape.n,
                      layout == OffsetLayout::Square ? 1 : 2 * spec.k * spec.k,
                      spec.out_h(), spec.out_w()};

    const OffsetSpec& o = cfg.offsets;
    switch (o.kind) {
        case OffsetSpec::Kind::Zeros:
            return {layout, Tensor(shape)};
        case OffsetSpec::Kind::Uniform: {
            // dp_d is a distance from the window center; negative draws make
            // no sense for the square layout, so the range floor is 0 there.
            const double lo = layout == OffsetLayout::Square ? std::max(o.lo, 0.0) : o.lo;
            return {layout, tensor_random(shape, SeedSpec::uniform(o.seed, lo, o.hi))};
        }
        case OffsetSpec::Kind::SquareUniform: {
            if (layout != OffsetLayout::Square) {
                throw ConfigError("offsets.kind square_uniform requires the square variant");
            }
            return {layout, tensor_random(shape, SeedSpec::uniform(o.seed, o.lo, o.hi))};
        }
        case OffsetSpec::Kind::File: {
            Tensor t = tensor_read(o.path);
            const std::uint32_t ch = t.shape().c;
            OffsetLayout file_layout;
            if (ch == 2 * spec.k * spec.k) {
                file_layout = OffsetLayout::Full;
            } else if (ch == 1) {
                file_layout = OffsetLayout::Square;
            } else {
                throw ConfigError("offset file has " + std::to_string(ch) +
                                  " channels; expected " + std::to_string(2 * spec.k * spec.k) +
                                  " (full) or 1 (square)");
            }
            if (file_layout != layout) {
                throw ConfigError("offset file layout does not match variant " +
                                  variant_name(spec.variant));
            }
            OffsetField f{layout, std::move(t)};
            f.validate_for(spec);
            return f;
        }
    }
    throw ConfigError("unhandled offset kind");
}

} // namespace

std::vector<RunCell> config_cells(const ExperimentConfig& cfg) {
    if (!cfg.cells.empty()) {
        return cfg.cells;
    }
    return {RunCell{cfg.conv.depthwise, cfg.conv.variant, cfg.memory.kind}};
}

PreparedRun prepare_run(const ExperimentConfig& cfg, const RunCell& cell) {
    PreparedRun run;
    run.spec = cfg.conv;
    run.spec.depthwise = cell.depthwise;
    run.spec.variant = cell.variant;
    if (cell.depthwise) {
        run.spec.oc = run.spec.in_shape.c;
    }
    run.spec.validate();
    run.label = std::string(cell.depthwise ? "depthwise" : "full") + "_" +
                std::to_string(run.spec.k) + "x" + std::to_string(run.spec.k);

    run.engine = cfg.engine;
    if (!cfg.engine_dims_set) {
        const EngineConfig dims = EngineConfig::defaults_for(cell.depthwise);
        run.engine.par_ic = dims.par_ic;
        run.engine.par_oc = dims.par_oc;
        run.engine.par_taps = dims.par_taps;
    }
    run.engine.validate();

    run.memory = cfg.memory;
    run.memory.kind = cell.memory;
    run.memory.validate();

    if (variant_is_deformable(cell.variant)) {
        OffsetField field = realize_offsets(cfg, run.spec);
        // The simulator models post-rounding inference.
        if (cell.variant != Variant::DeformBilinear) {
            field = round_offsets(field);
        }
        run.offsets = std::move(field);
    } else if (cfg.offsets.kind == OffsetSpec::Kind::SquareUniform) {
        throw ConfigError("offsets.kind square_uniform requires the square variant");
    }

    // Surface impossible combinations before simulation.
    const bool buffered = cell.memory == MemoryKind::LineBuffer ||
                          cell.memory == MemoryKind::LineBufferMultiPort;
    if (buffered &&
        (cell.variant == Variant::DeformBilinear || cell.variant == Variant::DeformRounded)) {
        throw ConfigError("memory '" + memory_kind_name(cell.memory) +
                          "' requires bounded variant (working set must fit the line buffer); "
                          "got '" + variant_name(cell.variant) + "'");
    }
    if (cell.variant == Variant::DeformBilinear) {
        throw ConfigError("variant 'bilinear' cannot be simulated: sampling addresses are "
                          "fractional; use 'rounded'");
    }
    return run;
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
    std::vector<ReportRow> rows;
    for (const RunCell& cell : config_cells(cfg)) {
        const PreparedRun run = prepare_run(cfg, cell);
        for (std::uint32_t rep = 0; rep < cfg.repeats; ++rep) {
            ReportRow row;
            row.label = run.label;
            row.variant = variant_name(cell.variant);
            row.memory = memory_kind_name(cell.memory);
            row.report = simulate(run.spec, run.offsets ? &*run.offsets : nullptr,
                                  run.engine, run.memory);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

std::string fmt_g6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<std::vector<std::string>> render_cells(const std::vector<ReportRow>& rows) {
    std::vector<std::vector<std::string>> out;
    out.push_back({"label", "variant", "memory", "latency_ms", "gops", "compute_cycles",
                   "memory_cycles", "dram_transactions", "llc_hits", "llc_misses",
                   "buffer_hits", "port_conflicts"});
    for (const ReportRow& r : rows) {
        const SimReport& s = r.report;
        out.push_back({r.label, r.variant, r.memory, fmt_g6(s.latency_ms), fmt_g6(s.gops),
                       std::to_string(s.compute_cycles), std::to_string(s.memory_cycles),
                       std::to_string(s.mem.dram_transactions), std::to_string(s.mem.llc_hits),
                       std::to_string(s.mem.llc_misses), std::to_string(s.mem.buffer_hits),
                       std::to_string(s.mem.port_conflicts)});
    }
    return out;
}

} // namespace

void write_csv(const std::vector<ReportRow>& rows, std::ostream& os) {
    for (const auto& line : render_cells(rows)) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            os << line[i] << (i + 1 < line.size() ? "," : "");
        }
        os << '\n';
    }
}

void write_table(const std::vector<ReportRow>& rows, std::ostream& os) {
    const auto cells = render_cells(rows);
    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            width[i] = std::max(width[i], line[i].size());
        }
    }
    for (const auto& line : cells) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            os << std::left << std::setw(int(width[i])) << line[i]
               << (i + 1 < line.size() ? "  " : "");
        }
        os << '\n';
    }
}

} // namespace deformsim
