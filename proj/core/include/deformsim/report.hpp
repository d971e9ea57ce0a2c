#pragma once

#include <iosfwd>
#include <optional>

#include "deformsim/config.hpp"
#include "deformsim/simulate.hpp"

namespace deformsim {

// One grid cell ready to simulate: spec, realized offsets, engine, memory.
struct PreparedRun {
    std::string label; // full_3x3 | depthwise_3x3
    ConvSpec spec;
    std::optional<OffsetField> offsets;
    EngineConfig engine;
    MemoryConfig memory;
};

// Materializes a cell: fills the spec, generates/loads the offset field
// (already rounded for the simulator) and validates compatibility. Throws
// ConfigError for combinations that cannot run together.
PreparedRun prepare_run(const ExperimentConfig& cfg, const RunCell& cell);

// The cell list of a config: run.cell entries, or the single implicit cell.
std::vector<RunCell> config_cells(const ExperimentConfig& cfg);

struct ReportRow {
    std::string label;
    std::string variant;
    std::string memory;
    SimReport report;
};

// Runs every cell in config order, repeats included. Deterministic.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

// CSV schema (floats with 6 significant digits):
//   label,variant,memory,latency_ms,gops,compute_cycles,memory_cycles,
//   dram_transactions,llc_hits,llc_misses,buffer_hits,port_conflicts
void write_csv(const std::vector<ReportRow>& rows, std::ostream& os);
void write_table(const std::vector<ReportRow>& rows, std::ostream& os);

} // namespace deformsim
