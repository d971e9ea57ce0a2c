#include "deformsim/memsim.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "deformsim/tensor.hpp" // Xorshift64Star

namespace deformsim {

void MemoryConfig::validate() const {
    if (dram.per_beat_cycles < 1 || dram.max_burst_beats < 1 || dram.bus_bytes < 1) {
        throw ConfigError("DRAM config fields must be >= 1");
    }
    if (llc.ways < 1 || llc.line_bytes < 1 ||
        llc.capacity_bytes % (std::uint64_t(llc.ways) * llc.line_bytes) != 0) {
        throw ConfigError("LLC capacity must be divisible by ways * line_bytes");
    }
    if (line_buffer.ports != 1 && line_buffer.ports != 3) {
        throw ConfigError("line buffer supports 1 or 3 ports");
    }
    if (line_buffer.bound < 1) {
        throw ConfigError("line buffer bound must be >= 1");
    }
}

std::string memory_kind_name(MemoryKind k) {
    switch (k) {
        case MemoryKind::DirectDram: return "direct";
        case MemoryKind::Llc: return "llc";
        case MemoryKind::LineBuffer: return "linebuffer";
        case MemoryKind::LineBufferMultiPort: return "multiport";
    }
    return "?";
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) {
    return (a + b - 1) / b;
}

// Accumulates byte accesses into burst transactions. Accesses extending the
// current contiguous run merge; anything else flushes the run into
// ceil(beats / max_burst_beats) transactions.
class DramStream {
public:
    explicit DramStream(const DramConfig& cfg) : cfg_(cfg) {}

    void access(std::uint64_t addr, std::uint64_t bytes) {
        if (open_ && addr == run_start_ + run_bytes_) {
            run_bytes_ += bytes;
            return;
        }
        flush();
        run_start_ = addr;
        run_bytes_ = bytes;
        open_ = true;
    }

    void flush() {
        if (!open_ || run_bytes_ == 0) {
            return;
        }
        const std::uint64_t beats = ceil_div(run_bytes_, cfg_.bus_bytes);
        const std::uint64_t tx = ceil_div(beats, cfg_.max_burst_beats);
        transactions += tx;
        total_beats += beats;
        cycles += tx * cfg_.first_access_cycles + beats * cfg_.per_beat_cycles;
        open_ = false;
        run_bytes_ = 0;
    }

    std::uint64_t transactions = 0;
    std::uint64_t total_beats = 0;
    std::uint64_t cycles = 0;

private:
    const DramConfig& cfg_;
    std::uint64_t run_start_ = 0;
    std::uint64_t run_bytes_ = 0;
    bool open_ = false;
};

// 16-way set-associative cache with seeded pseudo-random replacement: one
// generator draw picks the victim way on each eviction.
class Llc {
public:
    Llc(const LlcConfig& cfg) : cfg_(cfg), rng_(cfg.replacement_seed) {
        sets_ = cfg.capacity_bytes / (std::uint64_t(cfg.ways) * cfg.line_bytes);
        tags_.assign(sets_ * cfg.ways, 0);
        valid_.assign(sets_ * cfg.ways, false);
    }

    // True on hit; on miss the line is installed.
    bool lookup(std::uint64_t line_addr) {
        const std::uint64_t set = line_addr % sets_;
        const std::uint64_t base = set * cfg_.ways;
        for (std::uint32_t w = 0; w < cfg_.ways; ++w) {
            if (valid_[base + w] && tags_[base + w] == line_addr) {
                return true;
            }
        }
        for (std::uint32_t w = 0; w < cfg_.ways; ++w) {
            if (!valid_[base + w]) {
                valid_[base + w] = true;
                tags_[base + w] = line_addr;
                return false;
            }
        }
        const std::uint32_t victim = std::uint32_t(rng_.next_u64() % cfg_.ways);
        tags_[base + victim] = line_addr;
        return false;
    }

private:
    const LlcConfig& cfg_;
    Xorshift64Star rng_;
    std::uint64_t sets_;
    std::vector<std::uint64_t> tags_;
    std::vector<bool> valid_;
};

} // namespace

MemSimResult sim_direct_dram(const AccessTrace& trace, const MemoryConfig& mem) {
    mem.validate();
    if (mem.kind != MemoryKind::DirectDram) {
        throw ConfigError("sim_direct_dram needs kind == DirectDram");
    }
    DramStream stream(mem.dram);
    for (const AccessEvent& e : trace.events) {
        stream.access(e.address, trace.word_bytes(e.kind));
    }
    stream.flush();

    MemSimResult r;
    r.memory_cycles = stream.cycles;
    r.dram_transactions = stream.transactions;
    r.dram_beats = stream.total_beats;
    return r;
}

MemSimResult sim_llc(const AccessTrace& trace, const MemoryConfig& mem) {
    mem.validate();
    if (mem.kind != MemoryKind::Llc) {
        throw ConfigError("sim_llc needs kind == Llc");
    }
    Llc cache(mem.llc);
    DramStream stream(mem.dram); // weights / outputs / offsets / line fills
    MemSimResult r;

    const std::uint64_t line_beats = ceil_div(mem.llc.line_bytes, mem.dram.bus_bytes);
    const std::uint64_t miss_fill_cycles =
        mem.dram.first_access_cycles + line_beats * mem.dram.per_beat_cycles;

    for (const AccessEvent& e : trace.events) {
        if (e.kind != EventKind::InputRead) {
            stream.access(e.address, trace.word_bytes(e.kind));
            continue;
        }
        const std::uint64_t first_line = e.address / mem.llc.line_bytes;
        const std::uint64_t last_line =
            (e.address + trace.word_bytes(e.kind) - 1) / mem.llc.line_bytes;
        for (std::uint64_t line = first_line; line <= last_line; ++line) {
            if (cache.lookup(line)) {
                r.llc_hits++;
                r.memory_cycles += mem.llc.hit_cycles;
            } else {
                r.llc_misses++;
                // Standalone line fill: misses do not merge into bursts.
                r.memory_cycles += mem.llc.hit_cycles + miss_fill_cycles;
                r.dram_transactions++;
                r.dram_beats += line_beats;
            }
        }
    }
    stream.flush();
    r.memory_cycles += stream.cycles;
    r.dram_transactions += stream.transactions;
    r.dram_beats += stream.total_beats;
    return r;
}

MemSimResult sim_line_buffer(const AccessTrace& trace, const MemoryConfig& mem) {
    mem.validate();
    if (mem.kind != MemoryKind::LineBuffer && mem.kind != MemoryKind::LineBufferMultiPort) {
        throw ConfigError("sim_line_buffer needs a line-buffer memory kind");
    }
    if (trace.variant == Variant::DeformBilinear || trace.variant == Variant::DeformRounded) {
        throw ConfigError("line buffer requires bounded variant traces (working set must fit "
                          "2N+1 rows); got " + variant_name(trace.variant));
    }
    const std::uint32_t ports = mem.kind == MemoryKind::LineBufferMultiPort
                                    ? std::max<std::uint32_t>(mem.line_buffer.ports, 3)
                                    : 1;
    const std::uint32_t lines = mem.line_buffer.lines();
    // Regular static-grid traces feed the compute window through shift
    // registers: one issue slot per group, no banked-read serialization.
    const bool windowed = trace.variant == Variant::Standard || trace.variant == Variant::Dilated;

    DramStream fills(mem.dram);   // row streaming, bursts merge across rows
    DramStream stream(mem.dram);  // weights / outputs / offsets
    MemSimResult r;

    // line slot -> resident global row (input_base-relative, batch folded in)
    std::vector<std::int64_t> resident(lines, -1);
    std::unordered_set<std::uint64_t> filled_rows;

    std::uint64_t issue_slots = 0;

    // Banked-read bookkeeping for gather traces: distinct addresses per
    // touched line within the current cycle-group. Gather groups are
    // contiguous in the event stream.
    std::uint32_t cur_group = 0;
    bool group_open = false;
    std::unordered_map<std::uint32_t, std::unordered_set<std::uint64_t>> group_lines;

    // Windowed traces interleave group ids (channel words issue per site);
    // each group costs one slot, counted once.
    std::unordered_set<std::uint32_t> windowed_groups;

    auto close_group = [&] {
        if (!group_open) {
            return;
        }
        std::uint64_t distinct = 0;
        std::uint64_t r_max = 0;
        for (const auto& [slot, addrs] : group_lines) {
            distinct += addrs.size();
            r_max = std::max<std::uint64_t>(r_max, addrs.size());
        }
        const std::uint64_t slots = ceil_div(r_max * group_lines.size(), ports);
        issue_slots += slots;
        const std::uint64_t ideal = ceil_div(distinct, ports);
        if (slots > ideal) {
            r.port_conflicts += slots - ideal;
        }
        group_lines.clear();
        group_open = false;
    };

    for (const AccessEvent& e : trace.events) {
        if (e.kind != EventKind::InputRead) {
            stream.access(e.address, trace.word_bytes(e.kind));
            continue;
        }
        if (windowed) {
            windowed_groups.insert(e.group);
        } else {
            if (!group_open || e.group != cur_group) {
                close_group();
                cur_group = e.group;
                group_open = true;
            }
            const std::uint32_t slot = std::uint32_t(e.row) % lines;
            group_lines[slot].insert(e.address);
        }

        const std::uint64_t global_row = (e.address - trace.input_base) / trace.row_bytes;
        const std::uint32_t slot = std::uint32_t(e.row) % lines;
        if (resident[slot] == std::int64_t(global_row)) {
            r.buffer_hits++;
        } else {
            if (filled_rows.contains(global_row)) {
                throw Error("working set exceeds buffer: row " + std::to_string(e.row) +
                            " revisited after eviction (unbounded offsets?)");
            }
            filled_rows.insert(global_row);
            resident[slot] = std::int64_t(global_row);
            r.buffer_fills++;
            const std::uint64_t row_start = trace.input_base + global_row * trace.row_bytes;
            fills.access(row_start, trace.row_bytes);
        }
    }
    close_group();
    issue_slots += windowed_groups.size();
    fills.flush();
    stream.flush();

    r.memory_cycles = fills.cycles + stream.cycles +
                      issue_slots * mem.line_buffer.hit_cycles;
    r.dram_transactions = fills.transactions + stream.transactions;
    r.dram_beats = fills.total_beats + stream.total_beats;
    return r;
}

MemSimResult sim_memory(const AccessTrace& trace, const MemoryConfig& mem) {
    switch (mem.kind) {
        case MemoryKind::DirectDram: return sim_direct_dram(trace, mem);
        case MemoryKind::Llc: return sim_llc(trace, mem);
        default: return sim_line_buffer(trace, mem);
    }
}

} // namespace deformsim
