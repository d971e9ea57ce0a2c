// deformsim: hardware-friendly deformable convolution reference and
// transaction-level accelerator memory model.
//
//   deformsim run --config table3.cfg --format table
//   deformsim validate
//   deformsim trace --config run.cfg --limit 20
//   deformsim flops --config run.cfg
//
// Exit codes: 0 ok, 1 validation failure, 2 parse error, 3 incompatible
// configuration.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "deformsim/config.hpp"
#include "deformsim/flops.hpp"
#include "deformsim/report.hpp"
#include "deformsim/validate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitParseError = 2;
constexpr int kExitIncompatible = 3;

struct SeedOverride {
    bool set = false;
    std::uint64_t value = 0;
};

deformsim::ExperimentConfig load(const std::string& config_arg, const SeedOverride& seed) {
    auto cfg = deformsim::parse_config(deformsim::load_config_text(config_arg));
    if (seed.set) {
        cfg.offsets.seed = seed.value;
        cfg.memory.llc.replacement_seed = seed.value;
    }
    return cfg;
}

int cmd_run(const std::string& config_arg, const std::string& out_path,
            const std::string& format, const SeedOverride& seed) {
    const auto cfg = load(config_arg, seed);
    const auto rows = deformsim::run_experiment(cfg);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) {
            std::cerr << "error: cannot open " << out_path << " for writing\n";
            return kExitParseError;
        }
        os = &file;
    }
    if (format == "csv") {
        deformsim::write_csv(rows, *os);
    } else {
        deformsim::write_table(rows, *os);
    }
    return kExitOk;
}

int cmd_validate(bool inject_rounding_fault) {
    deformsim::ValidationOptions options;
    options.inject_rounding_fault = inject_rounding_fault;
    const auto results = deformsim::run_validation(options);
    std::size_t failed = 0;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) {
            std::cout << "  (" << r.detail << ")";
        }
        std::cout << '\n';
        failed += !r.passed;
    }
    std::cout << "passed=" << results.size() - failed << " failed=" << failed << '\n';
    return failed == 0 ? kExitOk : kExitValidationFailure;
}

int cmd_trace(const std::string& config_arg, std::uint64_t limit, const SeedOverride& seed) {
    const auto cfg = load(config_arg, seed);
    const auto cells = deformsim::config_cells(cfg);
    if (cells.size() != 1) {
        throw deformsim::ConfigError("trace needs a config resolving to a single run, got " +
                                     std::to_string(cells.size()) + " cells");
    }
    const auto run = deformsim::prepare_run(cfg, cells[0]);
    const auto trace = deformsim::gen_trace(run.spec, run.offsets ? &*run.offsets : nullptr,
                                            run.engine);
    deformsim::dump_trace(trace, std::cout, limit);
    return kExitOk;
}

int cmd_flops(const std::string& config_arg, const SeedOverride& seed) {
    const auto cfg = load(config_arg, seed);
    for (const auto& cell : deformsim::config_cells(cfg)) {
        deformsim::ConvSpec spec = cfg.conv;
        spec.depthwise = cell.depthwise;
        spec.variant = cell.variant;
        if (cell.depthwise) {
            spec.oc = spec.in_shape.c;
        }
        const auto f = deformsim::flops_count(spec);
        std::cout << (cell.depthwise ? "depthwise" : "full") << " "
                  << deformsim::variant_name(cell.variant) << ":\n"
                  << "  mac_flops      " << f.mac_flops << '\n'
                  << "  bilinear_flops " << f.bilinear_flops << '\n'
                  << "  total          " << f.total << "  (" << f.total_gops() << " G-ops)\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deformable-convolution variants and accelerator memory model"};
    app.require_subcommand(1);

    std::string config_arg;
    std::string out_path;
    std::string format = "table";
    std::uint64_t limit = 20;
    SeedOverride seed;
    bool inject_rounding_fault = false;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option_function<std::uint64_t>(
               "--seed",
               [&seed](const std::uint64_t& v) {
                   seed.set = true;
                   seed.value = v;
               },
               "Override offsets.seed and the LLC replacement seed");
    };

    auto* run = app.add_subcommand("run", "Run the experiment grid and write a report");
    run->add_option("--config", config_arg, "Config file (or bundled name: table3.cfg)")
        ->required();
    run->add_option("--out", out_path, "Report path (default: stdout)");
    run->add_option("--format", format, "csv or table")
        ->check(CLI::IsMember({"csv", "table"}));
    add_seed(run);

    auto* validate = app.add_subcommand("validate", "Run the built-in equivalence checks");
    validate->add_flag("--inject-fault-rounding", inject_rounding_fault)->group("");

    auto* trace = app.add_subcommand("trace", "Dump the head of the access trace");
    trace->add_option("--config", config_arg, "Config file resolving to a single run")
        ->required();
    trace->add_option("--limit", limit, "Number of events to print");
    add_seed(trace);

    auto* flops = app.add_subcommand("flops", "Print the operation-count breakdown");
    flops->add_option("--config", config_arg, "Config file")->required();
    add_seed(flops);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(config_arg, out_path, format, seed);
        }
        if (validate->parsed()) {
            return cmd_validate(inject_rounding_fault);
        }
        if (trace->parsed()) {
            return cmd_trace(config_arg, limit, seed);
        }
        if (flops->parsed()) {
            return cmd_flops(config_arg, seed);
        }
    } catch (const deformsim::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const deformsim::ConfigError& e) {
        std::cerr << "incompatible configuration: " << e.what() << '\n';
        return kExitIncompatible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIncompatible;
    }
    return kExitOk;
}
