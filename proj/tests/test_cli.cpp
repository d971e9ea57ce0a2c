#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

// End-to-end checks through the installed command-line binary.

namespace {

struct CmdResult {
    int exit_code;
    std::string output; // stdout + stderr
};

CmdResult run_cli(const std::string& args) {
    const std::string cmd = std::string(CLI_BIN) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 512> buf{};
    while (fgets(buf.data(), buf.size(), pipe)) {
        out += buf.data();
    }
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::filesystem::path write_temp(const char* name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream os(path);
    os << text;
    return path;
}

} // namespace

TEST_CASE("validate passes on a fresh build and reports counts") {
    const CmdResult r = run_cli("validate");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("failed=0") != std::string::npos);
    CHECK(r.output.find("passed=") != std::string::npos);
}

TEST_CASE("injected rounding fault trips exactly the commutation check") {
    const CmdResult r = run_cli("validate --inject-fault-rounding");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("FAIL  rounding-commutation") != std::string::npos);
    CHECK(r.output.find("failed=1") != std::string::npos);
}

TEST_CASE("run on the bundled grid emits eight rows and is byte-stable") {
    const CmdResult a = run_cli("run --config table3.cfg --format csv");
    CHECK(a.exit_code == 0);
    const CmdResult b = run_cli("run --config table3.cfg --format csv");
    CHECK(a.output == b.output);
    int lines = 0;
    for (char c : a.output) {
        lines += c == '\n';
    }
    CHECK(lines == 9); // header + 8 rows
}

TEST_CASE("parse errors exit 2 with the offending line") {
    const auto path = write_temp("cli_bad.cfg", "conv.h = 8\nconv.w = oops\n");
    const CmdResult r = run_cli("run --config " + path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("line 2") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("incompatible combinations exit 3 naming the rule") {
    const auto path = write_temp("cli_incompat.cfg",
                                 "conv.h = 8\nconv.w = 8\nconv.padding = 1\n"
                                 "run.cell = full bilinear linebuffer\n");
    const CmdResult r = run_cli("run --config " + path.string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("requires bounded variant") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("trace dump respects --limit") {
    const auto path = write_temp("cli_trace.cfg",
                                 "conv.h = 8\nconv.w = 8\nconv.ic = 4\nconv.oc = 4\n"
                                 "conv.padding = 1\n");
    SUBCASE("five events") {
        const CmdResult r = run_cli("trace --config " + path.string() + " --limit 5");
        CHECK(r.exit_code == 0);
        int lines = 0;
        for (char c : r.output) {
            lines += c == '\n';
        }
        CHECK(lines == 6); // header + 5
        CHECK(r.output.find("input-read") != std::string::npos);
        // first event line
        const auto first = r.output.find('\n') + 1;
        CHECK(r.output.substr(first, r.output.find('\n', first) - first)
                  .find("input-read") != std::string::npos);
    }
    SUBCASE("limit 0 prints the header only") {
        const CmdResult r = run_cli("trace --config " + path.string() + " --limit 0");
        CHECK(r.exit_code == 0);
        CHECK(r.output == "# seq kind address row group\n");
    }
    SUBCASE("same config twice is byte-identical") {
        const CmdResult a = run_cli("trace --config " + path.string() + " --limit 50");
        const CmdResult b = run_cli("trace --config " + path.string() + " --limit 50");
        CHECK(a.output == b.output);
    }
    std::filesystem::remove(path);
}

TEST_CASE("trace refuses multi-cell configs") {
    const CmdResult r = run_cli("trace --config table3.cfg --limit 5");
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("single run") != std::string::npos);
}

TEST_CASE("flops subcommand prints the breakdown") {
    const auto path = write_temp("cli_flops.cfg",
                                 "conv.h = 64\nconv.w = 64\nconv.ic = 256\nconv.oc = 256\n"
                                 "conv.padding = 1\nconv.variant = bilinear\n");
    const CmdResult r = run_cli("flops --config " + path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("4831838208") != std::string::npos);
    CHECK(r.output.find("56623104") != std::string::npos);
    std::filesystem::remove(path);
}

TEST_CASE("--seed overrides the offset stream") {
    const CmdResult a = run_cli("run --config table3.cfg --format csv");
    const CmdResult b = run_cli("run --config table3.cfg --format csv --seed 12345");
    const CmdResult c = run_cli("run --config table3.cfg --format csv --seed 12345");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(b.output == c.output); // still deterministic
    CHECK(a.output != b.output); // deformable rows move with the seed
}

TEST_CASE("run writes the report file when --out is given") {
    const auto out = std::filesystem::temp_directory_path() / "cli_report.csv";
    const CmdResult r =
        run_cli("run --config table3.cfg --format csv --out " + out.string());
    CHECK(r.exit_code == 0);
    std::ifstream is(out);
    std::string header;
    std::getline(is, header);
    CHECK(header.rfind("label,variant,memory", 0) == 0);
    std::filesystem::remove(out);
}
