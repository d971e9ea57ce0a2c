#pragma once

#include <string>
#include <vector>

namespace deformsim {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    // Self-test hook: breaks the offset rounding rule on one side of the
    // rounding-commutation check, which must then fail.
    bool inject_rounding_fault = false;
};

// Desk-scale equivalence and invariant checks over the functional operators
// and the simulator. Every check is deterministic.
std::vector<CheckResult> run_validation(const ValidationOptions& options = {});

} // namespace deformsim
