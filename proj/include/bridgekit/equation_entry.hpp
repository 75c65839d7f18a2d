#pragma once

#include <string>

namespace bridgekit {

// One row of the generated equation-to-code map: a named closed-form formula,
// the operation implementing it, and the test that pins it down. Modules
// register their rows next to the code (see *_equation_entries() per header);
// the docs generator aggregates and cross-checks them against the test binary.
struct EquationMapEntry {
    std::string formula;    // short name of the mathematical fact
    std::string expression; // the closed form itself
    std::string operation;  // module.operation
    std::string test_name;  // exact test case name that verifies it
};

} // namespace bridgekit
