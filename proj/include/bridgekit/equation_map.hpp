#pragma once

#include <set>
#include <string>
#include <vector>

#include "bridgekit/analysis.hpp"
#include "bridgekit/bridge.hpp"
#include "bridgekit/field.hpp"
#include "bridgekit/mappings.hpp"
#include "bridgekit/sampler.hpp"
#include "bridgekit/schedules.hpp"
#include "bridgekit/toytrain.hpp"
#include "bridgekit/uncertainty.hpp"

namespace bridgekit {

// Every registered formula row, in module order. This is the single source
// the generated docs and the completeness test both read.
inline std::vector<EquationMapEntry> all_equation_entries() {
    using EntryFn = std::vector<EquationMapEntry> (*)();
    std::vector<EquationMapEntry> all;
    for (EntryFn part :
         {&field_equation_entries, &schedules_equation_entries, &bridge_equation_entries,
          &sampler_equation_entries, &uncertainty_equation_entries, &mappings_equation_entries,
          &analysis_equation_entries, &toytrain_equation_entries}) {
        std::vector<EquationMapEntry> rows = part();
        all.insert(all.end(), rows.begin(), rows.end());
    }
    return all;
}

// Structural validation of the registry itself: no empty cells, no operation
// registered twice.
inline void check_equation_entries(const std::vector<EquationMapEntry>& entries) {
    std::set<std::string> seen_ops;
    for (const EquationMapEntry& e : entries) {
        if (e.formula.empty() || e.expression.empty() || e.operation.empty() ||
            e.test_name.empty())
            raise(ErrorKind::MissingAnnotation,
                  "equation map: incomplete row for operation '" + e.operation + "'");
        if (!seen_ops.insert(e.operation).second)
            raise(ErrorKind::MissingAnnotation,
                  "equation map: operation '" + e.operation + "' registered twice");
    }
}

// Cross-check against the live test registry: every registered formula must
// name a test that actually exists in the suite.
inline void check_equation_tests(const std::vector<EquationMapEntry>& entries,
                                 const std::vector<std::string>& known_test_names) {
    check_equation_entries(entries);
    std::set<std::string> known(known_test_names.begin(), known_test_names.end());
    for (const EquationMapEntry& e : entries)
        if (known.find(e.test_name) == known.end())
            raise(ErrorKind::MissingAnnotation, "equation map: operation '" + e.operation +
                                                    "' names unknown test '" + e.test_name + "'");
}

namespace detail {

inline std::string escape_md_cell(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '|')
            out += "&#124;";
        else
            out += c;
    }
    return out;
}

} // namespace detail

// Deterministic markdown table of every formula row. Regenerating without
// source changes yields byte-identical output.
inline std::string generate_equation_map() {
    std::vector<EquationMapEntry> entries = all_equation_entries();
    check_equation_entries(entries);
    std::string md;
    md += "# Equation-to-code map\n\n";
    md += "Generated from the `*_equation_entries()` registrations next to each module's\n";
    md += "code (`tools/gen_equation_map.cpp` rebuilds this file). Each row names a\n";
    md += "closed-form fact, the operation implementing it, and the test that pins it.\n\n";
    md += "| Formula | Closed form | Operation | Verified by |\n";
    md += "|---|---|---|---|\n";
    for (const EquationMapEntry& e : entries)
        md += "| " + detail::escape_md_cell(e.formula) + " | `" +
              detail::escape_md_cell(e.expression) + "` | `" + e.operation + "` | " +
              detail::escape_md_cell(e.test_name) + " |\n";
    md += "\nTotal rows: " + std::to_string(entries.size()) + "\n";
    return md;
}

} // namespace bridgekit
