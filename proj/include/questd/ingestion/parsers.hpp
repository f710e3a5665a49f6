#pragma once

#include <string>
#include <string_view>

#include "questd/reports.hpp"

namespace questd::ingestion {

/// Parses a JUnit XML report (`testsuite` root, or `testsuites` wrapping several suites).
/// Skipped test cases are not part of the result. Throws MalformedReport.
TestRunReport parse_junit_xml(std::string_view bytes);

/// Parses a JaCoCo XML report. Report-level counters become the totals and `class`
/// elements (at any package/group depth) become per-class entries with dotted names.
/// Throws MalformedReport.
CoverageReport parse_jacoco_xml(std::string_view bytes);

enum class LcovMode { Strict, Lenient };

/// Parses an LCOV tracefile; each SF section becomes one per-class entry.
/// Strict mode rejects unknown record types, lenient mode skips them. Throws MalformedReport.
CoverageReport parse_lcov(std::string_view text, LcovMode mode = LcovMode::Strict);

/// Writes a summary-only LCOV tracefile (SF/FNF/FNH/LF/LH/BRF/BRH per entry).
std::string to_lcov(const CoverageReport& report);

}  // namespace questd::ingestion
