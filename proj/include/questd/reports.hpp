#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace questd {

enum class TestStatus : std::uint8_t { Passed, Failed, Errored };

struct TestCaseResult {
    std::string class_name;
    std::string method_name;
    TestStatus status = TestStatus::Passed;
    /// Present iff status != Passed.
    std::optional<std::string> failure_type;

    bool operator==(const TestCaseResult&) const = default;
};

struct TestRunReport {
    std::string suite_id;
    std::vector<TestCaseResult> cases;
    /// Milliseconds since epoch, taken from the report file's mtime; 0 when parsed from memory.
    std::int64_t produced_at = 0;

    bool operator==(const TestRunReport&) const = default;
};

struct CoverageCounters {
    std::uint64_t lines_covered = 0;
    std::uint64_t lines_total = 0;
    std::uint64_t branches_covered = 0;
    std::uint64_t branches_total = 0;
    std::uint64_t methods_covered = 0;
    std::uint64_t methods_total = 0;
    std::uint64_t classes_covered = 0;
    std::uint64_t classes_total = 0;

    bool operator==(const CoverageCounters&) const = default;
};

struct ClassCoverage {
    std::string class_name;
    std::uint64_t lines_covered = 0;
    std::uint64_t lines_total = 0;
    std::uint64_t branches_covered = 0;
    std::uint64_t branches_total = 0;
    std::uint64_t methods_covered = 0;
    std::uint64_t methods_total = 0;

    bool operator==(const ClassCoverage&) const = default;
};

struct CoverageReport {
    CoverageCounters totals;
    std::vector<ClassCoverage> per_class;

    bool operator==(const CoverageReport&) const = default;
};

/// Sums the per-class entries; classes_covered counts entries with any covered line or method.
CoverageCounters sum_per_class(const std::vector<ClassCoverage>& per_class);

/// Checks covered <= total everywhere and, when per-class data exists, totals == sums.
/// Returns a description of the first violation, or nullopt.
std::optional<std::string> check_invariants(const CoverageReport& report);

}  // namespace questd
