#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "questd/reports.hpp"

namespace questd {

enum class FileClass : std::uint8_t { Test, Production };

enum class RefactoringType : std::uint8_t { Rename, ExtractMethod, InlineMethod };

enum class BreakpointKind : std::uint8_t { Line, Method, Conditional, FieldWatchpoint };

struct TestMethodAdded {
    std::string class_name;
    std::string method_name;
    bool operator==(const TestMethodAdded&) const = default;
};

struct AssertionAddedToTest {
    std::string class_name;
    std::string method_name;
    bool operator==(const AssertionAddedToTest&) const = default;
};

struct PrintStatementAdded {
    std::string line;
    bool operator==(const PrintStatementAdded&) const = default;
};

/// `method` is the renamed method's old name, or the host method for extract/inline.
/// `target` is the new name for a rename, or the helper method for extract/inline.
struct RefactoringDetected {
    RefactoringType rtype = RefactoringType::Rename;
    std::string class_name;
    std::string method;
    std::string target;
    /// The renamed or host method carries @Test.
    bool test_method = false;
    bool operator==(const RefactoringDetected&) const = default;
};

struct GenericEdit {
    bool operator==(const GenericEdit&) const = default;
};

using ChangeFact =
    std::variant<TestMethodAdded, AssertionAddedToTest, PrintStatementAdded, RefactoringDetected, GenericEdit>;

struct TestRunFinished {
    std::string suite_id;
    std::vector<TestCaseResult> tests;
    bool with_coverage = false;
    std::optional<CoverageReport> coverage;
    bool operator==(const TestRunFinished&) const = default;
};

struct SourceChanged {
    std::string path;
    FileClass file_class = FileClass::Production;
    std::vector<ChangeFact> change_facts;
    bool operator==(const SourceChanged&) const = default;
};

struct DebugRunStarted {
    bool operator==(const DebugRunStarted&) const = default;
};

struct BreakpointSet {
    BreakpointKind kind = BreakpointKind::Line;
    bool operator==(const BreakpointSet&) const = default;
};

using EventPayload = std::variant<TestRunFinished, SourceChanged, DebugRunStarted, BreakpointSet>;

struct DevEvent {
    std::int64_t ts = 0;  // ms since epoch
    std::string session_id;
    EventPayload payload;
    bool operator==(const DevEvent&) const = default;
};

/// Throws InvalidEvent when a structural invariant is broken
/// (failure_type iff not passed, coverage iff with_coverage, at least one change fact).
void validate(const DevEvent& event);

/// Identity of a test case across runs.
struct TestKey {
    std::string class_name;
    std::string method_name;
    auto operator<=>(const TestKey&) const = default;
};

}  // namespace questd
