#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "questd/events.hpp"

namespace questd::ingestion {

struct ClassifyOptions {
    /// ECMAScript regex matched against each added line.
    std::string print_pattern = R"(System\.out\.println)";
    /// Globs (relative to the project root) marking test source trees.
    std::vector<std::string> test_roots = {"**/src/test/**"};
};

/// Test when the path lies under a test root or the content carries an @Test annotation.
FileClass classify_file(std::string_view path, std::string_view content, const ClassifyOptions& options = {});

/// Facts describing the change from `prev` (absent for a new file) to `next`.
/// Always returns at least one fact; GenericEdit when nothing more specific applies,
/// including edits that leave the token stream unchanged and binary content.
std::vector<ChangeFact> classify_change(const std::optional<std::string>& prev, std::string_view next,
                                        std::string_view path, const ClassifyOptions& options = {});

/// Conservative heuristic detection of method renames, extractions from tests and
/// inlinings into tests. Returns an empty list when nothing matches unambiguously.
std::vector<RefactoringDetected> detect_refactorings(std::string_view prev, std::string_view next);

}  // namespace questd::ingestion
