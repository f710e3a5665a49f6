#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "questd/catalog.hpp"
#include "questd/events.hpp"

namespace questd {

/// An increment of an achievement's progress. For multi-parameter achievements `level`
/// names the per-level counter being bumped.
struct Increment {
    std::string_view id;
    std::uint64_t amount = 0;
    Level level = Level::None;
    bool operator==(const Increment&) const = default;
};

/// A class satisfying one level's (Y, Z) thresholds of a Class Reviewer achievement.
/// The engine counts distinct class names per level.
struct ClassQualification {
    std::string_view id;
    Level level = Level::None;
    std::string class_name;
    bool operator==(const ClassQualification&) const = default;
};

struct FailingTest {
    std::int64_t since_ts = 0;
    bool test_edited_since = false;
    bool production_edited_since = false;
    bool operator==(const FailingTest&) const = default;
};

struct DetectorState {
    std::map<TestKey, FailingTest> failing_tests;
    /// Tests whose most recent execution passed.
    std::set<TestKey> passing_tests;
    bool last_run_passed = false;
    bool refactoring_seen_since_last_pass = false;
    bool operator==(const DetectorState&) const = default;
};

/// Counting achievements that need no memory of earlier events.
std::vector<Increment> simple_increments(const DevEvent& event);

/// Class Reviewer qualifications carried by a coverage run.
std::vector<ClassQualification> class_qualifications(const CoverageReport& coverage);

struct DetectorStep {
    DetectorState state;
    std::vector<Increment> increments;
};

/// Compound sequences: bug-finder, test-fixer, shine-in-new-splendor, double-check.
DetectorStep step_detectors(DetectorState state, const DevEvent& event);

}  // namespace questd
