#pragma once

#include <nlohmann/json.hpp>
#include <string_view>

#include "questd/events.hpp"
#include "questd/reports.hpp"

namespace questd {

using Json = nlohmann::json;

std::string_view to_string(TestStatus status);
std::string_view to_string(FileClass file_class);
std::string_view to_string(RefactoringType type);
std::string_view to_string(BreakpointKind kind);

/// Wire names of the event kinds as they appear in the log's "kind" field.
std::string_view event_kind(const EventPayload& payload);

Json to_json(const TestCaseResult& test);
Json to_json(const CoverageReport& report);
Json to_json(const TestRunReport& report);
Json to_json(const ChangeFact& fact);
/// {"ts":..., "session":..., "kind":..., "payload":{...}}
Json to_json(const DevEvent& event);

// The *_from_json functions throw InvalidEvent on schema violations.
TestCaseResult test_case_from_json(const Json& j);
CoverageReport coverage_from_json(const Json& j);
TestRunReport test_run_from_json(const Json& j);
ChangeFact change_fact_from_json(const Json& j);
/// Parses and validates the structural invariants of a DevEvent.
DevEvent event_from_json(const Json& j);

}  // namespace questd
