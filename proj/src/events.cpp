#include "questd/events.hpp"

#include "questd/errors.hpp"

namespace questd {

namespace {

void validate_payload(const TestRunFinished& run) {
    for (const auto& test : run.tests) {
        if ((test.status == TestStatus::Passed) == test.failure_type.has_value()) {
            throw InvalidEvent("test " + test.class_name + "." + test.method_name +
                               ": failure_type must be present exactly when the test did not pass");
        }
    }
    if (run.with_coverage != run.coverage.has_value()) {
        throw InvalidEvent("with_coverage must be set exactly when a coverage report is attached");
    }
    if (run.coverage) {
        if (auto violation = check_invariants(*run.coverage)) throw InvalidEvent("coverage: " + *violation);
    }
}

void validate_payload(const SourceChanged& change) {
    if (change.change_facts.empty()) throw InvalidEvent("source change without change facts: " + change.path);
}

void validate_payload(const DebugRunStarted&) {}
void validate_payload(const BreakpointSet&) {}

}  // namespace

void validate(const DevEvent& event) {
    if (event.ts < 0) throw InvalidEvent("negative timestamp");
    std::visit([](const auto& payload) { validate_payload(payload); }, event.payload);
}

}  // namespace questd
