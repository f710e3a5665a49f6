#include "questd/detectors.hpp"

#include <algorithm>

namespace questd {

namespace {

void push(std::vector<Increment>& out, std::string_view id, std::uint64_t amount, Level level = Level::None) {
    if (amount > 0) out.push_back(Increment{id, amount, level});
}

template <class Fact>
std::uint64_t count_facts(const SourceChanged& change) {
    return static_cast<std::uint64_t>(std::count_if(change.change_facts.begin(), change.change_facts.end(),
                                                    [](const ChangeFact& f) { return std::holds_alternative<Fact>(f); }));
}

std::uint64_t count_refactorings(const SourceChanged& change, RefactoringType type, bool test_methods_only) {
    std::uint64_t n = 0;
    for (const auto& fact : change.change_facts) {
        const auto* r = std::get_if<RefactoringDetected>(&fact);
        if (r && r->rtype == type && (!test_methods_only || r->test_method)) ++n;
    }
    return n;
}

std::vector<Increment> simple(const TestRunFinished& run) {
    std::vector<Increment> out;
    const auto tests = static_cast<std::uint64_t>(run.tests.size());
    push(out, "test-executor", tests);
    push(out, "the-tester", 1);

    const auto& advanced = std::get<MultiBoundaries>(lookup("the-tester-advanced").boundaries);
    for (auto level : kAwardableLevels) {
        if (advanced.levels[level_slot(level)].y.value_or(0) <= tests) push(out, "the-tester-advanced", 1, level);
    }

    const auto assertion_errors = std::count_if(run.tests.begin(), run.tests.end(), [](const TestCaseResult& t) {
        return t.status != TestStatus::Passed && t.failure_type &&
               t.failure_type->find("AssertionError") != std::string::npos;
    });
    push(out, "assert-and-tested", static_cast<std::uint64_t>(assertion_errors));

    if (run.with_coverage && run.coverage) {
        const auto& totals = run.coverage->totals;
        push(out, "gotta-catch-em-all", 1);
        push(out, "line-by-line", totals.lines_covered);
        push(out, "check-your-methods", totals.methods_covered);
        push(out, "check-your-classes", totals.classes_covered);
        push(out, "check-your-branches", totals.branches_covered);
    }
    return out;
}

std::vector<Increment> simple(const SourceChanged& change) {
    std::vector<Increment> out;
    push(out, "safety-first", count_facts<TestMethodAdded>(change));
    push(out, "console-is-the-new-debug-mode", count_facts<PrintStatementAdded>(change));
    if (change.file_class == FileClass::Test) {
        push(out, "the-eponym", count_refactorings(change, RefactoringType::Rename, true));
    }
    push(out, "method-extractor", count_refactorings(change, RefactoringType::ExtractMethod, false));
    push(out, "method-inliner", count_refactorings(change, RefactoringType::InlineMethod, false));
    return out;
}

std::vector<Increment> simple(const DebugRunStarted&) { return {Increment{"the-debugger", 1, Level::None}}; }

std::vector<Increment> simple(const BreakpointSet& bp) {
    std::string_view specific;
    switch (bp.kind) {
        case BreakpointKind::Line: specific = "break-the-line"; break;
        case BreakpointKind::Method: specific = "break-the-method"; break;
        case BreakpointKind::Conditional: specific = "make-your-choice"; break;
        case BreakpointKind::FieldWatchpoint: specific = "on-the-watch"; break;
    }
    return {Increment{"take-some-breaks", 1, Level::None}, Increment{specific, 1, Level::None}};
}

void step(DetectorState& state, const TestRunFinished& run, std::int64_t ts, std::vector<Increment>& out) {
    for (const auto& test : run.tests) {
        const TestKey key{test.class_name, test.method_name};
        if (test.status == TestStatus::Passed) {
            if (auto it = state.failing_tests.find(key); it != state.failing_tests.end()) {
                const auto& entry = it->second;
                if (entry.test_edited_since && !entry.production_edited_since) push(out, "test-fixer", 1);
                if (entry.production_edited_since && !entry.test_edited_since) push(out, "bug-finder", 1);
                state.failing_tests.erase(it);
            }
            state.passing_tests.insert(key);
        } else {
            state.passing_tests.erase(key);
            state.failing_tests.try_emplace(key, FailingTest{ts, false, false});
        }
    }

    // A run without test cases (coverage only) says nothing about pass/fail.
    if (run.tests.empty()) return;
    const bool passed = std::all_of(run.tests.begin(), run.tests.end(),
                                    [](const TestCaseResult& t) { return t.status == TestStatus::Passed; });
    if (passed && state.last_run_passed && state.refactoring_seen_since_last_pass) {
        push(out, "shine-in-new-splendor", 1);
    }
    state.last_run_passed = passed;
    state.refactoring_seen_since_last_pass = false;
}

void step(DetectorState& state, const SourceChanged& change, std::int64_t, std::vector<Increment>& out) {
    for (auto& [key, entry] : state.failing_tests) {
        if (change.file_class == FileClass::Test) {
            entry.test_edited_since = true;
        } else {
            entry.production_edited_since = true;
        }
    }

    for (const auto& fact : change.change_facts) {
        if (const auto* r = std::get_if<RefactoringDetected>(&fact)) {
            if (state.last_run_passed) state.refactoring_seen_since_last_pass = true;
            if (r->rtype == RefactoringType::Rename) {
                const TestKey old_key{r->class_name, r->method};
                state.failing_tests.erase(old_key);
                state.passing_tests.erase(old_key);
            }
        } else if (const auto* a = std::get_if<AssertionAddedToTest>(&fact)) {
            if (change.file_class == FileClass::Test &&
                state.passing_tests.count(TestKey{a->class_name, a->method_name}) > 0) {
                push(out, "double-check", 1);
            }
        }
    }
}

void step(DetectorState&, const DebugRunStarted&, std::int64_t, std::vector<Increment>&) {}
void step(DetectorState&, const BreakpointSet&, std::int64_t, std::vector<Increment>&) {}

}  // namespace

std::vector<Increment> simple_increments(const DevEvent& event) {
    return std::visit([](const auto& payload) { return simple(payload); }, event.payload);
}

std::vector<ClassQualification> class_qualifications(const CoverageReport& coverage) {
    struct Measure {
        std::string_view id;
        std::uint64_t ClassCoverage::*covered;
        std::uint64_t ClassCoverage::*total;
    };
    static constexpr Measure measures[] = {
        {"class-reviewer-lines", &ClassCoverage::lines_covered, &ClassCoverage::lines_total},
        {"class-reviewer-methods", &ClassCoverage::methods_covered, &ClassCoverage::methods_total},
        {"class-reviewer-branches", &ClassCoverage::branches_covered, &ClassCoverage::branches_total},
    };

    std::vector<ClassQualification> out;
    for (const auto& measure : measures) {
        const auto& boundaries = std::get<MultiBoundaries>(lookup(measure.id).boundaries);
        for (const auto& cls : coverage.per_class) {
            const auto covered = cls.*measure.covered;
            const auto total = cls.*measure.total;
            if (total == 0) continue;
            for (auto level : kAwardableLevels) {
                const auto& tuple = boundaries.levels[level_slot(level)];
                if (total >= tuple.y.value_or(0) && covered * 100 >= tuple.z.value_or(0) * total) {
                    out.push_back(ClassQualification{measure.id, level, cls.class_name});
                }
            }
        }
    }
    return out;
}

DetectorStep step_detectors(DetectorState state, const DevEvent& event) {
    DetectorStep result;
    std::visit([&](const auto& payload) { step(state, payload, event.ts, result.increments); }, event.payload);
    result.state = std::move(state);
    return result;
}

}  // namespace questd
