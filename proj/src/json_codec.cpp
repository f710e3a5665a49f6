#include "questd/json_codec.hpp"

#include <array>
#include <utility>

#include "questd/errors.hpp"

namespace questd {

namespace {

template <class Enum, std::size_t N>
Enum parse_enum(const Json& j, const std::array<std::pair<std::string_view, Enum>, N>& names, std::string_view what) {
    if (!j.is_string()) throw InvalidEvent(std::string(what) + " must be a string");
    const auto& text = j.get_ref<const std::string&>();
    for (const auto& [name, value] : names) {
        if (name == text) return value;
    }
    throw InvalidEvent("unknown " + std::string(what) + ": " + text);
}

constexpr std::array<std::pair<std::string_view, TestStatus>, 3> kStatusNames{{
    {"passed", TestStatus::Passed}, {"failed", TestStatus::Failed}, {"errored", TestStatus::Errored}}};
constexpr std::array<std::pair<std::string_view, FileClass>, 2> kFileClassNames{{
    {"test", FileClass::Test}, {"production", FileClass::Production}}};
constexpr std::array<std::pair<std::string_view, RefactoringType>, 3> kRefactoringNames{{
    {"rename", RefactoringType::Rename},
    {"extract_method", RefactoringType::ExtractMethod},
    {"inline_method", RefactoringType::InlineMethod}}};
constexpr std::array<std::pair<std::string_view, BreakpointKind>, 4> kBreakpointNames{{
    {"line", BreakpointKind::Line},
    {"method", BreakpointKind::Method},
    {"conditional", BreakpointKind::Conditional},
    {"field_watchpoint", BreakpointKind::FieldWatchpoint}}};

template <class Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<std::string_view, Enum>, N>& names) {
    for (const auto& [name, v] : names) {
        if (v == value) return name;
    }
    return "unknown";
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object()) throw InvalidEvent(std::string("expected an object holding '") + key + "'");
    const auto it = j.find(key);
    if (it == j.end()) throw InvalidEvent(std::string("missing field '") + key + "'");
    return *it;
}

std::string string_field(const Json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_string()) throw InvalidEvent(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t count_field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) return 0;
    if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
        throw InvalidEvent(std::string("field '") + key + "' must be a non-negative integer");
    }
    return it->get<std::uint64_t>();
}

bool bool_field(const Json& j, const char* key, bool fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_boolean()) throw InvalidEvent(std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
}

const Json& array_field(const Json& j, const char* key) {
    const auto& v = field(j, key);
    if (!v.is_array()) throw InvalidEvent(std::string("field '") + key + "' must be an array");
    return v;
}

Json payload_json(const TestRunFinished& run) {
    Json tests = Json::array();
    for (const auto& t : run.tests) tests.push_back(to_json(t));
    Json j{{"suite_id", run.suite_id}, {"tests", std::move(tests)}, {"with_coverage", run.with_coverage}};
    if (run.coverage) j["coverage"] = to_json(*run.coverage);
    return j;
}

Json payload_json(const SourceChanged& change) {
    Json facts = Json::array();
    for (const auto& f : change.change_facts) facts.push_back(to_json(f));
    return Json{{"path", change.path}, {"file_class", to_string(change.file_class)}, {"facts", std::move(facts)}};
}

Json payload_json(const DebugRunStarted&) { return Json::object(); }

Json payload_json(const BreakpointSet& bp) { return Json{{"kind", to_string(bp.kind)}}; }

}  // namespace

std::string_view to_string(TestStatus status) { return name_of(status, kStatusNames); }
std::string_view to_string(FileClass file_class) { return name_of(file_class, kFileClassNames); }
std::string_view to_string(RefactoringType type) { return name_of(type, kRefactoringNames); }
std::string_view to_string(BreakpointKind kind) { return name_of(kind, kBreakpointNames); }

std::string_view event_kind(const EventPayload& payload) {
    struct Visitor {
        std::string_view operator()(const TestRunFinished&) const { return "test_run_finished"; }
        std::string_view operator()(const SourceChanged&) const { return "source_changed"; }
        std::string_view operator()(const DebugRunStarted&) const { return "debug_run_started"; }
        std::string_view operator()(const BreakpointSet&) const { return "breakpoint_set"; }
    };
    return std::visit(Visitor{}, payload);
}

Json to_json(const TestCaseResult& test) {
    Json j{{"class", test.class_name}, {"method", test.method_name}, {"status", to_string(test.status)}};
    if (test.failure_type) j["failure_type"] = *test.failure_type;
    return j;
}

Json to_json(const CoverageReport& report) {
    const auto& t = report.totals;
    Json totals{{"lines_covered", t.lines_covered},       {"lines_total", t.lines_total},
                {"branches_covered", t.branches_covered}, {"branches_total", t.branches_total},
                {"methods_covered", t.methods_covered},   {"methods_total", t.methods_total},
                {"classes_covered", t.classes_covered},   {"classes_total", t.classes_total}};
    Json per_class = Json::array();
    for (const auto& c : report.per_class) {
        per_class.push_back(Json{{"class", c.class_name},
                                 {"lines_covered", c.lines_covered},
                                 {"lines_total", c.lines_total},
                                 {"branches_covered", c.branches_covered},
                                 {"branches_total", c.branches_total},
                                 {"methods_covered", c.methods_covered},
                                 {"methods_total", c.methods_total}});
    }
    return Json{{"totals", std::move(totals)}, {"per_class", std::move(per_class)}};
}

Json to_json(const TestRunReport& report) {
    Json cases = Json::array();
    for (const auto& c : report.cases) cases.push_back(to_json(c));
    return Json{{"suite_id", report.suite_id}, {"cases", std::move(cases)}, {"produced_at", report.produced_at}};
}

Json to_json(const ChangeFact& fact) {
    struct Visitor {
        Json operator()(const TestMethodAdded& f) const {
            return Json{{"kind", "test_method_added"}, {"class", f.class_name}, {"method", f.method_name}};
        }
        Json operator()(const AssertionAddedToTest& f) const {
            return Json{{"kind", "assertion_added"}, {"class", f.class_name}, {"method", f.method_name}};
        }
        Json operator()(const PrintStatementAdded& f) const {
            return Json{{"kind", "print_statement_added"}, {"line", f.line}};
        }
        Json operator()(const RefactoringDetected& f) const {
            return Json{{"kind", "refactoring"},   {"type", to_string(f.rtype)}, {"class", f.class_name},
                        {"method", f.method},      {"target", f.target},         {"test_method", f.test_method}};
        }
        Json operator()(const GenericEdit&) const { return Json{{"kind", "generic_edit"}}; }
    };
    return std::visit(Visitor{}, fact);
}

Json to_json(const DevEvent& event) {
    return Json{{"ts", event.ts},
                {"session", event.session_id},
                {"kind", event_kind(event.payload)},
                {"payload", std::visit([](const auto& p) { return payload_json(p); }, event.payload)}};
}

TestCaseResult test_case_from_json(const Json& j) {
    TestCaseResult t;
    t.class_name = string_field(j, "class");
    t.method_name = string_field(j, "method");
    t.status = parse_enum(field(j, "status"), kStatusNames, "test status");
    if (const auto it = j.find("failure_type"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw InvalidEvent("failure_type must be a string");
        t.failure_type = it->get<std::string>();
    }
    return t;
}

CoverageReport coverage_from_json(const Json& j) {
    CoverageReport r;
    const auto& totals = field(j, "totals");
    if (!totals.is_object()) throw InvalidEvent("coverage totals must be an object");
    r.totals.lines_covered = count_field(totals, "lines_covered");
    r.totals.lines_total = count_field(totals, "lines_total");
    r.totals.branches_covered = count_field(totals, "branches_covered");
    r.totals.branches_total = count_field(totals, "branches_total");
    r.totals.methods_covered = count_field(totals, "methods_covered");
    r.totals.methods_total = count_field(totals, "methods_total");
    r.totals.classes_covered = count_field(totals, "classes_covered");
    r.totals.classes_total = count_field(totals, "classes_total");
    if (j.contains("per_class")) {
        for (const auto& c : array_field(j, "per_class")) {
            ClassCoverage cc;
            cc.class_name = string_field(c, "class");
            cc.lines_covered = count_field(c, "lines_covered");
            cc.lines_total = count_field(c, "lines_total");
            cc.branches_covered = count_field(c, "branches_covered");
            cc.branches_total = count_field(c, "branches_total");
            cc.methods_covered = count_field(c, "methods_covered");
            cc.methods_total = count_field(c, "methods_total");
            r.per_class.push_back(std::move(cc));
        }
    }
    return r;
}

TestRunReport test_run_from_json(const Json& j) {
    TestRunReport r;
    r.suite_id = string_field(j, "suite_id");
    for (const auto& c : array_field(j, "cases")) r.cases.push_back(test_case_from_json(c));
    if (const auto it = j.find("produced_at"); it != j.end() && it->is_number_integer()) {
        r.produced_at = it->get<std::int64_t>();
    }
    return r;
}

ChangeFact change_fact_from_json(const Json& j) {
    const auto kind = string_field(j, "kind");
    if (kind == "test_method_added") return TestMethodAdded{string_field(j, "class"), string_field(j, "method")};
    if (kind == "assertion_added") return AssertionAddedToTest{string_field(j, "class"), string_field(j, "method")};
    if (kind == "print_statement_added") return PrintStatementAdded{string_field(j, "line")};
    if (kind == "refactoring") {
        RefactoringDetected r;
        r.rtype = parse_enum(field(j, "type"), kRefactoringNames, "refactoring type");
        r.class_name = string_field(j, "class");
        r.method = string_field(j, "method");
        r.target = string_field(j, "target");
        r.test_method = bool_field(j, "test_method", false);
        return r;
    }
    if (kind == "generic_edit") return GenericEdit{};
    throw InvalidEvent("unknown change fact kind: " + kind);
}

DevEvent event_from_json(const Json& j) {
    if (!j.is_object()) throw InvalidEvent("event must be a JSON object");
    DevEvent event;
    const auto& ts = field(j, "ts");
    if (!ts.is_number_integer()) throw InvalidEvent("ts must be an integer (ms since epoch)");
    event.ts = ts.get<std::int64_t>();
    event.session_id = j.contains("session") ? string_field(j, "session") : std::string{};
    const auto kind = string_field(j, "kind");
    const Json empty = Json::object();
    const auto& payload = j.contains("payload") ? field(j, "payload") : empty;
    if (!payload.is_object()) throw InvalidEvent("payload must be an object");

    if (kind == "test_run_finished") {
        TestRunFinished run;
        run.suite_id = payload.contains("suite_id") ? string_field(payload, "suite_id") : std::string{};
        for (const auto& t : array_field(payload, "tests")) run.tests.push_back(test_case_from_json(t));
        run.with_coverage = bool_field(payload, "with_coverage", false);
        if (const auto it = payload.find("coverage"); it != payload.end() && !it->is_null()) {
            run.coverage = coverage_from_json(*it);
        }
        event.payload = std::move(run);
    } else if (kind == "source_changed") {
        SourceChanged change;
        change.path = string_field(payload, "path");
        change.file_class = parse_enum(field(payload, "file_class"), kFileClassNames, "file class");
        for (const auto& f : array_field(payload, "facts")) change.change_facts.push_back(change_fact_from_json(f));
        event.payload = std::move(change);
    } else if (kind == "debug_run_started") {
        event.payload = DebugRunStarted{};
    } else if (kind == "breakpoint_set") {
        event.payload = BreakpointSet{parse_enum(field(payload, "kind"), kBreakpointNames, "breakpoint kind")};
    } else {
        throw InvalidEvent("unknown event kind: " + kind);
    }
    validate(event);
    return event;
}

}  // namespace questd
