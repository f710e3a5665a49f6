#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <sstream>

#include "questd/errors.hpp"
#include "questd/event_log.hpp"
#include "questd/state_io.hpp"
#include "support.hpp"

using namespace questd;
using namespace questd::testing;

namespace {

constexpr std::int64_t T0 = 1'700'000'000'000;

Json golden_rows(const EngineState& state) {
    Json rows = Json::array();
    const auto view = state_view(state);
    for (const auto& row : view.at("achievements")) {
        rows.push_back(Json{{"id", row.at("id")},
                            {"level", row.at("level")},
                            {"progress", row.at("progress")},
                            {"raw_progress", row.at("raw_progress")}});
    }
    return rows;
}

}  // namespace

TEST_CASE("log entries round-trip through JSON") {
    const std::vector<LogEntry> entries = {
        run_event(T0, {pass("A", "a"), fail("A", "b", "E")}, coverage_of({ClassCoverage{"A", 1, 2, 0, 0, 1, 1}})),
        change_event(T0, FileClass::Test,
                     {TestMethodAdded{"A", "a"}, AssertionAddedToTest{"A", "a"}, PrintStatementAdded{"x"},
                      RefactoringDetected{RefactoringType::InlineMethod, "A", "a", "h", true}, GenericEdit{}}),
        debug_event(T0),
        breakpoint_event(T0, BreakpointKind::FieldWatchpoint),
        ResetMarker{T0 + 1},
        Snapshot{T0 + 2, "abc", 4},
        Tick{T0 + 3},
    };
    for (const auto& entry : entries) {
        const auto line = to_json(entry).dump();
        CHECK(log_entry_from_json(Json::parse(line)) == entry);
    }
}

TEST_CASE("malformed log lines are rejected with their line number") {
    std::istringstream in(R"({"kind":"tick","ts":1}
{"kind":"debug_run_started","ts":2,"session":"s","payload":{}}
{"kind":"mystery","ts":3,"session":"s","payload":{}}
)");
    try {
        read_log(in);
        FAIL("expected InvalidEvent");
    } catch (const InvalidEvent& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    for (const auto* bad : {R"({"ts":1})", R"({"kind":"tick"})", R"({"kind":"snapshot","ts":1,"payload":{}})", "[1]"}) {
        INFO(bad);
        CHECK_THROWS_AS(log_entry_from_json(Json::parse(bad)), InvalidEvent);
    }
}

TEST_CASE("a torn final line is dropped") {
    std::istringstream in("{\"kind\":\"tick\",\"ts\":1}\n{\"kind\":\"tick\",\"ts\"");
    const auto result = read_log(in);
    CHECK(result.torn_tail);
    CHECK(result.entries.size() == 1);
    std::istringstream whole("{\"kind\":\"tick\",\"ts\":1}\n\n{\"kind\":\"tick\",\"ts\":2}");
    const auto ok = read_log(whole);
    CHECK_FALSE(ok.torn_tail);
    CHECK(ok.entries.size() == 2);
}

TEST_CASE("session fixture replays to the golden state and notifications") {
    const auto entries = session_log();
    const auto result = replay(entries);
    const auto golden = Json::parse(read_file(fixture("session/golden_state.json")));
    CHECK(golden_rows(result.state) == golden.at("achievements"));
    CHECK(result.state.installed_at == golden.at("installed_at").get<std::int64_t>());
    CHECK(result.state.log_position == golden.at("log_position").get<std::uint64_t>());
    CHECK(result.state.events_applied == golden.at("events_applied").get<std::uint64_t>());
    CHECK(result.state.last_event_ts == golden.at("last_event_ts").get<std::int64_t>());

    Json notifications = Json::array();
    for (const auto& n : result.notifications) notifications.push_back(to_json(n));
    CHECK(notifications == Json::parse(read_file(fixture("session/golden_notifications.json"))));
}

TEST_CASE("replay is deterministic and snapshots verify it") {
    auto entries = session_log();
    const auto a = replay(entries);
    const auto b = replay(entries);
    CHECK(digest(a.state) == digest(b.state));
    CHECK(save(a.state) == save(b.state));

    // A snapshot of the state after the first 10 entries verifies in place.
    std::vector<LogEntry> prefix(entries.begin(), entries.begin() + 10);
    const auto at10 = replay(prefix).state;
    entries.insert(entries.begin() + 10, Snapshot{entry_ts(entries[9]), digest(at10), 10});
    CHECK_NOTHROW(replay(entries));

    entries[10] = Snapshot{entry_ts(entries[9]), digest(at10), 9};
    CHECK_THROWS_AS(replay(entries), SnapshotMismatch);
    entries[10] = Snapshot{entry_ts(entries[9]), std::string(64, '0'), 10};
    CHECK_THROWS_AS(replay(entries), SnapshotMismatch);
}

TEST_CASE("replay rejects a log that goes back in time") {
    const std::vector<LogEntry> entries = {debug_event(T0 + 5), debug_event(T0 + 4)};
    CHECK_THROWS_AS(replay(entries), OutOfOrderEvent);
}

TEST_CASE("reset markers in a log clear progress but keep positions") {
    const std::vector<LogEntry> entries = {debug_event(T0), debug_event(T0 + 1), ResetMarker{T0 + 2}, debug_event(T0 + 3)};
    const auto state = replay(entries).state;
    CHECK(std::get<std::uint64_t>(state.progress[*index_of("the-debugger")]) == 1);
    CHECK(state.log_position == 4);
    CHECK(state.installed_at == T0);
}

TEST_CASE("ticks in the log run the idle check at their time") {
    const std::vector<LogEntry> entries = {Tick{T0}, debug_event(T0 + kMinuteMs), Tick{T0 + 31 * kMinuteMs},
                                           Tick{T0 + 32 * kMinuteMs}};
    const auto result = replay(entries);
    // The install encouragement and one idle encouragement; the Debugger below Bronze is silent.
    CHECK(result.notifications.size() == 2);
    CHECK(result.state.encouragement_cursor == 2);
}

TEST_CASE("state files round-trip and detect tampering") {
    const auto state = replay(session_log()).state;
    const auto bytes = save(state);
    CHECK(load(bytes) == state);

    auto doc = Json::parse(bytes);
    doc["state"]["events_applied"] = 1;
    CHECK_THROWS_AS(load(doc.dump()), CorruptState);

    doc = Json::parse(bytes);
    doc["schema_version"] = 2;
    CHECK_THROWS_AS(load(doc.dump()), CorruptState);

    doc = Json::parse(bytes);
    doc["state"]["achievements"]["the-debugger"]["level"] = "gold";
    doc["digest"] = "whatever";
    CHECK_THROWS_AS(load(doc.dump()), CorruptState);

    CHECK_THROWS_AS(load("not json"), CorruptState);
    CHECK_THROWS_AS(load("[]"), CorruptState);
    CHECK_THROWS_AS(load(bytes.substr(0, bytes.size() / 2)), CorruptState);
}

TEST_CASE("digests differ for different states") {
    auto a = initial_state(T0);
    auto b = a;
    CHECK(digest(a) == digest(b));
    apply_in_place(b, debug_event(T0));
    CHECK(digest(a) != digest(b));
    CHECK(digest(a).size() == 64);
}

TEST_CASE("state view rows and notification lines") {
    const auto view = state_view(initial_state(T0));
    CHECK(view.at("achievements").size() == 27);
    const auto& first = view.at("achievements")[0];
    CHECK(first.at("next_level") == "bronze");
    CHECK(first.at("next_threshold") == 3);
    CHECK(first.at("fraction") == 0.0);

    CHECK(render_line(Notification{T0, LevelUp{"the-tester", Level::Silver, 100}}) == "[LEVEL-UP] The Tester → Silver (100 runs)");
    CHECK(render_line(Notification{T0, ProgressMade{"test-executor", 0.5, Level::Silver, 52, 100}}) ==
          "[PROGRESS] Test Executor 50% of the way to Silver (52/100 tests)");
    CHECK(render_line(Notification{T0, Encouragement{"", "Keep going"}}) == "[ENCOURAGE] Keep going");
}

TEST_CASE("event log writer appends complete lines") {
    TempDir dir;
    const auto path = dir / "log.ndjson";
    {
        EventLogWriter writer(path, false);
        writer.append(Tick{T0});
        writer.append(debug_event(T0 + 1));
    }
    {
        EventLogWriter writer(path, false);
        writer.append(ResetMarker{T0 + 2});
    }
    const auto read = read_log_file(path);
    CHECK_FALSE(read.torn_tail);
    REQUIRE(read.entries.size() == 3);
    CHECK(std::holds_alternative<ResetMarker>(read.entries[2]));
    CHECK(read_log_file(dir / "missing.ndjson").entries.empty());
}
