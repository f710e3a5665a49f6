#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <catch2/catch_amalgamated.hpp>
#include <csignal>

#include "questd/daemon/config.hpp"
#include "questd/daemon/daemon.hpp"
#include "questd/daemon/feed.hpp"
#include "questd/daemon/watcher.hpp"
#include "questd/errors.hpp"
#include "questd/state_io.hpp"
#include "support.hpp"

using namespace questd;
using namespace questd::daemon;
using namespace questd::testing;

namespace {

constexpr std::int64_t T0 = 1'760'000'000'000;

Config test_config(const std::filesystem::path& dir) {
    Config config;
    config.state_dir = dir / "state";
    config.project_root = dir / "project";
    config.api_port = 0;
    config.fsync_log = false;
    return config;
}

struct FakeClock {
    std::shared_ptr<std::atomic<std::int64_t>> now = std::make_shared<std::atomic<std::int64_t>>(T0);
    Clock clock() const {
        return [n = now] { return n->load(); };
    }
};

std::vector<LogEntry> log_of(const Config& config) { return read_log_file(config.log_file()).entries; }

DevEvent writes_tests(std::int64_t ts, int n) {
    std::vector<ChangeFact> facts;
    for (int i = 0; i < n; ++i) facts.push_back(TestMethodAdded{"FooTest", "t" + std::to_string(i)});
    return change_event(ts, FileClass::Test, facts, "src/test/java/FooTest.java");
}

}  // namespace

TEST_CASE("config documents overlay defaults and reject unknown keys") {
    Config config;
    apply_json(config, Json::parse(R"({"idle_minutes": 7, "api_port": 9000, "reports": {"coverage_glob": "x.lcov"},
                                       "test_roots": "t/**", "dashboard_dir": "/srv/ui"})"));
    CHECK(config.idle_minutes == 7);
    CHECK(config.api_port == 9000);
    CHECK(config.coverage_globs == std::vector<std::string>{"x.lcov"});
    CHECK(config.test_roots == std::vector<std::string>{"t/**"});
    CHECK(config.dashboard_dir == std::filesystem::path("/srv/ui"));
    CHECK(config.engine().idle_ms == 7 * kMinuteMs);
    config.experiment_mode = true;
    CHECK(config.engine().idle_ms == 5 * kMinuteMs);

    for (const auto* bad : {R"({"nope": 1})", R"({"api_port": "x"})", R"({"api_port": 70000})",
                            R"({"idle_minutes": -1})", R"({"reports": {"other": 1}})", "[]"}) {
        INFO(bad);
        Config c;
        CHECK_THROWS_AS(apply_json(c, Json::parse(bad)), ConfigError);
    }

    Config original;
    original.state_dir = "/tmp/q";
    original.snapshot_every = 9;
    Config copy;
    apply_json(copy, to_json(original));
    CHECK(to_json(copy) == to_json(original));
}

TEST_CASE("environment variables overlay the config") {
    Config config;
    apply_env(config, {{"QUESTD_API_PORT", "0"}, {"QUESTD_COVERAGE_GLOB", "a.xml,,b.info"},
                       {"QUESTD_EXPERIMENT_MODE", "yes"}, {"QUESTD_CONFIG", "/ignored"},
                       {"QUESTD_CRASH_AFTER_APPENDS", "4"}});
    CHECK(config.api_port == 0);
    CHECK(config.coverage_globs == std::vector<std::string>{"a.xml", "b.info"});
    CHECK(config.experiment_mode);
    CHECK(config.crash_after_appends == 4u);
    CHECK_THROWS_AS(apply_env(config, {{"QUESTD_API_PORT", "80a"}}), ConfigError);
    CHECK_THROWS_AS(apply_env(config, {{"QUESTD_FSYNC_LOG", "maybe"}}), ConfigError);
    CHECK_THROWS_AS(load_config(std::filesystem::path("/nonexistent/questd.json")), ConfigError);
}

TEST_CASE("the feed delivers lines in order and reports lag") {
    Feed feed(3);
    std::uint64_t cursor = feed.head();
    feed.publish("a");
    feed.publish("b");
    auto batch = feed.wait(cursor, std::chrono::milliseconds(10));
    CHECK(batch.lines == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(batch.lagged);
    for (const auto* line : {"c", "d", "e", "f"}) feed.publish(line);
    batch = feed.wait(cursor, std::chrono::milliseconds(10));
    CHECK(batch.lagged);
    CHECK(batch.lines == std::vector<std::string>{"d", "e", "f"});
    CHECK(feed.wait(cursor, std::chrono::milliseconds(5)).lines.empty());
    feed.close();
    CHECK(feed.wait(cursor, std::chrono::milliseconds(5)).closed);
}

TEST_CASE("a fresh daemon logs its installation tick first") {
    TempDir dir;
    const auto config = test_config(dir.path());
    FakeClock clock;
    std::vector<Notification> seen;
    {
        Daemon d(config, clock.clock());
        d.on_notification([&](const Notification& n) { seen.push_back(n); });
        d.start();
        d.submit(writes_tests(T0 + 1000, 10));
        d.stop();
    }
    const auto entries = log_of(config);
    REQUIRE(entries.size() == 2);
    CHECK(std::get<Tick>(entries[0]).ts == T0);
    REQUIRE(seen.size() == 2);
    CHECK(std::holds_alternative<Encouragement>(seen[0].kind));
    CHECK(std::get<LevelUp>(seen[1].kind).achievement == "safety-first");

    // A restart is not fresh and recovers the same state.
    Daemon again(config, clock.clock());
    again.start();
    again.stop();
    CHECK(log_of(config).size() == 2);
    CHECK(digest(*again.state()) == digest(replay(entries).state));
}

TEST_CASE("a second daemon on the same state directory is refused") {
    TempDir dir;
    const auto config = test_config(dir.path());
    Daemon first(config);
    CHECK_THROWS_AS(Daemon(config), StateLocked);
}

TEST_CASE("strict and clamped submission of late events") {
    TempDir dir;
    const auto config = test_config(dir.path());
    FakeClock clock;
    Daemon d(config, clock.clock());
    d.start();
    d.submit(debug_event(T0 + 5000));
    CHECK_THROWS_AS(d.submit(debug_event(T0 + 4000)), OutOfOrderEvent);
    const auto accepted = d.submit_clamped(debug_event(T0 + 4000));
    CHECK(accepted.log_position == 3);
    CHECK(d.state()->last_event_ts == T0 + 5000);
    CHECK_THROWS_AS(d.submit(change_event(T0 + 6000, FileClass::Test, {})), InvalidEvent);
    CHECK_THROWS_AS(d.reset(false), NotConfirmed);
    d.stop();
    const auto entries = log_of(config);
    REQUIRE(entries.size() == 3);
    CHECK(std::get<DevEvent>(entries[2]).ts == T0 + 5000);
}

TEST_CASE("reset is logged and keeps the installation time") {
    TempDir dir;
    const auto config = test_config(dir.path());
    FakeClock clock;
    Daemon d(config, clock.clock());
    d.start();
    d.submit(writes_tests(T0 + 10, 12));
    clock.now->store(T0 + 20);
    const auto r = d.reset(true);
    CHECK(r.log_position == 3);
    const auto state = d.state();
    CHECK(state->installed_at == T0);
    CHECK(state->awarded == initial_state(T0).awarded);
    d.stop();
    CHECK(std::holds_alternative<ResetMarker>(log_of(config).back()));
}

TEST_CASE("snapshots are appended every N events and verified on replay") {
    TempDir dir;
    auto config = test_config(dir.path());
    config.snapshot_every = 3;
    Daemon d(config);
    d.start();
    for (int i = 0; i < 7; ++i) d.submit(debug_event(T0 + i));
    d.stop();
    const auto entries = log_of(config);
    std::size_t snapshots = 0;
    for (const auto& e : entries) snapshots += std::holds_alternative<Snapshot>(e);
    CHECK(snapshots == 2);
    CHECK(std::holds_alternative<Snapshot>(entries[4]));
    CHECK_NOTHROW(replay(entries));
}

TEST_CASE("idle ticks are logged only when they fire") {
    TempDir dir;
    auto config = test_config(dir.path());
    config.idle_minutes = 1;
    FakeClock clock;
    Daemon d(config, clock.clock());
    d.start();
    d.submit(debug_event(T0 + 1000));
    clock.now->store(T0 + 30'000);
    CHECK(d.tick().notifications.empty());
    clock.now->store(T0 + 1000 + kMinuteMs);
    CHECK(d.tick().notifications.size() == 1);
    d.stop();
    const auto entries = log_of(config);
    REQUIRE(entries.size() == 3);
    CHECK(std::get<Tick>(entries[2]).ts == T0 + 1000 + kMinuteMs);
}

TEST_CASE("recovery trusts the log over the state file") {
    TempDir dir;
    const auto config = test_config(dir.path());
    {
        Daemon d(config);
        d.start();
        d.submit(writes_tests(T0 + 1, 10));
        d.submit(debug_event(T0 + 2));
        d.stop();
    }
    const auto expected = digest(replay(log_of(config)).state);

    SECTION("corrupt state file") { write_file(config.state_file(), "{not json"); }
    SECTION("state file ahead of the log") {
        auto ahead = load(read_file(config.state_file()));
        ahead.log_position += 5;
        write_file(config.state_file(), save(ahead));
    }
    SECTION("state file behind the log") {
        const auto entries = log_of(config);
        auto behind = replay(std::vector<LogEntry>(entries.begin(), entries.begin() + 1)).state;
        write_file(config.state_file(), save(behind));
    }
    SECTION("missing state file") { std::filesystem::remove(config.state_file()); }
    SECTION("torn final line") {
        std::ofstream(config.log_file(), std::ios::app) << "{\"kind\":\"tick\",\"ts\"";
    }

    CHECK(digest(read_state(config)) == expected);
    Daemon d(config);
    CHECK(digest(*d.state()) == expected);
    CHECK(load(read_file(config.state_file())).log_position == 3);
}

TEST_CASE("a torn tail is truncated on start") {
    TempDir dir;
    const auto log = dir / "events.ndjson";
    write_file(log, "{\"kind\":\"tick\",\"ts\":1}\n{\"kind\"");
    CHECK(truncate_torn_tail(log));
    CHECK(read_file(log) == "{\"kind\":\"tick\",\"ts\":1}\n");
    CHECK_FALSE(truncate_torn_tail(log));
}

TEST_CASE("crashing after any append leaves a recoverable state directory") {
    for (std::uint64_t k = 1; k <= 12; ++k) {
        INFO("crash after append " << k);
        TempDir dir;
        auto config = test_config(dir.path());
        config.snapshot_every = 4;
        config.crash_after_appends = k;
        const pid_t child = ::fork();
        REQUIRE(child >= 0);
        if (child == 0) {
            try {
                Daemon d(config, [] { return T0; });
                d.start();
                for (int i = 0; i < 20; ++i) d.submit(i % 2 ? debug_event(T0 + i) : writes_tests(T0 + i, 3));
            } catch (...) {
            }
            ::_exit(0);
        }
        int status = 0;
        ::waitpid(child, &status, 0);
        REQUIRE(WIFSIGNALED(status));
        CHECK(WTERMSIG(status) == SIGKILL);

        const auto logged = log_of(config);
        CHECK(logged.size() == k);
        config.crash_after_appends.reset();
        Daemon recovered(config);
        const auto entries = log_of(config);
        CHECK(digest(*recovered.state()) == digest(replay(entries).state));
        CHECK(recovered.state()->log_position == entries.size());
    }
}

TEST_CASE("import_log replaces the state directory") {
    TempDir dir;
    const auto config = test_config(dir.path());
    const auto source = dir / "session.ndjson";
    std::filesystem::copy_file(fixture("session/session.ndjson"), source);
    const auto state = import_log(config, source);
    CHECK(digest(state) == digest(replay(session_log()).state));
    CHECK(digest(read_state(config)) == digest(state));
    CHECK_THROWS_AS(import_log(config, dir / "missing.ndjson"), InvalidEvent);
}

namespace {

struct WatchRig {
    TempDir dir;
    Config config;
    std::vector<DevEvent> events;
    std::vector<std::string> warnings;
    std::int64_t now = T0;

    WatchRig() : config(test_config(dir.path())) {
        std::filesystem::create_directories(config.project_root);
        config.debounce_ms = 200;
        config.coverage_pair_window_ms = 5000;
    }
    std::unique_ptr<Watcher> watcher() {
        return std::make_unique<Watcher>(
            config, [this](DevEvent e) { events.push_back(std::move(e)); },
            [this](const std::string& w) { warnings.push_back(w); });
    }
    void settle(Watcher& w) {
        w.poll(now);
        now += config.debounce_ms;
        w.poll(now);
    }
};

constexpr const char* kTestV1 = "class FooTest {\n  @Test void a() { assertTrue(true); }\n}\n";
constexpr const char* kTestV2 =
    "class FooTest {\n  @Test void a() { assertTrue(true); }\n  @Test void b() { assertEquals(1, 1); }\n}\n";

}  // namespace

TEST_CASE("the watcher turns settled source edits into change events") {
    WatchRig rig;
    const auto file = rig.config.project_root / "src/test/java/FooTest.java";
    write_file(file, kTestV1);
    auto w = rig.watcher();
    rig.settle(*w);
    CHECK(rig.events.empty());  // baseline files are not events

    write_file(file, kTestV2);
    w->poll(rig.now);
    CHECK(rig.events.empty());  // not settled yet
    rig.now += rig.config.debounce_ms;
    w->poll(rig.now);
    REQUIRE(rig.events.size() == 1);
    const auto& change = std::get<SourceChanged>(rig.events[0].payload);
    CHECK(change.file_class == FileClass::Test);
    CHECK(change.path == "src/test/java/FooTest.java");
    CHECK(std::find(change.change_facts.begin(), change.change_facts.end(), ChangeFact{TestMethodAdded{"FooTest", "b"}}) !=
          change.change_facts.end());
}

TEST_CASE("the watcher pairs a JUnit report with coverage inside the window") {
    WatchRig rig;
    auto w = rig.watcher();
    rig.settle(*w);
    write_file(rig.config.project_root / "target/surefire-reports/TEST-FooTest.xml",
               read_file(fixture("junit/all_passed_surefire.xml")));
    rig.settle(*w);
    CHECK(rig.events.empty());
    write_file(rig.config.project_root / "target/site/jacoco.xml", read_file(fixture("jacoco/two_classes.xml")));
    rig.settle(*w);
    REQUIRE(rig.events.size() == 1);
    const auto& run = std::get<TestRunFinished>(rig.events[0].payload);
    CHECK(run.with_coverage);
    CHECK(run.coverage.has_value());
    CHECK_FALSE(run.tests.empty());
}

TEST_CASE("an unpaired JUnit report is flushed after the window") {
    WatchRig rig;
    auto w = rig.watcher();
    rig.settle(*w);
    write_file(rig.config.project_root / "build/TEST-BarTest.xml", read_file(fixture("junit/all_passed_surefire.xml")));
    rig.settle(*w);
    CHECK(rig.events.empty());
    rig.now += rig.config.coverage_pair_window_ms;
    w->poll(rig.now);
    REQUIRE(rig.events.size() == 1);
    CHECK_FALSE(std::get<TestRunFinished>(rig.events[0].payload).with_coverage);
}

TEST_CASE("the watcher warns about malformed reports and missing roots") {
    WatchRig rig;
    auto w = rig.watcher();
    rig.settle(*w);
    write_file(rig.config.project_root / "TEST-Broken.xml", "<testsuite");
    rig.settle(*w);
    CHECK(rig.events.empty());
    REQUIRE(rig.warnings.size() == 1);
    CHECK(rig.warnings[0].find("TEST-Broken.xml") != std::string::npos);

    auto missing = rig.config;
    missing.project_root = rig.dir / "nowhere";
    CHECK_THROWS_AS(Watcher(missing, [](DevEvent) {}), WatchUnavailable);
}
