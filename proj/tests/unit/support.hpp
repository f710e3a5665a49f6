#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

#include "questd/events.hpp"
#include "questd/event_log.hpp"

namespace questd::testing {

inline std::filesystem::path fixture(const std::string& relative) {
    return std::filesystem::path(QUESTD_FIXTURES_DIR) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng{std::random_device{}()};
        path_ = std::filesystem::temp_directory_path() /
                ("questd-test-" + std::to_string(::getpid()) + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline TestCaseResult pass(std::string cls, std::string method) {
    return TestCaseResult{std::move(cls), std::move(method), TestStatus::Passed, std::nullopt};
}

inline TestCaseResult fail(std::string cls, std::string method, std::string type = "java.lang.AssertionError") {
    return TestCaseResult{std::move(cls), std::move(method), TestStatus::Failed, std::move(type)};
}

inline DevEvent run_event(std::int64_t ts, std::vector<TestCaseResult> tests,
                          std::optional<CoverageReport> coverage = std::nullopt) {
    TestRunFinished run{"suite", std::move(tests), coverage.has_value(), std::move(coverage)};
    return DevEvent{ts, "test", std::move(run)};
}

inline DevEvent change_event(std::int64_t ts, FileClass file_class, std::vector<ChangeFact> facts,
                             std::string path = "src/Foo.java") {
    return DevEvent{ts, "test", SourceChanged{std::move(path), file_class, std::move(facts)}};
}

inline DevEvent debug_event(std::int64_t ts) { return DevEvent{ts, "test", DebugRunStarted{}}; }

inline DevEvent breakpoint_event(std::int64_t ts, BreakpointKind kind) {
    return DevEvent{ts, "test", BreakpointSet{kind}};
}

/// A coverage report whose totals equal its per-class sums.
inline CoverageReport coverage_of(std::vector<ClassCoverage> classes) {
    CoverageReport report;
    report.per_class = std::move(classes);
    report.totals = sum_per_class(report.per_class);
    return report;
}

inline std::vector<LogEntry> session_log() { return read_log_file(fixture("session/session.ndjson")).entries; }

}  // namespace questd::testing
