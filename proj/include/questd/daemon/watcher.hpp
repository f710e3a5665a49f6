#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "questd/daemon/config.hpp"
#include "questd/events.hpp"

namespace questd::daemon {

/// Polls the project tree and turns settled file changes into DevEvents:
/// JUnit reports (paired with a coverage report inside the pairing window) become
/// TestRunFinished, Java source edits become SourceChanged. Events leave in mtime order.
class Watcher {
public:
    using Sink = std::function<void(DevEvent)>;
    using Warn = std::function<void(const std::string&)>;

    /// Records the current tree as the baseline; existing files produce no events.
    /// Throws WatchUnavailable when the project root is missing or unreadable.
    Watcher(const Config& config, Sink sink, Warn warn = {});
    ~Watcher();
    Watcher(const Watcher&) = delete;
    Watcher& operator=(const Watcher&) = delete;

    /// Polls on a background thread until stop().
    void start();
    void stop();

    /// One scan at wall time `now_ms`; public so tests can drive the watcher without sleeping.
    void poll(std::int64_t now_ms);

    /// Poll interval derived from the debounce delay.
    std::chrono::milliseconds interval() const;

private:
    enum class Kind { JUnit, Coverage, Source };

    struct Observation {
        std::int64_t mtime_ms = 0;
        std::uintmax_t size = 0;
        bool operator==(const Observation&) const = default;
    };
    struct Pending {
        Observation observation;
        std::int64_t stable_since_ms = 0;
    };
    struct Ready {
        std::string path;
        Kind kind;
        Observation observation;
    };
    struct PendingRun {
        TestRunReport report;
        std::int64_t mtime_ms = 0;
        std::int64_t ready_at_ms = 0;
    };

    std::optional<Kind> kind_of(const std::string& relative) const;
    std::map<std::string, std::pair<Kind, Observation>> scan() const;
    void handle(const Ready& ready, std::int64_t now_ms);
    void flush_run();
    void emit(DevEvent event);

    Config config_;
    std::filesystem::path root_;
    std::optional<std::filesystem::path> skip_dir_;
    Sink sink_;
    Warn warn_;

    std::map<std::string, Observation> seen_;
    std::map<std::string, Pending> pending_;
    std::map<std::string, std::string> sources_;
    std::optional<PendingRun> run_;

    std::atomic<bool> stop_{false};
    std::thread thread_;
};

}  // namespace questd::daemon
