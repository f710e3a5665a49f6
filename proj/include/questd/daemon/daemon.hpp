#pragma once

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <future>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "questd/daemon/config.hpp"
#include "questd/daemon/feed.hpp"
#include "questd/daemon/state_lock.hpp"
#include "questd/event_log.hpp"

namespace questd::daemon {

using Clock = std::function<std::int64_t()>;

/// Milliseconds since the epoch.
std::int64_t wall_clock_ms();

/// Writes through a temporary file and rename, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes, bool sync);

/// Drops a final line without its newline from the log file. Returns true when bytes were removed.
bool truncate_torn_tail(const std::filesystem::path& log);

/// Read-only view of the persisted state: state.json, or a replay of the event log when the
/// state file is missing, corrupt or behind the log. Fresh installs read as initial_state(now).
EngineState read_state(const Config& config, const Clock& clock = wall_clock_ms);

/// Replaces the state directory's log and state with the given log. Holds the state lock.
/// Throws the replay errors, leaving the state directory untouched.
EngineState import_log(const Config& config, const std::filesystem::path& log);

struct Submitted {
    std::uint64_t log_position = 0;
    std::vector<Notification> notifications;
};

/// Owns the state directory: the write-ahead event log, state.json and the live feed.
/// Producers (API, watcher, idle ticker, CLI) hand entries to one consumer thread that appends
/// each entry to the log, folds it into the state, saves state.json and then broadcasts.
class Daemon {
public:
    /// Takes the state lock and recovers: loads state.json and folds the log tail past its
    /// position, or replays the whole log when the state file is unusable.
    /// Throws StateLocked, InvalidEvent, OutOfOrderEvent, SnapshotMismatch.
    explicit Daemon(Config config, Clock clock = wall_clock_ms);
    ~Daemon();
    Daemon(const Daemon&) = delete;
    Daemon& operator=(const Daemon&) = delete;

    /// Called on the consumer thread for each notification, before it is broadcast.
    void on_notification(std::function<void(const Notification&)> callback);

    /// Starts the consumer. A fresh state directory gets its installation tick first.
    void start();
    /// Drains the queue, stops the consumer and the ticker, and saves the state.
    void stop();

    /// Blocks until the event is logged and applied. Throws InvalidEvent, OutOfOrderEvent.
    Submitted submit(const DevEvent& event);
    /// As submit(), but an event older than the last applied one is moved up to its timestamp.
    Submitted submit_clamped(DevEvent event);
    /// Throws NotConfirmed unless confirmed.
    Submitted reset(bool confirmed);
    /// Logs and applies an idle check at clock() when it would produce an encouragement.
    Submitted tick();

    /// Runs tick() every `period` on a background thread until stop().
    void start_ticker(std::chrono::milliseconds period = std::chrono::seconds(1));

    std::shared_ptr<const EngineState> state() const;
    /// The GET /state document for the latest state.
    std::shared_ptr<const Json> view() const;
    Feed& feed() { return feed_; }
    const Config& config() const { return config_; }
    /// The recovery dropped a torn final log line.
    bool recovered_torn_tail() const { return torn_tail_; }

private:
    enum class JobKind { Event, ClampedEvent, Reset, Tick };
    struct Job {
        JobKind kind;
        LogEntry entry;
        std::promise<Submitted> done;
    };

    Submitted enqueue(JobKind kind, LogEntry entry);
    void run();
    Submitted process(Job& job);
    void append(const LogEntry& entry);
    void maybe_snapshot(std::vector<Notification>& notifications);
    void persist();
    void publish(const Json& before, const std::vector<Notification>& notifications);

    Config config_;
    Clock clock_;
    EngineConfig engine_;
    StateLock lock_;
    std::unique_ptr<EventLogWriter> writer_;
    Feed feed_;

    // Consumer-owned.
    EngineState state_;
    std::uint64_t events_since_snapshot_ = 0;
    std::uint64_t appends_ = 0;
    bool fresh_ = false;
    bool torn_tail_ = false;
    std::function<void(const Notification&)> on_notification_;

    mutable std::mutex published_mutex_;
    std::shared_ptr<const EngineState> published_state_;
    std::shared_ptr<const Json> published_view_;

    std::mutex queue_mutex_;
    std::condition_variable queue_changed_;
    std::deque<std::unique_ptr<Job>> queue_;
    bool stopping_ = false;
    std::thread consumer_;

    std::mutex ticker_mutex_;
    std::condition_variable ticker_wake_;
    bool ticker_stop_ = false;
    std::thread ticker_;
};

}  // namespace questd::daemon
