#pragma once

#include <cstdio>
#include <filesystem>
#include <istream>
#include <string>
#include <variant>
#include <vector>

#include "questd/engine.hpp"
#include "questd/json_codec.hpp"

namespace questd {

struct ResetMarker {
    std::int64_t ts = 0;
    bool operator==(const ResetMarker&) const = default;
};

/// Digest of the state after the preceding `position` entries.
struct Snapshot {
    std::int64_t ts = 0;
    std::string digest;
    std::uint64_t position = 0;
    bool operator==(const Snapshot&) const = default;
};

/// A wall-clock idle check that produced an encouragement in live mode.
struct Tick {
    std::int64_t ts = 0;
    bool operator==(const Tick&) const = default;
};

using LogEntry = std::variant<DevEvent, ResetMarker, Snapshot, Tick>;

std::int64_t entry_ts(const LogEntry& entry);

Json to_json(const LogEntry& entry);
/// Throws InvalidEvent.
LogEntry log_entry_from_json(const Json& j);

struct LogReadResult {
    std::vector<LogEntry> entries;
    /// The final line had no newline and did not parse: a write torn by a crash. It is dropped.
    bool torn_tail = false;
};

/// Throws InvalidEvent (with the line number) on a complete line that does not parse.
LogReadResult read_log(std::istream& in);
LogReadResult read_log_file(const std::filesystem::path& path);

struct ReplayResult {
    EngineState state;
    std::vector<Notification> notifications;
};

/// Folds one entry: events are preceded by an idle check at their timestamp, ticks run the
/// idle check, resets clear progress and snapshots are verified. Advances log_position.
/// Throws OutOfOrderEvent, SnapshotMismatch, InvalidEvent.
std::vector<Notification> fold_entry(EngineState& state, const LogEntry& entry, const EngineConfig& config);

/// Replays from the empty state installed at the first entry's timestamp.
ReplayResult replay(const std::vector<LogEntry>& entries, const EngineConfig& config = {});

/// Appends NDJSON lines, flushing and syncing each one before returning.
class EventLogWriter {
public:
    explicit EventLogWriter(const std::filesystem::path& path, bool sync = true);
    ~EventLogWriter();
    EventLogWriter(const EventLogWriter&) = delete;
    EventLogWriter& operator=(const EventLogWriter&) = delete;

    void append(const LogEntry& entry);

private:
    std::FILE* file_ = nullptr;
    bool sync_;
};

}  // namespace questd
