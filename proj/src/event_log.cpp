#include "questd/event_log.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "questd/errors.hpp"
#include "questd/state_io.hpp"

namespace questd {

std::int64_t entry_ts(const LogEntry& entry) {
    return std::visit([](const auto& e) { return e.ts; }, entry);
}

Json to_json(const LogEntry& entry) {
    struct Visitor {
        Json operator()(const DevEvent& e) const { return to_json(e); }
        Json operator()(const ResetMarker& r) const {
            return Json{{"ts", r.ts}, {"session", ""}, {"kind", "reset"}, {"payload", Json::object()}};
        }
        Json operator()(const Snapshot& s) const {
            return Json{{"ts", s.ts},
                        {"session", ""},
                        {"kind", "snapshot"},
                        {"payload", {{"digest", s.digest}, {"position", s.position}}}};
        }
        Json operator()(const Tick& t) const {
            return Json{{"ts", t.ts}, {"session", ""}, {"kind", "tick"}, {"payload", Json::object()}};
        }
    };
    return std::visit(Visitor{}, entry);
}

LogEntry log_entry_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        throw InvalidEvent("log line must be an object with a string 'kind'");
    }
    const auto& kind = j["kind"].get_ref<const std::string&>();
    if (kind != "reset" && kind != "snapshot" && kind != "tick") return event_from_json(j);

    if (!j.contains("ts") || !j["ts"].is_number_integer()) throw InvalidEvent("log line needs an integer ts");
    const auto ts = j["ts"].get<std::int64_t>();
    if (kind == "reset") return ResetMarker{ts};
    if (kind == "tick") return Tick{ts};
    try {
        const auto& payload = j.at("payload");
        return Snapshot{ts, payload.at("digest").get<std::string>(), payload.at("position").get<std::uint64_t>()};
    } catch (const std::exception& e) {
        throw InvalidEvent(std::string("snapshot line: ") + e.what());
    }
}

LogReadResult read_log(std::istream& in) {
    LogReadResult result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const bool complete = !in.eof();
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            result.entries.push_back(log_entry_from_json(Json::parse(line)));
        } catch (const std::exception& e) {
            if (!complete) {
                result.torn_tail = true;
                break;
            }
            throw InvalidEvent("log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return result;
}

LogReadResult read_log_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return read_log(in);
}

std::vector<Notification> fold_entry(EngineState& state, const LogEntry& entry, const EngineConfig& config) {
    std::vector<Notification> notifications;
    struct Visitor {
        EngineState& state;
        const EngineConfig& config;
        std::vector<Notification>& out;

        void operator()(const DevEvent& e) {
            if (e.ts < state.last_event_ts) {
                throw OutOfOrderEvent("log entry at " + std::to_string(e.ts) + " precedes " +
                                      std::to_string(state.last_event_ts));
            }
            if (auto encouragement = tick_in_place(state, e.ts, config)) out.push_back(std::move(*encouragement));
            auto applied = apply_in_place(state, e);
            out.insert(out.end(), applied.begin(), applied.end());
        }
        void operator()(const ResetMarker&) { state = reset(state, true); }
        void operator()(const Snapshot& s) {
            if (s.position != state.log_position || s.digest != digest(state)) {
                throw SnapshotMismatch("snapshot at position " + std::to_string(s.position) +
                                       " does not match the replayed state at position " +
                                       std::to_string(state.log_position));
            }
        }
        void operator()(const Tick& t) {
            if (auto encouragement = tick_in_place(state, t.ts, config)) out.push_back(std::move(*encouragement));
        }
    };
    std::visit(Visitor{state, config, notifications}, entry);
    ++state.log_position;
    return notifications;
}

ReplayResult replay(const std::vector<LogEntry>& entries, const EngineConfig& config) {
    ReplayResult result{initial_state(entries.empty() ? 0 : entry_ts(entries.front())), {}};
    for (const auto& entry : entries) {
        auto notifications = fold_entry(result.state, entry, config);
        result.notifications.insert(result.notifications.end(), notifications.begin(), notifications.end());
    }
    return result;
}

EventLogWriter::EventLogWriter(const std::filesystem::path& path, bool sync) : sync_(sync) {
    file_ = std::fopen(path.c_str(), "ab");
    if (!file_) throw std::runtime_error("cannot open event log " + path.string() + ": " + std::strerror(errno));
}

EventLogWriter::~EventLogWriter() {
    if (file_) std::fclose(file_);
}

void EventLogWriter::append(const LogEntry& entry) {
    const auto line = to_json(entry).dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
        throw std::runtime_error(std::string("event log write failed: ") + std::strerror(errno));
    }
    if (sync_) ::fsync(::fileno(file_));
}

}  // namespace questd
