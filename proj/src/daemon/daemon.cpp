#include "questd/daemon/daemon.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <fstream>
#include <iterator>

#include "questd/errors.hpp"
#include "questd/state_io.hpp"

namespace questd::daemon {

namespace {

struct Recovered {
    EngineState state;
    std::uint64_t events_since_snapshot = 0;
    bool empty_log = true;
};

std::uint64_t events_after_last_snapshot(const std::vector<LogEntry>& entries) {
    std::uint64_t count = 0;
    for (const auto& entry : entries) {
        if (std::holds_alternative<Snapshot>(entry)) count = 0;
        if (std::holds_alternative<DevEvent>(entry)) ++count;
    }
    return count;
}

std::optional<EngineState> load_state_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return load(bytes);
    } catch (const CorruptState&) {
        return std::nullopt;
    }
}

/// The log is authoritative: a state file that is unusable or ahead of the log is discarded.
Recovered recover(const Config& config, std::int64_t now) {
    const auto entries = read_log_file(config.log_file()).entries;
    const auto engine = config.engine();
    Recovered result;
    result.empty_log = entries.empty();
    result.events_since_snapshot = events_after_last_snapshot(entries);

    if (auto loaded = load_state_file(config.state_file()); loaded && loaded->log_position <= entries.size()) {
        try {
            for (auto i = loaded->log_position; i < entries.size(); ++i) fold_entry(*loaded, entries[i], engine);
            result.state = std::move(*loaded);
            return result;
        } catch (const Error&) {
            // The state file does not belong to this log; fall through to a full replay.
        }
    }
    result.state = entries.empty() ? initial_state(now) : replay(entries, engine).state;
    return result;
}

/// Creates the state directory and returns its lock file path.
std::filesystem::path ensure_state_dir(const Config& config) {
    std::error_code ec;
    std::filesystem::create_directories(config.state_dir, ec);
    if (ec) throw ConfigError("cannot create state directory " + config.state_dir.string() + ": " + ec.message());
    return config.lock_file();
}

Json state_delta(const Json& before, const Json& after) {
    Json changed = Json::array();
    const auto& old_rows = before.at("achievements");
    const auto& new_rows = after.at("achievements");
    for (std::size_t i = 0; i < new_rows.size(); ++i) {
        if (i >= old_rows.size() || old_rows[i] != new_rows[i]) changed.push_back(new_rows[i]);
    }
    return Json{{"type", "state_delta"},
                {"log_position", after.at("log_position")},
                {"events_applied", after.at("events_applied")},
                {"digest", after.at("digest")},
                {"achievements", std::move(changed)}};
}

}  // namespace

std::int64_t wall_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes, bool sync) {
    const auto tmp = path.string() + ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw std::runtime_error("cannot write " + tmp + ": " + std::strerror(errno));
    std::size_t written = 0;
    while (written < bytes.size()) {
        const auto n = ::write(fd, bytes.data() + written, bytes.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const auto message = std::string(std::strerror(errno));
            ::close(fd);
            throw std::runtime_error("cannot write " + tmp + ": " + message);
        }
        written += static_cast<std::size_t>(n);
    }
    if (sync) ::fsync(fd);
    ::close(fd);
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw std::runtime_error("cannot replace " + path.string() + ": " + std::strerror(errno));
    }
}

bool truncate_torn_tail(const std::filesystem::path& log) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(log, ec);
    if (ec || size == 0) return false;
    std::ifstream in(log, std::ios::binary);
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.back() == '\n') return false;
    const auto last_newline = bytes.rfind('\n');
    std::filesystem::resize_file(log, last_newline == std::string::npos ? 0 : last_newline + 1);
    return true;
}

EngineState read_state(const Config& config, const Clock& clock) { return recover(config, clock()).state; }

EngineState import_log(const Config& config, const std::filesystem::path& log) {
    StateLock lock(ensure_state_dir(config));
    if (!std::filesystem::is_regular_file(log)) throw InvalidEvent("log file not found: " + log.string());
    const auto read = read_log_file(log);
    auto state = read.entries.empty() ? initial_state(wall_clock_ms()) : replay(read.entries, config.engine()).state;
    std::string bytes;
    for (const auto& entry : read.entries) bytes += to_json(entry).dump() + "\n";
    write_file_atomic(config.log_file(), bytes, config.fsync_log);
    write_file_atomic(config.state_file(), save(state), config.fsync_log);
    return state;
}

Daemon::Daemon(Config config, Clock clock)
    : config_(std::move(config)), clock_(std::move(clock)), engine_(config_.engine()), lock_(ensure_state_dir(config_)) {
    torn_tail_ = truncate_torn_tail(config_.log_file());
    auto recovered = recover(config_, clock_());
    state_ = std::move(recovered.state);
    events_since_snapshot_ = recovered.events_since_snapshot;
    fresh_ = recovered.empty_log && state_.log_position == 0;
    writer_ = std::make_unique<EventLogWriter>(config_.log_file(), config_.fsync_log);

    // A crash between an event and its snapshot leaves the snapshot owed.
    std::vector<Notification> ignored;
    maybe_snapshot(ignored);
    persist();
    published_view_ = std::make_shared<const Json>(state_view(state_));
}

Daemon::~Daemon() { stop(); }

void Daemon::on_notification(std::function<void(const Notification&)> callback) {
    on_notification_ = std::move(callback);
}

void Daemon::start() {
    if (consumer_.joinable()) return;
    {
        std::lock_guard lock(queue_mutex_);
        stopping_ = false;
    }
    consumer_ = std::thread([this] { run(); });
    if (fresh_) {
        fresh_ = false;
        enqueue(JobKind::Tick, Tick{state_.installed_at});
    }
}

void Daemon::stop() {
    {
        std::lock_guard lock(ticker_mutex_);
        ticker_stop_ = true;
    }
    ticker_wake_.notify_all();
    if (ticker_.joinable()) ticker_.join();
    {
        std::lock_guard lock(queue_mutex_);
        stopping_ = true;
    }
    queue_changed_.notify_all();
    if (consumer_.joinable()) {
        consumer_.join();
        persist();
    }
    feed_.close();
}

Submitted Daemon::submit(const DevEvent& event) { return enqueue(JobKind::Event, event); }

Submitted Daemon::submit_clamped(DevEvent event) { return enqueue(JobKind::ClampedEvent, std::move(event)); }

Submitted Daemon::reset(bool confirmed) {
    if (!confirmed) throw NotConfirmed("reset needs explicit confirmation");
    return enqueue(JobKind::Reset, ResetMarker{clock_()});
}

Submitted Daemon::tick() { return enqueue(JobKind::Tick, Tick{clock_()}); }

void Daemon::start_ticker(std::chrono::milliseconds period) {
    if (ticker_.joinable()) return;
    ticker_stop_ = false;
    ticker_ = std::thread([this, period] {
        std::unique_lock lock(ticker_mutex_);
        while (!ticker_wake_.wait_for(lock, period, [this] { return ticker_stop_; })) {
            lock.unlock();
            try {
                tick();
            } catch (const std::exception&) {
                // The consumer is shutting down.
            }
            lock.lock();
        }
    });
}

std::shared_ptr<const EngineState> Daemon::state() const {
    std::lock_guard lock(published_mutex_);
    return published_state_;
}

std::shared_ptr<const Json> Daemon::view() const {
    std::lock_guard lock(published_mutex_);
    return published_view_;
}

Submitted Daemon::enqueue(JobKind kind, LogEntry entry) {
    auto job = std::make_unique<Job>(Job{kind, std::move(entry), {}});
    auto result = job->done.get_future();
    {
        std::lock_guard lock(queue_mutex_);
        if (stopping_ || !consumer_.joinable()) throw std::logic_error("daemon is not running");
        queue_.push_back(std::move(job));
    }
    queue_changed_.notify_one();
    return result.get();
}

void Daemon::run() {
    for (;;) {
        std::unique_ptr<Job> job;
        {
            std::unique_lock lock(queue_mutex_);
            queue_changed_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
            if (queue_.empty()) return;
            job = std::move(queue_.front());
            queue_.pop_front();
        }
        try {
            job->done.set_value(process(*job));
        } catch (...) {
            job->done.set_exception(std::current_exception());
        }
    }
}

Submitted Daemon::process(Job& job) {
    switch (job.kind) {
        case JobKind::Event:
        case JobKind::ClampedEvent: {
            auto& event = std::get<DevEvent>(job.entry);
            validate(event);
            if (event.ts < state_.last_event_ts) {
                if (job.kind == JobKind::Event) {
                    throw OutOfOrderEvent("event at " + std::to_string(event.ts) + " precedes the last applied event at " +
                                          std::to_string(state_.last_event_ts));
                }
                event.ts = state_.last_event_ts;
            }
            break;
        }
        case JobKind::Tick:
            // Only ticks that fire are logged.
            if (!questd::tick(state_, std::get<Tick>(job.entry).ts, engine_).encouragement) {
                return Submitted{state_.log_position, {}};
            }
            break;
        case JobKind::Reset:
            break;
    }

    const auto before = view();
    append(job.entry);
    auto notifications = fold_entry(state_, job.entry, engine_);
    Submitted result{state_.log_position, notifications};
    if (job.kind == JobKind::Event || job.kind == JobKind::ClampedEvent) {
        ++events_since_snapshot_;
        maybe_snapshot(notifications);
    }
    persist();
    publish(*before, notifications);
    return result;
}

void Daemon::append(const LogEntry& entry) {
    writer_->append(entry);
    ++appends_;
    if (config_.crash_after_appends && appends_ == *config_.crash_after_appends) std::raise(SIGKILL);
}

void Daemon::maybe_snapshot(std::vector<Notification>& notifications) {
    if (config_.snapshot_every == 0 || events_since_snapshot_ < config_.snapshot_every) return;
    const Snapshot snapshot{state_.last_event_ts, digest(state_), state_.log_position};
    append(snapshot);
    auto extra = fold_entry(state_, snapshot, engine_);
    notifications.insert(notifications.end(), extra.begin(), extra.end());
    events_since_snapshot_ = 0;
}

void Daemon::persist() {
    write_file_atomic(config_.state_file(), save(state_), config_.fsync_log);
    auto snapshot = std::make_shared<const EngineState>(state_);
    std::lock_guard lock(published_mutex_);
    published_state_ = std::move(snapshot);
}

void Daemon::publish(const Json& before, const std::vector<Notification>& notifications) {
    auto after = std::make_shared<const Json>(state_view(state_));
    {
        std::lock_guard lock(published_mutex_);
        published_view_ = after;
    }
    for (const auto& n : notifications) {
        if (on_notification_) on_notification_(n);
        feed_.publish(Json{{"type", "notification"}, {"notification", to_json(n)}}.dump());
    }
    feed_.publish(state_delta(before, *after).dump());
}

}  // namespace questd::daemon
