#include "questd/daemon/watcher.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <fstream>
#include <iterator>

#include "questd/daemon/daemon.hpp"
#include "questd/errors.hpp"
#include "questd/ingestion/glob.hpp"
#include "questd/ingestion/parsers.hpp"

namespace questd::daemon {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::optional<std::int64_t> mtime_ms(const fs::path& path, std::uintmax_t& size) {
    struct stat st {};
    if (::stat(path.c_str(), &st) != 0) return std::nullopt;
    size = static_cast<std::uintmax_t>(st.st_size);
    return static_cast<std::int64_t>(st.st_mtim.tv_sec) * 1000 + st.st_mtim.tv_nsec / 1'000'000;
}

}  // namespace

Watcher::Watcher(const Config& config, Sink sink, Warn warn)
    : config_(config), sink_(std::move(sink)), warn_(std::move(warn)) {
    std::error_code ec;
    if (!fs::is_directory(config_.project_root, ec)) {
        throw WatchUnavailable("project root " + config_.project_root.string() + " is not a readable directory");
    }
    root_ = fs::canonical(config_.project_root, ec);
    if (ec) throw WatchUnavailable("cannot resolve project root " + config_.project_root.string() + ": " + ec.message());
    if (const auto state = fs::weakly_canonical(config_.state_dir, ec); !ec) skip_dir_ = state;

    for (const auto& [path, entry] : scan()) {
        seen_[path] = entry.second;
        if (entry.first == Kind::Source) sources_[path] = read_file(root_ / path);
    }
}

Watcher::~Watcher() { stop(); }

std::chrono::milliseconds Watcher::interval() const {
    return std::chrono::milliseconds(std::clamp<std::int64_t>(config_.debounce_ms / 4, 10, 100));
}

void Watcher::start() {
    if (thread_.joinable()) return;
    stop_ = false;
    thread_ = std::thread([this] {
        while (!stop_) {
            try {
                poll(wall_clock_ms());
            } catch (const std::exception& e) {
                if (warn_) warn_(std::string("watcher: ") + e.what());
            }
            std::this_thread::sleep_for(interval());
        }
    });
}

void Watcher::stop() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
}

std::optional<Watcher::Kind> Watcher::kind_of(const std::string& relative) const {
    if (ingestion::glob_match(config_.junit_glob, relative)) return Kind::JUnit;
    for (const auto& glob : config_.coverage_globs) {
        if (ingestion::glob_match(glob, relative)) return Kind::Coverage;
    }
    if (relative.ends_with(".java")) return Kind::Source;
    return std::nullopt;
}

std::map<std::string, std::pair<Watcher::Kind, Watcher::Observation>> Watcher::scan() const {
    std::map<std::string, std::pair<Kind, Observation>> found;
    std::error_code ec;
    fs::recursive_directory_iterator it(root_, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw WatchUnavailable("cannot read project root " + root_.string() + ": " + ec.message());
    for (const fs::recursive_directory_iterator end; it != end; it.increment(ec)) {
        if (ec) break;
        const auto& path = it->path();
        const auto name = path.filename().string();
        if (it->is_directory(ec)) {
            if (name.starts_with('.') || (skip_dir_ && path == *skip_dir_)) it.disable_recursion_pending();
            continue;
        }
        if (!it->is_regular_file(ec)) continue;
        const auto relative = path.lexically_relative(root_).generic_string();
        const auto kind = kind_of(relative);
        if (!kind) continue;
        std::uintmax_t size = 0;
        const auto mtime = mtime_ms(path, size);
        if (!mtime) continue;
        found.emplace(relative, std::make_pair(*kind, Observation{*mtime, size}));
    }
    return found;
}

void Watcher::poll(std::int64_t now_ms) {
    const auto current = scan();
    for (auto it = seen_.begin(); it != seen_.end();) {
        it = current.contains(it->first) ? std::next(it) : seen_.erase(it);
    }
    for (auto it = pending_.begin(); it != pending_.end();) {
        it = current.contains(it->first) ? std::next(it) : pending_.erase(it);
    }

    std::vector<Ready> ready;
    for (const auto& [path, entry] : current) {
        const auto& [kind, observation] = entry;
        if (const auto s = seen_.find(path); s != seen_.end() && s->second == observation) {
            pending_.erase(path);
            continue;
        }
        auto p = pending_.find(path);
        if (p == pending_.end() || !(p->second.observation == observation)) {
            pending_[path] = Pending{observation, now_ms};
            continue;
        }
        if (now_ms - p->second.stable_since_ms >= config_.debounce_ms) {
            ready.push_back(Ready{path, kind, observation});
            pending_.erase(p);
            seen_[path] = observation;
        }
    }
    std::sort(ready.begin(), ready.end(), [](const Ready& a, const Ready& b) {
        return std::tie(a.observation.mtime_ms, a.path) < std::tie(b.observation.mtime_ms, b.path);
    });

    for (const auto& r : ready) {
        // A later non-coverage change means no coverage report is coming for the pending run.
        if (run_ && r.kind != Kind::Coverage) flush_run();
        handle(r, now_ms);
    }
    if (run_ && now_ms - run_->ready_at_ms >= config_.coverage_pair_window_ms) flush_run();
}

void Watcher::handle(const Ready& ready, std::int64_t now_ms) {
    const auto path = root_ / ready.path;
    const auto ts = ready.observation.mtime_ms;
    switch (ready.kind) {
        case Kind::Source: {
            auto content = read_file(path);
            const auto previous = sources_.find(ready.path);
            if (previous != sources_.end() && previous->second == content) return;
            const auto prev = previous == sources_.end() ? std::nullopt : std::optional<std::string>(previous->second);
            const auto options = config_.classify();
            SourceChanged change{ready.path, ingestion::classify_file(ready.path, content, options),
                                 ingestion::classify_change(prev, content, ready.path, options)};
            sources_[ready.path] = std::move(content);
            emit(DevEvent{ts, "watch", std::move(change)});
            return;
        }
        case Kind::JUnit: {
            TestRunReport report;
            try {
                report = ingestion::parse_junit_xml(read_file(path));
            } catch (const MalformedReport& e) {
                if (warn_) warn_("skipping " + ready.path + ": " + e.what());
                return;
            }
            run_ = PendingRun{std::move(report), ts, now_ms};
            return;
        }
        case Kind::Coverage: {
            CoverageReport coverage;
            try {
                const auto bytes = read_file(path);
                coverage = ready.path.ends_with(".xml") ? ingestion::parse_jacoco_xml(bytes)
                                                        : ingestion::parse_lcov(bytes, ingestion::LcovMode::Lenient);
            } catch (const MalformedReport& e) {
                if (warn_) warn_("skipping " + ready.path + ": " + e.what());
                return;
            }
            if (run_ && std::abs(ts - run_->mtime_ms) <= config_.coverage_pair_window_ms) {
                TestRunFinished finished{run_->report.suite_id, std::move(run_->report.cases), true, std::move(coverage)};
                const auto run_ts = std::max(ts, run_->mtime_ms);
                run_.reset();
                emit(DevEvent{run_ts, "watch", std::move(finished)});
                return;
            }
            flush_run();
            emit(DevEvent{ts, "watch", TestRunFinished{fs::path(ready.path).stem().string(), {}, true, std::move(coverage)}});
            return;
        }
    }
}

void Watcher::flush_run() {
    if (!run_) return;
    auto run = std::move(*run_);
    run_.reset();
    emit(DevEvent{run.mtime_ms, "watch", TestRunFinished{run.report.suite_id, std::move(run.report.cases), false, {}}});
}

void Watcher::emit(DevEvent event) {
    try {
        sink_(std::move(event));
    } catch (const std::exception& e) {
        if (warn_) warn_(std::string("event rejected: ") + e.what());
    }
}

}  // namespace questd::daemon
