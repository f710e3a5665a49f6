// questd: command-line entry point for the achievement engine.
#include <CLI11.hpp>

#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "questd/daemon/api.hpp"
#include "questd/daemon/daemon.hpp"
#include "questd/daemon/watcher.hpp"
#include "questd/errors.hpp"
#include "questd/group_report.hpp"
#include "questd/ingestion/glob.hpp"
#include "questd/ingestion/parsers.hpp"
#include "questd/state_io.hpp"

namespace fs = std::filesystem;
using namespace questd;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Options {
    std::optional<fs::path> config_path;
    std::optional<fs::path> state_dir;
    std::optional<fs::path> project_root;
    std::optional<int> port;
    bool experiment = false;
};

daemon::Config resolve_config(const Options& o) {
    auto config = daemon::load_config(o.config_path);
    if (o.state_dir) config.state_dir = *o.state_dir;
    if (o.project_root) config.project_root = *o.project_root;
    if (o.port) {
        if (*o.port < 0 || *o.port > 65535) throw ConfigError("--port must be in 0..65535");
        config.api_port = static_cast<std::uint16_t>(*o.port);
    }
    if (o.experiment) config.experiment_mode = true;
    return config;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void print_notification(const Notification& n) { std::cout << render_line(n) << std::endl; }

/// Display width in code points; titles contain a few multi-byte characters.
std::size_t width(std::string_view text) {
    std::size_t n = 0;
    for (const unsigned char c : text) n += (c & 0xC0) != 0x80;
    return n;
}

std::string pad(std::string_view text, std::size_t to) {
    std::string out(text);
    for (auto w = width(text); w < to; ++w) out += ' ';
    return out;
}

std::string glyph(std::string_view level) {
    if (level == "bronze") return "[B]";
    if (level == "silver") return "[S]";
    if (level == "gold") return "[G]";
    if (level == "platinum") return "[P]";
    return "[ ]";
}

/// Blocks SIGINT/SIGTERM in every thread started afterwards, so the main thread can sigwait.
sigset_t block_termination_signals() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);
    return set;
}

int wait_for_termination(const sigset_t& set) {
    int signal = 0;
    sigwait(&set, &signal);
    return signal;
}

int run_daemon(const daemon::Config& config, bool watch) {
    const auto signals = block_termination_signals();
    std::unique_ptr<daemon::Watcher> watcher;
    auto warn = [](const std::string& message) { std::cerr << "questd: " << message << std::endl; };

    daemon::Daemon d(config);
    if (d.recovered_torn_tail()) warn("dropped a torn final line from the event log");
    d.on_notification(print_notification);
    d.start();
    d.start_ticker();

    std::unique_ptr<daemon::ApiServer> api;
    if (config.api_port != 0) {
        api = std::make_unique<daemon::ApiServer>(d, config.api_port);
        api->start();
        std::cerr << "questd: API listening on http://127.0.0.1:" << api->port() << std::endl;
    }
    if (watch) {
        watcher = std::make_unique<daemon::Watcher>(
            config, [&d](DevEvent event) { d.submit_clamped(std::move(event)); }, warn);
        watcher->start();
        std::cerr << "questd: watching " << fs::absolute(config.project_root).string() << std::endl;
    }

    wait_for_termination(signals);
    if (watcher) watcher->stop();
    if (api) api->stop();
    d.stop();
    std::cerr << "questd: state saved" << std::endl;
    return kOk;
}

int cmd_watch(const Options& o) {
    const auto config = resolve_config(o);
    std::error_code ec;
    if (!fs::is_directory(config.project_root, ec)) {
        throw WatchUnavailable("project root " + config.project_root.string() + " does not exist");
    }
    return run_daemon(config, true);
}

int cmd_serve(const Options& o) { return run_daemon(resolve_config(o), false); }

std::string root_element(std::string_view xml) {
    for (std::size_t i = xml.find('<'); i != std::string_view::npos; i = xml.find('<', i + 1)) {
        if (i + 1 < xml.size() && (xml[i + 1] == '?' || xml[i + 1] == '!')) continue;
        const auto end = xml.find_first_of(" \t\r\n/>", i + 1);
        return std::string(xml.substr(i + 1, end == std::string_view::npos ? std::string_view::npos : end - i - 1));
    }
    return {};
}

std::int64_t mtime_ms(const fs::path& path) {
    const auto t = fs::last_write_time(path);
    const auto sys = std::chrono::file_clock::to_sys(t);
    return std::chrono::duration_cast<std::chrono::milliseconds>(sys.time_since_epoch()).count();
}

/// Events for one input file: NDJSON event lines or one report.
std::vector<DevEvent> events_from_file(const fs::path& path) {
    const auto bytes = read_file(path);
    const auto name = path.filename().string();
    if (path.extension() == ".ndjson" || path.extension() == ".jsonl") {
        std::vector<DevEvent> events;
        std::istringstream in(bytes);
        std::size_t line_no = 0;
        for (std::string line; std::getline(in, line);) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                events.push_back(event_from_json(Json::parse(line)));
            } catch (const Json::exception& e) {
                throw InvalidEvent(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        return events;
    }
    const auto ts = mtime_ms(path);
    if (path.extension() == ".xml") {
        if (root_element(bytes) == "report") {
            return {DevEvent{ts, "ingest", TestRunFinished{path.stem().string(), {}, true, ingestion::parse_jacoco_xml(bytes)}}};
        }
        auto report = ingestion::parse_junit_xml(bytes);
        return {DevEvent{ts, "ingest", TestRunFinished{report.suite_id, std::move(report.cases), false, {}}}};
    }
    if (path.extension() == ".lcov" || path.extension() == ".info" || name == "lcov.info") {
        return {DevEvent{ts, "ingest",
                         TestRunFinished{path.stem().string(), {}, true, ingestion::parse_lcov(bytes, ingestion::LcovMode::Lenient)}}};
    }
    throw InvalidEvent("cannot tell the format of " + path.string() + " (expected .xml, .lcov, .info or .ndjson)");
}

int cmd_ingest(const Options& o, const std::vector<fs::path>& paths) {
    const auto config = resolve_config(o);
    // Parse everything first so a malformed file leaves the state untouched.
    std::vector<DevEvent> events;
    for (const auto& path : paths) {
        auto parsed = events_from_file(path);
        events.insert(events.end(), parsed.begin(), parsed.end());
    }
    daemon::Daemon d(config);
    d.on_notification(print_notification);
    d.start();
    for (auto& event : events) d.submit_clamped(std::move(event));
    d.stop();
    std::cerr << "questd: ingested " << events.size() << " event(s)" << std::endl;
    return kOk;
}

int cmd_status(const Options& o, bool json) {
    const auto config = resolve_config(o);
    const auto view = state_view(daemon::read_state(config));
    if (json) {
        std::cout << view.dump(2) << std::endl;
        return kOk;
    }
    std::size_t title_width = 0;
    for (const auto& row : view["achievements"]) title_width = std::max(title_width, width(row["title"].get<std::string>()));
    for (const auto& row : view["achievements"]) {
        const auto level = row["level"].get<std::string>();
        auto level_name = level;
        level_name[0] = static_cast<char>(std::toupper(level_name[0]));
        std::cout << glyph(level) << ' ' << pad(row["title"].get<std::string>(), title_width) << "  "
                  << pad(level_name, 8) << ' ' << pad(std::to_string(row["progress"].get<std::uint64_t>()), 7) << ' '
                  << row["next_target_text"].get<std::string>() << '\n';
    }
    return kOk;
}

int cmd_reset(const Options& o, bool confirm) {
    if (!confirm) throw NotConfirmed("reset clears all progress; run again with --confirm");
    daemon::Daemon d(resolve_config(o));
    d.start();
    d.reset(true);
    d.stop();
    std::cout << "progress reset" << std::endl;
    return kOk;
}

int cmd_replay(const Options& o, const fs::path& log) {
    const auto state = daemon::import_log(resolve_config(o), log);
    std::cout << "replayed " << state.log_position << " log entries (" << state.events_applied
              << " events); digest " << digest(state) << std::endl;
    return kOk;
}

int cmd_stats(const Options& o, const fs::path& groups_file, const fs::path& logs_dir, const fs::path& out, bool csv,
              const std::string& large, std::size_t exact_cap) {
    Json groups_json;
    try {
        groups_json = Json::parse(read_file(groups_file));
    } catch (const Json::exception& e) {
        throw ConfigError(groups_file.string() + " is not valid JSON: " + e.what());
    }
    stats::GroupReportOptions options;
    options.engine = resolve_config(o).engine();
    options.wilcoxon.exact_cap = exact_cap;
    if (large == "reject") {
        options.wilcoxon.large = stats::LargeSample::Reject;
    } else if (large == "normal") {
        options.wilcoxon.large = stats::LargeSample::Normal;
    } else {
        options.wilcoxon.large = stats::LargeSample::Permutation;
    }
    const auto report = stats::group_report(stats::parse_groups(groups_json, logs_dir), options);
    daemon::write_file_atomic(out, stats::to_json(report).dump(2) + "\n", false);
    if (csv) {
        auto base = out;
        base.replace_extension();
        daemon::write_file_atomic(base.string() + ".series.csv", stats::series_csv(report), false);
        daemon::write_file_atomic(base.string() + ".bands.csv", stats::bands_csv(report), false);
    }
    for (const auto& skipped : report.skipped) {
        std::cerr << "questd: skipped " << skipped.log.string() << " (" << skipped.group << "): " << skipped.error
                  << std::endl;
    }
    std::cerr << "questd: wrote " << out.string() << " (" << report.participants.size() << " participants)"
              << std::endl;
    return kOk;
}

int cmd_achievements(bool json) {
    if (json) {
        std::cout << catalog_json().dump(2) << std::endl;
        return kOk;
    }
    for (const auto& def : catalog()) {
        std::cout << pad(to_string(def.category), 17) << pad(def.title, 38) << def.description << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"questd: gamified testing achievements from test reports, coverage and source edits"};
    app.set_version_flag("--version", "questd 0.1.0");
    app.require_subcommand(1);

    Options o;
    app.add_option("--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--state-dir", o.state_dir, "State directory (default ~/.questd)");

    auto* watch = app.add_subcommand("watch", "Watch a project tree, print notifications and serve the API");
    watch->add_option("--project-root", o.project_root, "Directory to watch");
    watch->add_option("--port", o.port, "API port (0 disables)");
    watch->add_flag("--experiment", o.experiment, "Five minute idle threshold");

    auto* serve = app.add_subcommand("serve", "Serve the API and dashboard without watching files");
    serve->add_option("--port", o.port, "API port");
    serve->add_flag("--experiment", o.experiment, "Five minute idle threshold");

    std::vector<fs::path> ingest_paths;
    auto* ingest = app.add_subcommand("ingest", "Apply JUnit/JaCoCo/LCOV reports or NDJSON event files");
    ingest->add_option("paths", ingest_paths, "Report or event files")->required()->check(CLI::ExistingFile);

    bool json = false;
    auto* status = app.add_subcommand("status", "Show all achievements and their progress");
    status->add_flag("--json", json, "Machine-readable output, identical to GET /state");

    bool confirm = false;
    auto* reset = app.add_subcommand("reset", "Clear all progress");
    reset->add_flag("--confirm", confirm, "Required confirmation");

    fs::path log;
    auto* replay = app.add_subcommand("replay", "Replace the state with a replay of an event log");
    replay->add_option("log", log, "NDJSON event log")->required();

    fs::path groups_file, logs_dir = ".", out;
    bool csv = false;
    std::string large = "permutation";
    std::size_t exact_cap = 25;
    auto* stats_cmd = app.add_subcommand("stats", "Compare groups of recorded sessions");
    stats_cmd->add_option("--groups", groups_file, "JSON map of group name to log paths")->required()->check(CLI::ExistingFile);
    stats_cmd->add_option("--logs", logs_dir, "Directory that relative log paths resolve against");
    stats_cmd->add_option("--out", out, "Report JSON path")->required();
    stats_cmd->add_flag("--csv", csv, "Also write per-minute series and band tables next to the report");
    stats_cmd->add_option("--large-sample", large, "Wilcoxon above the exact cap: permutation, normal or reject")
        ->check(CLI::IsMember({"permutation", "normal", "reject"}));
    stats_cmd->add_option("--exact-cap", exact_cap, "Largest pooled sample enumerated exactly");

    auto* achievements = app.add_subcommand("achievements", "List the achievement catalog");
    achievements->add_flag("--json", json, "Dump the catalog as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*watch) return cmd_watch(o);
        if (*serve) return cmd_serve(o);
        if (*ingest) return cmd_ingest(o, ingest_paths);
        if (*status) return cmd_status(o, json);
        if (*reset) return cmd_reset(o, confirm);
        if (*replay) return cmd_replay(o, log);
        if (*stats_cmd) return cmd_stats(o, groups_file, logs_dir, out, csv, large, exact_cap);
        if (*achievements) return cmd_achievements(json);
    } catch (const WatchUnavailable& e) {
        std::cerr << "questd: " << e.kind() << ": " << e.what() << std::endl;
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "questd: " << e.kind() << ": " << e.what() << std::endl;
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "questd: " << e.kind() << ": " << e.what() << std::endl;
        return kFailed;
    } catch (const std::exception& e) {
        std::cerr << "questd: " << e.what() << std::endl;
        return kFailed;
    }
    return kUsage;
}
