#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "questd/engine.hpp"
#include "questd/ingestion/classify.hpp"
#include "questd/json_codec.hpp"

namespace questd::daemon {

struct Config {
    std::filesystem::path state_dir;
    std::filesystem::path project_root = ".";
    std::int64_t idle_minutes = 30;
    /// Forces a five minute idle threshold.
    bool experiment_mode = false;
    /// 0 disables the HTTP API.
    std::uint16_t api_port = 7878;
    /// Built dashboard assets served under "/" when set.
    std::optional<std::filesystem::path> dashboard_dir;

    std::string junit_glob = "**/TEST-*.xml";
    std::vector<std::string> coverage_globs = {"**/jacoco*.xml", "**/*.lcov", "**/lcov.info"};
    std::vector<std::string> test_roots = {"**/src/test/**"};
    std::string print_pattern = R"(System\.out\.println)";
    std::int64_t debounce_ms = 200;
    std::int64_t coverage_pair_window_ms = 5000;
    /// A snapshot line is appended to the log after this many events; 0 disables snapshots.
    std::uint64_t snapshot_every = 60;
    /// fsync each log line before acknowledging it.
    bool fsync_log = true;
    /// Test hook: the process SIGKILLs itself right after this many log appends.
    std::optional<std::uint64_t> crash_after_appends;

    EngineConfig engine() const;
    ingestion::ClassifyOptions classify() const;
    std::filesystem::path state_file() const { return state_dir / "state.json"; }
    std::filesystem::path log_file() const { return state_dir / "events.ndjson"; }
    std::filesystem::path lock_file() const { return state_dir / "questd.lock"; }
};

/// Defaults, with state_dir at $HOME/.questd.
Config default_config();

/// Overlays the keys present in a config document. Throws ConfigError on unknown keys or bad types.
void apply_json(Config& config, const Json& j);

/// Overlays QUESTD_* variables taken from `env` (e.g. QUESTD_API_PORT). Throws ConfigError.
void apply_env(Config& config, const std::map<std::string, std::string>& env);

/// The QUESTD_* subset of the process environment.
std::map<std::string, std::string> questd_environment();

/// Defaults, then the file at `path` (if given), then the environment. Throws ConfigError.
Config load_config(const std::optional<std::filesystem::path>& path);

Json to_json(const Config& config);

}  // namespace questd::daemon
