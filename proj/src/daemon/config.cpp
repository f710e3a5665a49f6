#include "questd/daemon/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "questd/errors.hpp"

extern char** environ;

namespace questd::daemon {

namespace {

template <class T>
T get_as(const Json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

std::vector<std::string> string_list(const Json& value, const std::string& key) {
    if (value.is_string()) return {value.get<std::string>()};
    return get_as<std::vector<std::string>>(value, key);
}

std::int64_t parse_int(const std::string& text, const std::string& key) {
    try {
        std::size_t used = 0;
        const auto v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + " must be an integer, got '" + text + "'");
    }
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
    if (text == "0" || text == "false" || text == "no" || text == "off" || text.empty()) return false;
    throw ConfigError(key + " must be a boolean, got '" + text + "'");
}

std::uint16_t port_from(std::int64_t v, const std::string& key) {
    if (v < 0 || v > 65535) throw ConfigError(key + " must be a port number in 0..65535");
    return static_cast<std::uint16_t>(v);
}

std::int64_t non_negative(std::int64_t v, const std::string& key) {
    if (v < 0) throw ConfigError(key + " must not be negative");
    return v;
}

}  // namespace

EngineConfig Config::engine() const {
    return EngineConfig{(experiment_mode ? 5 : idle_minutes) * kMinuteMs};
}

ingestion::ClassifyOptions Config::classify() const { return ingestion::ClassifyOptions{print_pattern, test_roots}; }

Config default_config() {
    Config config;
    const char* home = std::getenv("HOME");
    config.state_dir = std::filesystem::path(home && *home ? home : ".") / ".questd";
    return config;
}

void apply_json(Config& config, const Json& j) {
    if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "state_dir") {
            config.state_dir = get_as<std::string>(value, key);
        } else if (key == "project_root") {
            config.project_root = get_as<std::string>(value, key);
        } else if (key == "idle_minutes") {
            config.idle_minutes = non_negative(get_as<std::int64_t>(value, key), key);
        } else if (key == "experiment_mode") {
            config.experiment_mode = get_as<bool>(value, key);
        } else if (key == "api_port") {
            config.api_port = port_from(get_as<std::int64_t>(value, key), key);
        } else if (key == "dashboard_dir") {
            if (value.is_null()) {
                config.dashboard_dir.reset();
            } else {
                config.dashboard_dir = get_as<std::string>(value, key);
            }
        } else if (key == "reports") {
            if (!value.is_object()) throw ConfigError("config key 'reports' must be an object");
            for (const auto& [sub, v] : value.items()) {
                if (sub == "junit_glob") {
                    config.junit_glob = get_as<std::string>(v, "reports.junit_glob");
                } else if (sub == "coverage_glob") {
                    config.coverage_globs = string_list(v, "reports.coverage_glob");
                } else {
                    throw ConfigError("unknown config key 'reports." + sub + "'");
                }
            }
        } else if (key == "test_roots") {
            config.test_roots = string_list(value, key);
        } else if (key == "print_pattern") {
            config.print_pattern = get_as<std::string>(value, key);
        } else if (key == "debounce_ms") {
            config.debounce_ms = non_negative(get_as<std::int64_t>(value, key), key);
        } else if (key == "coverage_pair_window_ms") {
            config.coverage_pair_window_ms = non_negative(get_as<std::int64_t>(value, key), key);
        } else if (key == "snapshot_every") {
            config.snapshot_every = get_as<std::uint64_t>(value, key);
        } else if (key == "fsync_log") {
            config.fsync_log = get_as<bool>(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
}

void apply_env(Config& config, const std::map<std::string, std::string>& env) {
    for (const auto& [key, value] : env) {
        if (key == "QUESTD_STATE_DIR") {
            config.state_dir = value;
        } else if (key == "QUESTD_PROJECT_ROOT") {
            config.project_root = value;
        } else if (key == "QUESTD_IDLE_MINUTES") {
            config.idle_minutes = non_negative(parse_int(value, key), key);
        } else if (key == "QUESTD_EXPERIMENT_MODE") {
            config.experiment_mode = parse_bool(value, key);
        } else if (key == "QUESTD_API_PORT") {
            config.api_port = port_from(parse_int(value, key), key);
        } else if (key == "QUESTD_DASHBOARD_DIR") {
            config.dashboard_dir = value;
        } else if (key == "QUESTD_JUNIT_GLOB") {
            config.junit_glob = value;
        } else if (key == "QUESTD_COVERAGE_GLOB") {
            std::vector<std::string> globs;
            std::stringstream in(value);
            for (std::string glob; std::getline(in, glob, ',');) {
                if (!glob.empty()) globs.push_back(glob);
            }
            config.coverage_globs = globs;
        } else if (key == "QUESTD_PRINT_PATTERN") {
            config.print_pattern = value;
        } else if (key == "QUESTD_DEBOUNCE_MS") {
            config.debounce_ms = non_negative(parse_int(value, key), key);
        } else if (key == "QUESTD_COVERAGE_PAIR_WINDOW_MS") {
            config.coverage_pair_window_ms = non_negative(parse_int(value, key), key);
        } else if (key == "QUESTD_SNAPSHOT_EVERY") {
            config.snapshot_every = static_cast<std::uint64_t>(non_negative(parse_int(value, key), key));
        } else if (key == "QUESTD_FSYNC_LOG") {
            config.fsync_log = parse_bool(value, key);
        } else if (key == "QUESTD_CRASH_AFTER_APPENDS") {
            config.crash_after_appends = static_cast<std::uint64_t>(non_negative(parse_int(value, key), key));
        }
        // Other QUESTD_* names (e.g. QUESTD_CONFIG) are not config keys.
    }
}

std::map<std::string, std::string> questd_environment() {
    std::map<std::string, std::string> env;
    for (char** p = environ; p && *p; ++p) {
        const std::string_view entry(*p);
        if (!entry.starts_with("QUESTD_")) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
    }
    return env;
}

Config load_config(const std::optional<std::filesystem::path>& path) {
    auto config = default_config();
    if (path) {
        std::ifstream in(*path);
        if (!in) throw ConfigError("cannot read config file " + path->string());
        Json j;
        try {
            j = Json::parse(in);
        } catch (const std::exception& e) {
            throw ConfigError("config file " + path->string() + " is not valid JSON: " + e.what());
        }
        apply_json(config, j);
    }
    apply_env(config, questd_environment());
    return config;
}

Json to_json(const Config& config) {
    return Json{{"state_dir", config.state_dir.string()},
                {"project_root", config.project_root.string()},
                {"idle_minutes", config.idle_minutes},
                {"experiment_mode", config.experiment_mode},
                {"api_port", config.api_port},
                {"dashboard_dir", config.dashboard_dir ? Json(config.dashboard_dir->string()) : Json(nullptr)},
                {"reports", {{"junit_glob", config.junit_glob}, {"coverage_glob", config.coverage_globs}}},
                {"test_roots", config.test_roots},
                {"print_pattern", config.print_pattern},
                {"debounce_ms", config.debounce_ms},
                {"coverage_pair_window_ms", config.coverage_pair_window_ms},
                {"snapshot_every", config.snapshot_every},
                {"fsync_log", config.fsync_log}};
}

}  // namespace questd::daemon
