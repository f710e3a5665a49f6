#include "questd/state_io.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

#include "questd/errors.hpp"

namespace questd {

namespace {

Json progress_json(const ProgressValue& value) {
    if (const auto* count = std::get_if<std::uint64_t>(&value)) return *count;
    const auto& c = std::get<LevelCounters>(value);
    return Json::array({c[0], c[1], c[2], c[3]});
}

std::string title_case(Level level) {
    auto name = std::string(to_string(level));
    if (!name.empty()) name[0] = static_cast<char>(name[0] - 'a' + 'A');
    return name;
}

template <class T>
T get_or_corrupt(const Json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw CorruptState(std::string("state field '") + key + "': " + e.what());
    }
}

Json boundaries_json(const AchievementDef& def) {
    Json j;
    if (const auto* s = std::get_if<ScalarBoundaries>(&def.boundaries)) {
        j["type"] = "scalar";
        for (auto level : kAwardableLevels) j[std::string(to_string(level))] = s->thresholds[level_slot(level)];
    } else {
        j["type"] = "multi";
        const auto& m = std::get<MultiBoundaries>(def.boundaries);
        for (auto level : kAwardableLevels) {
            const auto& tuple = m.levels[level_slot(level)];
            Json t{{"x", tuple.x}};
            if (tuple.y) t["y"] = *tuple.y;
            if (tuple.z) t["z"] = *tuple.z;
            j[std::string(to_string(level))] = t;
        }
    }
    return j;
}

}  // namespace

Json state_to_json(const EngineState& state) {
    const auto defs = catalog();
    Json achievements = Json::object();
    for (std::size_t i = 0; i < defs.size(); ++i) {
        Json a{{"progress", progress_json(state.progress[i])},
               {"level", to_string(state.awarded[i])},
               {"notified_quartiles", state.notified_quartiles[i]}};
        if (const auto it = state.reviewed_classes.find(std::string(defs[i].id)); it != state.reviewed_classes.end()) {
            Json per_level = Json::array();
            for (const auto& classes : it->second) per_level.push_back(Json(classes));
            a["classes"] = std::move(per_level);
        }
        achievements[std::string(defs[i].id)] = std::move(a);
    }

    Json failing = Json::array();
    for (const auto& [key, entry] : state.detector.failing_tests) {
        failing.push_back(Json{{"class", key.class_name},
                               {"method", key.method_name},
                               {"since_ts", entry.since_ts},
                               {"test_edited", entry.test_edited_since},
                               {"production_edited", entry.production_edited_since}});
    }
    Json passing = Json::array();
    for (const auto& key : state.detector.passing_tests) {
        passing.push_back(Json{{"class", key.class_name}, {"method", key.method_name}});
    }

    return Json{{"achievements", std::move(achievements)},
                {"detector",
                 {{"failing_tests", std::move(failing)},
                  {"passing_tests", std::move(passing)},
                  {"last_run_passed", state.detector.last_run_passed},
                  {"refactoring_seen", state.detector.refactoring_seen_since_last_pass}}},
                {"installed_at", state.installed_at},
                {"last_event_ts", state.last_event_ts},
                {"last_progress_ts", state.last_progress_ts},
                {"last_encouragement_ts", state.last_encouragement_ts},
                {"install_encouraged", state.install_encouraged},
                {"encouragement_cursor", state.encouragement_cursor},
                {"events_applied", state.events_applied},
                {"log_position", state.log_position}};
}

EngineState state_from_json(const Json& j) {
    if (!j.is_object()) throw CorruptState("state must be an object");
    EngineState state = initial_state(get_or_corrupt<std::int64_t>(j, "installed_at"));
    state.last_event_ts = get_or_corrupt<std::int64_t>(j, "last_event_ts");
    state.last_progress_ts = get_or_corrupt<std::int64_t>(j, "last_progress_ts");
    state.last_encouragement_ts = get_or_corrupt<std::int64_t>(j, "last_encouragement_ts");
    state.install_encouraged = get_or_corrupt<bool>(j, "install_encouraged");
    state.encouragement_cursor = get_or_corrupt<std::uint64_t>(j, "encouragement_cursor");
    state.events_applied = get_or_corrupt<std::uint64_t>(j, "events_applied");
    state.log_position = get_or_corrupt<std::uint64_t>(j, "log_position");

    const auto defs = catalog();
    const auto achievements = get_or_corrupt<Json>(j, "achievements");
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const auto a = get_or_corrupt<Json>(achievements, std::string(defs[i].id).c_str());
        const auto progress = get_or_corrupt<Json>(a, "progress");
        try {
            if (defs[i].is_multi()) {
                state.progress[i] = progress.get<LevelCounters>();
            } else {
                state.progress[i] = progress.get<std::uint64_t>();
            }
        } catch (const std::exception& e) {
            throw CorruptState("progress of " + std::string(defs[i].id) + ": " + e.what());
        }
        const auto level = level_from_string(get_or_corrupt<std::string>(a, "level"));
        if (!level || *level != level_for(defs[i], state.progress[i])) {
            throw CorruptState("stored level of " + std::string(defs[i].id) + " disagrees with its progress");
        }
        state.awarded[i] = *level;
        state.notified_quartiles[i] = get_or_corrupt<std::uint8_t>(a, "notified_quartiles");
        if (a.contains("classes")) {
            auto& sets = state.reviewed_classes[std::string(defs[i].id)];
            const auto per_level = get_or_corrupt<std::vector<std::set<std::string>>>(a, "classes");
            if (per_level.size() != sets.size()) throw CorruptState("classes must hold one list per level");
            std::copy(per_level.begin(), per_level.end(), sets.begin());
        }
    }

    const auto detector = get_or_corrupt<Json>(j, "detector");
    for (const auto& f : get_or_corrupt<Json>(detector, "failing_tests")) {
        state.detector.failing_tests[TestKey{get_or_corrupt<std::string>(f, "class"),
                                             get_or_corrupt<std::string>(f, "method")}] =
            FailingTest{get_or_corrupt<std::int64_t>(f, "since_ts"), get_or_corrupt<bool>(f, "test_edited"),
                        get_or_corrupt<bool>(f, "production_edited")};
    }
    for (const auto& p : get_or_corrupt<Json>(detector, "passing_tests")) {
        state.detector.passing_tests.insert(
            TestKey{get_or_corrupt<std::string>(p, "class"), get_or_corrupt<std::string>(p, "method")});
    }
    state.detector.last_run_passed = get_or_corrupt<bool>(detector, "last_run_passed");
    state.detector.refactoring_seen_since_last_pass = get_or_corrupt<bool>(detector, "refactoring_seen");
    return state;
}

std::string digest(const EngineState& state) {
    const auto canonical = state_to_json(state).dump();
    unsigned char hash[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    EVP_Digest(canonical.data(), canonical.size(), hash, &length, EVP_sha256(), nullptr);
    std::string hex;
    hex.reserve(length * 2);
    char buf[3];
    for (unsigned int i = 0; i < length; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", hash[i]);
        hex += buf;
    }
    return hex;
}

std::string save(const EngineState& state) {
    const Json doc{{"schema_version", kStateSchemaVersion}, {"digest", digest(state)}, {"state", state_to_json(state)}};
    return doc.dump(2) + "\n";
}

EngineState load(std::string_view bytes) {
    Json doc;
    try {
        doc = Json::parse(bytes);
    } catch (const std::exception& e) {
        throw CorruptState(std::string("state file is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CorruptState("state file must hold an object");
    const auto version = get_or_corrupt<int>(doc, "schema_version");
    if (version != kStateSchemaVersion) throw CorruptState("unknown state schema version " + std::to_string(version));
    auto state = state_from_json(get_or_corrupt<Json>(doc, "state"));
    if (digest(state) != get_or_corrupt<std::string>(doc, "digest")) throw CorruptState("state digest mismatch");
    return state;
}

Json state_view(const EngineState& state) {
    const auto defs = catalog();
    Json rows = Json::array();
    for (std::size_t i = 0; i < defs.size(); ++i) {
        const auto& def = defs[i];
        const auto next = next_target(def, state.progress[i]);
        rows.push_back(Json{{"id", def.id},
                            {"title", def.title},
                            {"category", to_string(def.category)},
                            {"level", to_string(state.awarded[i])},
                            {"progress", display_progress(def, state.progress[i])},
                            {"raw_progress", progress_json(state.progress[i])},
                            {"fraction", bar_fraction(state, i)},
                            {"next_level", next ? Json(to_string(next->level)) : Json(nullptr)},
                            {"next_threshold", next ? Json(next->threshold) : Json(nullptr)},
                            {"next_target_text", render_next_target(def, state.progress[i])}});
    }
    return Json{{"schema_version", kStateSchemaVersion},
                {"digest", digest(state)},
                {"log_position", state.log_position},
                {"events_applied", state.events_applied},
                {"installed_at", state.installed_at},
                {"achievements", std::move(rows)}};
}

Json catalog_json() {
    Json list = Json::array();
    for (const auto& def : catalog()) {
        list.push_back(Json{{"id", def.id},
                            {"category", to_string(def.category)},
                            {"title", def.title},
                            {"description", def.description},
                            {"unit", def.unit},
                            {"next_target_text", def.next_target_text},
                            {"boundaries", boundaries_json(def)}});
    }
    return Json{{"schema_version", 1}, {"achievements", std::move(list)}};
}

Json to_json(const Notification& n) {
    struct Visitor {
        Json operator()(const LevelUp& l) const {
            return Json{{"type", "level_up"}, {"achievement", l.achievement}, {"level", to_string(l.level)},
                        {"progress", l.progress}};
        }
        Json operator()(const ProgressMade& p) const {
            return Json{{"type", "progress"},           {"achievement", p.achievement},
                        {"fraction", p.fraction},       {"next_level", to_string(p.next_level)},
                        {"progress", p.progress},       {"threshold", p.threshold}};
        }
        Json operator()(const Encouragement& e) const {
            return Json{{"type", "encouragement"}, {"achievement", e.achievement}, {"text", e.suggestion_text}};
        }
    };
    auto j = std::visit(Visitor{}, n.kind);
    j["ts"] = n.ts;
    j["message"] = render_line(n);
    return j;
}

std::string render_line(const Notification& n) {
    struct Visitor {
        std::string operator()(const LevelUp& l) const {
            const auto& def = lookup(l.achievement);
            return "[LEVEL-UP] " + std::string(def.title) + " → " + title_case(l.level) + " (" +
                   std::to_string(l.progress) + " " + std::string(def.unit) + ")";
        }
        std::string operator()(const ProgressMade& p) const {
            const auto& def = lookup(p.achievement);
            return "[PROGRESS] " + std::string(def.title) + " " + std::to_string(std::lround(p.fraction * 100)) +
                   "% of the way to " + title_case(p.next_level) + " (" + std::to_string(p.progress) + "/" +
                   std::to_string(p.threshold) + " " + std::string(def.unit) + ")";
        }
        std::string operator()(const Encouragement& e) const { return "[ENCOURAGE] " + e.suggestion_text; }
    };
    return std::visit(Visitor{}, n.kind);
}

}  // namespace questd
