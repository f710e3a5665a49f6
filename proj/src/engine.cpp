#include "questd/engine.hpp"

#include <algorithm>
#include <numeric>

#include "questd/errors.hpp"

namespace questd {

namespace {

bool add(ProgressValue& value, std::uint64_t amount, Level level) {
    if (amount == 0) return false;
    if (auto* count = std::get_if<std::uint64_t>(&value)) {
        *count += amount;
    } else {
        if (level == Level::None) return false;
        std::get<LevelCounters>(value)[level_slot(level)] += amount;
    }
    return true;
}

/// Quartile (0..3) of the current interval; only meaningful between Bronze and Platinum.
std::uint8_t quartile(const AchievementDef& def, const ProgressValue& progress) {
    const auto current = level_for(def, progress);
    const auto next = next_target(def, progress);
    if (!next) return 0;
    const auto value = display_progress(def, progress);
    const std::uint64_t floor = (!def.is_multi() && current != Level::None) ? def.threshold(current) : 0;
    const auto span = next->threshold - floor;
    if (span == 0 || value <= floor) return 0;
    return static_cast<std::uint8_t>(std::min<std::uint64_t>(3, 4 * (value - floor) / span));
}

/// The count that earned `level`: the scalar itself, or that level's own counter.
std::uint64_t reached_progress(const ProgressValue& progress, Level level) {
    if (const auto* count = std::get_if<std::uint64_t>(&progress)) return *count;
    return std::get<LevelCounters>(progress)[level_slot(level)];
}

}  // namespace

EngineState initial_state(std::int64_t installed_at) {
    EngineState state;
    const auto defs = catalog();
    for (std::size_t i = 0; i < defs.size(); ++i) state.progress[i] = zero_progress(defs[i]);
    state.awarded.fill(Level::None);
    state.notified_quartiles.fill(0);
    state.installed_at = installed_at;
    state.last_progress_ts = installed_at;
    return state;
}

std::vector<Notification> apply_in_place(EngineState& state, const DevEvent& event) {
    if (event.ts < state.last_event_ts) {
        throw OutOfOrderEvent("event at " + std::to_string(event.ts) + " precedes last applied event at " +
                              std::to_string(state.last_event_ts));
    }
    validate(event);

    auto increments = simple_increments(event);
    auto step = step_detectors(std::move(state.detector), event);
    state.detector = std::move(step.state);
    increments.insert(increments.end(), step.increments.begin(), step.increments.end());

    const auto defs = catalog();
    std::array<bool, kAchievementCount> touched{};
    for (const auto& inc : increments) {
        const auto index = *index_of(inc.id);
        if (add(state.progress[index], inc.amount, inc.level)) touched[index] = true;
    }
    if (const auto* run = std::get_if<TestRunFinished>(&event.payload); run && run->with_coverage && run->coverage) {
        for (auto& q : class_qualifications(*run->coverage)) {
            const auto index = *index_of(q.id);
            auto& classes = state.reviewed_classes[std::string(q.id)][level_slot(q.level)];
            if (!classes.insert(std::move(q.class_name)).second) continue;
            std::get<LevelCounters>(state.progress[index])[level_slot(q.level)] = classes.size();
            touched[index] = true;
        }
    }

    std::vector<Notification> notifications;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (!touched[i]) continue;
        const auto& def = defs[i];
        const auto before = state.awarded[i];
        const auto after = level_for(def, state.progress[i]);
        const auto shown = display_progress(def, state.progress[i]);
        for (auto level = static_cast<int>(before) + 1; level <= static_cast<int>(after); ++level) {
            const auto reached = static_cast<Level>(level);
            notifications.push_back(
                Notification{event.ts, LevelUp{std::string(def.id), reached, reached_progress(state.progress[i], reached)}});
        }
        if (after != before) {
            state.awarded[i] = after;
            state.notified_quartiles[i] = 0;
        }
        // Quartile notifications run between awarded levels; Platinum freezes the bar.
        if (after == Level::None || after == Level::Platinum) continue;
        const auto q = quartile(def, state.progress[i]);
        if (q > state.notified_quartiles[i]) {
            const auto next = next_target(def, state.progress[i]);
            notifications.push_back(Notification{
                event.ts, ProgressMade{std::string(def.id), q / 4.0, next->level, shown, next->threshold}});
            state.notified_quartiles[i] = q;
        }
    }

    if (std::any_of(touched.begin(), touched.end(), [](bool t) { return t; })) state.last_progress_ts = event.ts;
    state.last_event_ts = event.ts;
    ++state.events_applied;
    return notifications;
}

ApplyResult apply(EngineState state, const DevEvent& event) {
    auto notifications = apply_in_place(state, event);
    return ApplyResult{std::move(state), std::move(notifications)};
}

std::optional<Notification> tick_in_place(EngineState& state, std::int64_t now, const EngineConfig& config) {
    if (state.install_encouraged) {
        const auto quiet_since = std::max(state.last_progress_ts, state.last_encouragement_ts);
        if (now - quiet_since < config.idle_ms) return std::nullopt;
    }

    const auto defs = catalog();
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < defs.size(); ++i) {
        if (state.awarded[i] == Level::None) candidates.push_back(i);
    }
    if (candidates.empty()) {
        for (std::size_t i = 0; i < defs.size(); ++i) {
            if (state.awarded[i] != Level::Platinum) candidates.push_back(i);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
        return display_progress(defs[a], state.progress[a]) < display_progress(defs[b], state.progress[b]);
    });

    Encouragement encouragement;
    if (candidates.empty()) {
        encouragement.suggestion_text = "Every achievement is at Platinum. Keep testing!";
    } else {
        const auto pick = candidates[state.encouragement_cursor % candidates.size()];
        encouragement.achievement = std::string(defs[pick].id);
        encouragement.suggestion_text =
            "Try \"" + std::string(defs[pick].title) + "\": " + render_next_target(defs[pick], state.progress[pick]);
    }
    ++state.encouragement_cursor;
    state.install_encouraged = true;
    state.last_encouragement_ts = now;
    return Notification{now, std::move(encouragement)};
}

TickResult tick(EngineState state, std::int64_t now, const EngineConfig& config) {
    auto encouragement = tick_in_place(state, now, config);
    return TickResult{std::move(state), std::move(encouragement)};
}

EngineState reset(const EngineState& state, bool confirmed) {
    if (!confirmed) throw NotConfirmed("reset requires explicit confirmation (--confirm)");
    auto fresh = initial_state(state.installed_at);
    fresh.log_position = state.log_position;
    return fresh;
}

double bar_fraction(const EngineState& state, std::size_t index) {
    return interval_fraction(catalog()[index], state.progress[index]);
}

}  // namespace questd
