#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "questd/catalog.hpp"
#include "questd/detectors.hpp"
#include "questd/events.hpp"

namespace questd {

inline constexpr std::int64_t kMinuteMs = 60'000;

struct EngineConfig {
    /// Idle time without progress before an encouragement is shown.
    std::int64_t idle_ms = 30 * kMinuteMs;
};

struct LevelUp {
    std::string achievement;
    Level level = Level::None;
    /// Count that earned the level; for multi-parameter achievements, that level's own counter.
    std::uint64_t progress = 0;
    bool operator==(const LevelUp&) const = default;
};

struct ProgressMade {
    std::string achievement;
    /// 0.25, 0.5 or 0.75 of the interval towards `next_level`.
    double fraction = 0.0;
    Level next_level = Level::None;
    std::uint64_t progress = 0;
    std::uint64_t threshold = 0;
    bool operator==(const ProgressMade&) const = default;
};

struct Encouragement {
    /// Suggested achievement; empty once everything is at Platinum.
    std::string achievement;
    std::string suggestion_text;
    bool operator==(const Encouragement&) const = default;
};

struct Notification {
    std::int64_t ts = 0;
    std::variant<LevelUp, ProgressMade, Encouragement> kind;
    bool operator==(const Notification&) const = default;
};

struct EngineState {
    /// Indexed like catalog().
    std::array<ProgressValue, kAchievementCount> progress{};
    std::array<Level, kAchievementCount> awarded{};
    /// Highest quartile (0..3) announced within the current level interval.
    std::array<std::uint8_t, kAchievementCount> notified_quartiles{};
    /// Distinct class names per level for the Class Reviewer achievements, keyed by id.
    std::map<std::string, std::array<std::set<std::string>, 4>> reviewed_classes;
    DetectorState detector;

    std::int64_t installed_at = 0;
    std::int64_t last_event_ts = 0;
    std::int64_t last_progress_ts = 0;
    std::int64_t last_encouragement_ts = 0;
    bool install_encouraged = false;
    std::uint64_t encouragement_cursor = 0;

    std::uint64_t events_applied = 0;
    /// Number of log entries folded into this state; maintained by the log layer.
    std::uint64_t log_position = 0;

    bool operator==(const EngineState&) const = default;
};

EngineState initial_state(std::int64_t installed_at);

struct ApplyResult {
    EngineState state;
    std::vector<Notification> notifications;
};

/// Applies one event. Throws OutOfOrderEvent when event.ts < state.last_event_ts and
/// InvalidEvent when the event breaks its structural invariants.
ApplyResult apply(EngineState state, const DevEvent& event);

/// In-place variant used by the log layer; same contract as apply().
std::vector<Notification> apply_in_place(EngineState& state, const DevEvent& event);

struct TickResult {
    EngineState state;
    std::optional<Notification> encouragement;
};

/// Emits the post-install encouragement on the first tick, then one encouragement each time
/// `now` is at least idle_ms past both the last progress and the last encouragement.
TickResult tick(EngineState state, std::int64_t now, const EngineConfig& config = {});

std::optional<Notification> tick_in_place(EngineState& state, std::int64_t now, const EngineConfig& config = {});

/// Clears all progress, levels, detector and notification bookkeeping.
/// Keeps installed_at and log_position. Throws NotConfirmed unless confirmed.
EngineState reset(const EngineState& state, bool confirmed);

/// Fraction for the card's progress bar, in [0, 1].
double bar_fraction(const EngineState& state, std::size_t index);

}  // namespace questd
