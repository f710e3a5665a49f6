#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

namespace questd {

enum class Level : std::uint8_t { None = 0, Bronze, Silver, Gold, Platinum };

inline constexpr std::array<Level, 4> kAwardableLevels = {Level::Bronze, Level::Silver, Level::Gold,
                                                          Level::Platinum};

std::string_view to_string(Level level);
std::optional<Level> level_from_string(std::string_view name);

/// Zero-based slot of an awardable level (Bronze = 0 ... Platinum = 3).
constexpr std::size_t level_slot(Level level) { return static_cast<std::size_t>(level) - 1; }

enum class Category : std::uint8_t { Testing, Coverage, Debugging, TestRefactoring };

std::string_view to_string(Category category);

/// Four increasing thresholds, one per awardable level.
struct ScalarBoundaries {
    std::array<std::uint64_t, 4> thresholds{};
};

/// One level's parameters for a "do X things that each satisfy Y (and Z)" achievement.
struct LevelTuple {
    std::uint64_t x = 0;
    std::optional<std::uint64_t> y;
    std::optional<std::uint64_t> z;
};

struct MultiBoundaries {
    std::array<LevelTuple, 4> levels{};
};

using LevelBoundaries = std::variant<ScalarBoundaries, MultiBoundaries>;

/// Per-level counters kept for multi-parameter achievements.
using LevelCounters = std::array<std::uint64_t, 4>;

/// Scalar count, or one counter per level for multi-parameter achievements.
using ProgressValue = std::variant<std::uint64_t, LevelCounters>;

struct AchievementDef {
    std::string_view id;
    Category category;
    std::string_view title;
    std::string_view description;
    LevelBoundaries boundaries;
    /// Placeholders: {target} for scalar achievements, {X} {Y} {Z} for multi-parameter ones.
    std::string_view next_target_text;
    /// Noun used when printing counts, e.g. "runs".
    std::string_view unit;

    bool is_multi() const { return std::holds_alternative<MultiBoundaries>(boundaries); }
    /// X for multi-parameter achievements.
    std::uint64_t threshold(Level level) const;
};

inline constexpr std::size_t kAchievementCount = 27;

/// All achievements in table order. The returned span refers to static storage.
std::span<const AchievementDef> catalog();

/// Index into catalog(), or nullopt for an unknown id.
std::optional<std::size_t> index_of(std::string_view id);

/// Throws std::out_of_range for an unknown id.
const AchievementDef& lookup(std::string_view id);

ProgressValue zero_progress(const AchievementDef& def);

Level level_for(const AchievementDef& def, const ProgressValue& progress);

struct NextTarget {
    Level level;
    std::uint64_t threshold;
};

/// Absent once Platinum is reached.
std::optional<NextTarget> next_target(const AchievementDef& def, const ProgressValue& progress);

/// Value shown on the progress bar: the count itself, or the counter of the next unreached level.
std::uint64_t display_progress(const AchievementDef& def, const ProgressValue& progress);

/// Fraction of the way from the current level's boundary to the next one, in [0, 1].
/// Multi-parameter achievements measure counter_next / X_next. Saturates at 1 on Platinum.
double interval_fraction(const AchievementDef& def, const ProgressValue& progress);

/// Fills the next_target_text template for the next unreached level; empty at Platinum.
std::string render_next_target(const AchievementDef& def, const ProgressValue& progress);

}  // namespace questd
