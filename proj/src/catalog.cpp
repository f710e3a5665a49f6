#include "questd/catalog.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace questd {

namespace {

constexpr ScalarBoundaries scalar(std::uint64_t b, std::uint64_t s, std::uint64_t g, std::uint64_t p) {
    return ScalarBoundaries{{b, s, g, p}};
}

LevelTuple xy(std::uint64_t x, std::uint64_t y) { return LevelTuple{x, y, std::nullopt}; }
LevelTuple xyz(std::uint64_t x, std::uint64_t y, std::uint64_t z) { return LevelTuple{x, y, z}; }

const std::array<AchievementDef, kAchievementCount>& definitions() {
    using C = Category;
    static const std::array<AchievementDef, kAchievementCount> defs = {{
        // Testing
        {"test-executor", C::Testing, "Test Executor", "Execute tests", scalar(3, 100, 1000, 10000),
         "Execute {target} tests", "tests"},
        {"the-tester", C::Testing, "The Tester", "Run test suites", scalar(3, 100, 1000, 10000),
         "Run test suites {target} times", "runs"},
        {"the-tester-advanced", C::Testing, "The Tester — Advanced",
         "Run test suites X times containing at least Y tests",
         MultiBoundaries{{xy(10, 100), xy(50, 500), xy(100, 1000), xy(250, 3000)}},
         "Run test suites {X} times containing at least {Y} tests", "runs"},
        {"assert-and-tested", C::Testing, "Assert and Tested", "Trigger AssertionErrors",
         scalar(3, 10, 100, 1000), "Trigger {target} AssertionErrors", "assertion errors"},
        {"bug-finder", C::Testing, "Bug Finder",
         "Previously failed test passes again after source code change", scalar(3, 10, 100, 1000),
         "Make previously failed tests pass again by changing source code {target} times", "fixes"},
        {"test-fixer", C::Testing, "Test Fixer",
         "Previously failed test passes again after test code change", scalar(3, 10, 100, 1000),
         "Make previously failed tests pass again by changing test code {target} times", "fixes"},
        {"safety-first", C::Testing, "Safety First", "Write tests", scalar(10, 100, 1000, 10000),
         "Write {target} tests", "tests"},
        // Coverage
        {"gotta-catch-em-all", C::Coverage, "Gotta Catch ’Em All", "Run test suites with coverage",
         scalar(3, 10, 100, 1000), "Run test suites with coverage {target} times", "runs"},
        {"line-by-line", C::Coverage, "Line-by-line", "Cover lines with your tests",
         scalar(100, 1000, 10000, 100000), "Cover {target} lines with your tests", "lines"},
        {"check-your-methods", C::Coverage, "Check your methods", "Cover methods with your tests",
         scalar(10, 100, 1000, 10000), "Cover {target} methods with your tests", "methods"},
        {"check-your-classes", C::Coverage, "Check your classes", "Cover classes with your tests",
         scalar(10, 100, 1000, 10000), "Cover {target} classes with your tests", "classes"},
        {"check-your-branches", C::Coverage, "Check your branches", "Cover branches with your tests",
         scalar(10, 100, 1000, 10000), "Cover {target} branches with your tests", "branches"},
        {"class-reviewer-lines", C::Coverage, "Class Reviewer - Lines",
         "Cover X classes with at least Y lines by Z% coverage",
         MultiBoundaries{{xyz(5, 5, 70), xyz(20, 25, 80), xyz(75, 250, 85), xyz(250, 500, 90)}},
         "Cover {X} classes with at least {Y} lines by {Z}% coverage", "classes"},
        {"class-reviewer-methods", C::Coverage, "Class Reviewer - Methods",
         "Cover X classes with at least Y methods by Z% coverage",
         MultiBoundaries{{xyz(10, 3, 60), xyz(50, 8, 80), xyz(250, 15, 85), xyz(500, 25, 90)}},
         "Cover {X} classes with at least {Y} methods by {Z}% coverage", "classes"},
        {"class-reviewer-branches", C::Coverage, "Class Reviewer - Branches",
         "Cover X classes with at least Y branches by Z% coverage",
         MultiBoundaries{{xyz(5, 15, 75), xyz(20, 50, 80), xyz(75, 250, 85), xyz(250, 500, 90)}},
         "Cover {X} classes with at least {Y} branches by {Z}% coverage", "classes"},
        // Debugging
        {"the-debugger", C::Debugging, "The Debugger", "Run the code in debug mode",
         scalar(3, 10, 100, 1000), "Run the code in debug mode {target} times", "debug runs"},
        {"take-some-breaks", C::Debugging, "Take some breaks", "Set breakpoints",
         scalar(10, 100, 1000, 10000), "Set {target} breakpoints", "breakpoints"},
        {"make-your-choice", C::Debugging, "Make Your Choice", "Set conditional breakpoints",
         scalar(3, 10, 100, 1000), "Set {target} conditional breakpoints", "breakpoints"},
        {"on-the-watch", C::Debugging, "On the Watch", "Set field watchpoints", scalar(3, 10, 100, 1000),
         "Set {target} field watchpoints", "watchpoints"},
        {"break-the-line", C::Debugging, "Break the Line", "Set line breakpoints", scalar(3, 10, 100, 1000),
         "Set {target} line breakpoints", "breakpoints"},
        {"break-the-method", C::Debugging, "Break the Method", "Set method breakpoints",
         scalar(3, 10, 100, 1000), "Set {target} method breakpoints", "breakpoints"},
        {"console-is-the-new-debug-mode", C::Debugging, "Console is the new Debug Mode",
         "Use System.out.println instead of debugger or logger", scalar(3, 10, 100, 1000),
         "Use System.out.println {target} times", "print statements"},
        // Test refactoring
        {"shine-in-new-splendor", C::TestRefactoring, "Shine in new splendor",
         "Change source code between two ensuing passing test runs", scalar(5, 50, 500, 2500),
         "Refactor between two ensuing passing test runs {target} times", "refactorings"},
        {"the-eponym", C::TestRefactoring, "The Eponym", "Rename test method names",
         scalar(10, 100, 1000, 10000), "Rename test methods {target} times", "renames"},
        {"method-extractor", C::TestRefactoring, "The Method Extractor",
         "Extract code from tests into a separate method", scalar(10, 100, 1000, 10000),
         "Extract code from tests into a separate method {target} times", "extractions"},
        {"method-inliner", C::TestRefactoring, "The Method Inliner", "Inline methods into tests",
         scalar(10, 100, 1000, 10000), "Inline methods into tests {target} times", "inlinings"},
        {"double-check", C::TestRefactoring, "Double check", "Add new assertions to already passing tests",
         scalar(3, 10, 100, 1000), "Add new assertions to already passing tests {target} times",
         "assertions"},
    }};
    return defs;
}

void replace_all(std::string& text, std::string_view key, const std::string& value) {
    for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
        text.replace(pos, key.size(), value);
    }
}

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
        case Level::None: return "none";
        case Level::Bronze: return "bronze";
        case Level::Silver: return "silver";
        case Level::Gold: return "gold";
        case Level::Platinum: return "platinum";
    }
    return "none";
}

std::optional<Level> level_from_string(std::string_view name) {
    for (auto level : {Level::None, Level::Bronze, Level::Silver, Level::Gold, Level::Platinum}) {
        if (to_string(level) == name) return level;
    }
    return std::nullopt;
}

std::string_view to_string(Category category) {
    switch (category) {
        case Category::Testing: return "testing";
        case Category::Coverage: return "coverage";
        case Category::Debugging: return "debugging";
        case Category::TestRefactoring: return "test-refactoring";
    }
    return "testing";
}

std::uint64_t AchievementDef::threshold(Level level) const {
    const auto slot = level_slot(level);
    if (const auto* s = std::get_if<ScalarBoundaries>(&boundaries)) return s->thresholds.at(slot);
    return std::get<MultiBoundaries>(boundaries).levels.at(slot).x;
}

std::span<const AchievementDef> catalog() { return definitions(); }

std::optional<std::size_t> index_of(std::string_view id) {
    const auto& defs = definitions();
    const auto it = std::find_if(defs.begin(), defs.end(), [&](const auto& d) { return d.id == id; });
    if (it == defs.end()) return std::nullopt;
    return static_cast<std::size_t>(it - defs.begin());
}

const AchievementDef& lookup(std::string_view id) {
    const auto index = index_of(id);
    if (!index) throw std::out_of_range("unknown achievement id: " + std::string(id));
    return definitions()[*index];
}

ProgressValue zero_progress(const AchievementDef& def) {
    if (def.is_multi()) return LevelCounters{};
    return std::uint64_t{0};
}

Level level_for(const AchievementDef& def, const ProgressValue& progress) {
    Level reached = Level::None;
    for (auto level : kAwardableLevels) {
        const auto threshold = def.threshold(level);
        const bool met = std::visit(
            [&](const auto& value) {
                using T = std::decay_t<decltype(value)>;
                if constexpr (std::is_same_v<T, std::uint64_t>) {
                    return value >= threshold;
                } else {
                    return value[level_slot(level)] >= threshold;
                }
            },
            progress);
        if (met) reached = level;
    }
    return reached;
}

std::optional<NextTarget> next_target(const AchievementDef& def, const ProgressValue& progress) {
    const auto current = level_for(def, progress);
    if (current == Level::Platinum) return std::nullopt;
    const auto next = static_cast<Level>(static_cast<int>(current) + 1);
    return NextTarget{next, def.threshold(next)};
}

std::uint64_t display_progress(const AchievementDef& def, const ProgressValue& progress) {
    if (const auto* count = std::get_if<std::uint64_t>(&progress)) return *count;
    const auto& counters = std::get<LevelCounters>(progress);
    const auto next = next_target(def, progress);
    return counters[level_slot(next ? next->level : Level::Platinum)];
}

double interval_fraction(const AchievementDef& def, const ProgressValue& progress) {
    const auto current = level_for(def, progress);
    const auto next = next_target(def, progress);
    if (!next) return 1.0;
    const auto value = display_progress(def, progress);
    std::uint64_t floor = 0;
    if (!def.is_multi() && current != Level::None) floor = def.threshold(current);
    const auto span = next->threshold - floor;
    if (span == 0 || value <= floor) return 0.0;
    return std::min(1.0, static_cast<double>(value - floor) / static_cast<double>(span));
}

std::string render_next_target(const AchievementDef& def, const ProgressValue& progress) {
    const auto next = next_target(def, progress);
    if (!next) return {};
    std::string text(def.next_target_text);
    if (const auto* multi = std::get_if<MultiBoundaries>(&def.boundaries)) {
        const auto& tuple = multi->levels[level_slot(next->level)];
        replace_all(text, "{X}", std::to_string(tuple.x));
        if (tuple.y) replace_all(text, "{Y}", std::to_string(*tuple.y));
        if (tuple.z) replace_all(text, "{Z}", std::to_string(*tuple.z));
    } else {
        replace_all(text, "{target}", std::to_string(next->threshold));
    }
    return text;
}

}  // namespace questd
