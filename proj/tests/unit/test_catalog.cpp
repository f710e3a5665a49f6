#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <set>

#include "questd/catalog.hpp"
#include "questd/state_io.hpp"
#include "support.hpp"

using namespace questd;

TEST_CASE("catalog lists 27 achievements with unique ids in four categories") {
    const auto defs = catalog();
    REQUIRE(defs.size() == 27);
    std::set<std::string_view> ids;
    std::map<Category, int> per_category;
    for (const auto& def : defs) {
        ids.insert(def.id);
        ++per_category[def.category];
    }
    CHECK(ids.size() == 27);
    CHECK(per_category[Category::Testing] == 7);
    CHECK(per_category[Category::Coverage] == 8);
    CHECK(per_category[Category::Debugging] == 7);
    CHECK(per_category[Category::TestRefactoring] == 5);
}

TEST_CASE("catalog JSON matches the checked-in golden file byte for byte") {
    CHECK(catalog_json().dump(2) + "\n" == testing::read_file(testing::fixture("catalog.json")));
}

TEST_CASE("spot-checked boundaries") {
    const auto& te = std::get<ScalarBoundaries>(lookup("test-executor").boundaries);
    CHECK(te.thresholds == std::array<std::uint64_t, 4>{3, 100, 1000, 10000});
    const auto& crl = std::get<MultiBoundaries>(lookup("class-reviewer-lines").boundaries);
    CHECK(crl.levels[0].x == 5);
    CHECK(crl.levels[0].y == 5u);
    CHECK(crl.levels[0].z == 70u);
    CHECK(std::get<ScalarBoundaries>(lookup("line-by-line").boundaries).thresholds[3] == 100000);
    CHECK(std::get<ScalarBoundaries>(lookup("shine-in-new-splendor").boundaries).thresholds[3] == 2500);
    CHECK_FALSE(std::get<MultiBoundaries>(lookup("the-tester-advanced").boundaries).levels[2].z.has_value());
}

TEST_CASE("thresholds and level parameters strictly increase") {
    for (const auto& def : catalog()) {
        INFO(def.id);
        for (std::size_t i = 1; i < 4; ++i) {
            const auto lo = kAwardableLevels[i - 1];
            const auto hi = kAwardableLevels[i];
            CHECK(def.threshold(lo) < def.threshold(hi));
            if (const auto* multi = std::get_if<MultiBoundaries>(&def.boundaries)) {
                CHECK(multi->levels[i - 1].y < multi->levels[i].y);
                CHECK(multi->levels[i - 1].z.value_or(0) <= multi->levels[i].z.value_or(0));
            }
        }
    }
}

TEST_CASE("lookup and index_of") {
    CHECK(index_of("test-executor") == 0u);
    CHECK(index_of("double-check") == 26u);
    CHECK_FALSE(index_of("nope").has_value());
    CHECK_THROWS_AS(lookup("nope"), std::out_of_range);
}

TEST_CASE("level names round-trip") {
    for (auto level : {Level::None, Level::Bronze, Level::Silver, Level::Gold, Level::Platinum}) {
        CHECK(level_from_string(to_string(level)) == level);
    }
    CHECK_FALSE(level_from_string("diamond").has_value());
}

TEST_CASE("scalar level, next target and interval fraction") {
    const auto& def = lookup("test-executor");
    const ProgressValue zero = std::uint64_t{0};
    CHECK(level_for(def, zero) == Level::None);
    CHECK(next_target(def, zero)->threshold == 3);
    CHECK(interval_fraction(def, zero) == 0.0);
    CHECK(interval_fraction(def, ProgressValue{std::uint64_t{2}}) == Catch::Approx(2.0 / 3.0));
    CHECK(level_for(def, ProgressValue{std::uint64_t{3}}) == Level::Bronze);
    CHECK(interval_fraction(def, ProgressValue{std::uint64_t{3}}) == 0.0);
    CHECK(interval_fraction(def, ProgressValue{std::uint64_t{52}}) == Catch::Approx(49.0 / 97.0));
    CHECK(level_for(def, ProgressValue{std::uint64_t{99}}) == Level::Bronze);
    CHECK(level_for(def, ProgressValue{std::uint64_t{100}}) == Level::Silver);
    CHECK(level_for(def, ProgressValue{std::uint64_t{10000}}) == Level::Platinum);
    CHECK_FALSE(next_target(def, ProgressValue{std::uint64_t{10000}}).has_value());
    CHECK(interval_fraction(def, ProgressValue{std::uint64_t{1'000'000}}) == 1.0);
    CHECK(render_next_target(def, zero) == "Execute 3 tests");
    CHECK(render_next_target(def, ProgressValue{std::uint64_t{10000}}).empty());
}

TEST_CASE("multi-parameter levels use one counter per level") {
    const auto& def = lookup("class-reviewer-lines");
    CHECK(level_for(def, ProgressValue{LevelCounters{4, 0, 0, 0}}) == Level::None);
    CHECK(level_for(def, ProgressValue{LevelCounters{5, 0, 0, 0}}) == Level::Bronze);
    CHECK(level_for(def, ProgressValue{LevelCounters{30, 19, 0, 0}}) == Level::Bronze);
    CHECK(level_for(def, ProgressValue{LevelCounters{30, 20, 0, 0}}) == Level::Silver);
    // Bar and display value follow the next level's counter.
    const ProgressValue p = LevelCounters{30, 10, 2, 0};
    CHECK(display_progress(def, p) == 10);
    CHECK(interval_fraction(def, p) == Catch::Approx(10.0 / 20.0));
    CHECK(render_next_target(def, p) == "Cover 20 classes with at least 25 lines by 80% coverage");
    CHECK(render_next_target(lookup("the-tester-advanced"), ProgressValue{LevelCounters{}}) ==
          "Run test suites 10 times containing at least 100 tests");
}

TEST_CASE("level is monotone in progress and the fraction stays in [0, 1]") {
    std::mt19937_64 rng(7);
    for (const auto& def : catalog()) {
        for (int trial = 0; trial < 200; ++trial) {
            if (def.is_multi()) {
                LevelCounters c{};
                for (auto& v : c) v = rng() % 600;
                auto bigger = c;
                bigger[rng() % 4] += 1 + rng() % 50;
                CHECK(level_for(def, ProgressValue{c}) <= level_for(def, ProgressValue{bigger}));
                const auto f = interval_fraction(def, ProgressValue{c});
                CHECK((f >= 0.0 && f <= 1.0));
            } else {
                const std::uint64_t v = rng() % 200000;
                const std::uint64_t w = v + rng() % 5000;
                CHECK(level_for(def, ProgressValue{v}) <= level_for(def, ProgressValue{w}));
                const auto f = interval_fraction(def, ProgressValue{v});
                CHECK((f >= 0.0 && f <= 1.0));
            }
        }
    }
}
