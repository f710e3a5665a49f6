#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "questd/errors.hpp"
#include "questd/group_report.hpp"
#include "stats_oracles.hpp"
#include "support.hpp"

using namespace questd;
using namespace questd::stats;
using namespace questd::testing;
using Catch::Approx;

namespace {

constexpr std::int64_t T0 = 1'750'000'000'000;
constexpr std::int64_t kMinute = 60'000;

struct Activity {
    std::int64_t at;  // offset from T0
    enum { Write, Run, CoverageRun, Debug } what;
    int count = 1;
};

void write_participant(const std::filesystem::path& path, const std::vector<Activity>& activity) {
    std::string lines;
    for (const auto& a : activity) {
        for (int i = 0; i < (a.what == Activity::Write ? 1 : a.count); ++i) {
            DevEvent e;
            switch (a.what) {
                case Activity::Write: {
                    std::vector<ChangeFact> facts;
                    for (int k = 0; k < a.count; ++k) facts.push_back(TestMethodAdded{"FooTest", "t" + std::to_string(k)});
                    e = change_event(T0 + a.at, FileClass::Test, facts, "src/test/FooTest.java");
                    break;
                }
                case Activity::Run: e = run_event(T0 + a.at, {}); break;
                case Activity::CoverageRun: e = run_event(T0 + a.at, {}, coverage_of({})); break;
                case Activity::Debug: e = debug_event(T0 + a.at); break;
            }
            lines += to_json(LogEntry{e}).dump() + "\n";
        }
    }
    write_file(path, lines);
}

/// Three groups: A with three participants, B with two, C whose only log is missing.
struct Study {
    TempDir dir;
    std::vector<GroupInput> groups;

    Study() {
        write_participant(dir / "a/p1.ndjson", {{0, Activity::Write, 12},
                                                {30'000, Activity::Run},
                                                {61'000, Activity::Run},
                                                {150'000, Activity::CoverageRun}});
        write_participant(dir / "a/p2.ndjson", {{0, Activity::Run, 5},
                                                {kMinute, Activity::Debug},
                                                {2 * kMinute, Activity::Debug},
                                                {3 * kMinute, Activity::Debug},
                                                {4 * kMinute + 1, Activity::Debug}});
        write_participant(dir / "a/p3.ndjson", {{0, Activity::Write, 3}, {10, Activity::CoverageRun, 3},
                                                {20, Activity::Debug, 10}});
        write_participant(dir / "b/q1.ndjson", {{0, Activity::Run}});
        write_participant(dir / "b/q2.ndjson", {{0, Activity::Debug}});
        groups = {{"A", {dir / "a/p1.ndjson", dir / "a/p2.ndjson", dir / "a/p3.ndjson"}},
                  {"B", {dir / "b/q1.ndjson", dir / "b/q2.ndjson"}},
                  {"C", {dir / "c/missing.ndjson"}}};
    }
};

const ParticipantMetrics& participant(const GroupReport& r, const std::string& id) {
    for (const auto& p : r.participants) {
        if (p.id == id) return p;
    }
    throw std::runtime_error("no participant " + id);
}

}  // namespace

TEST_CASE("participant totals and awarded levels") {
    Study study;
    const auto report = group_report(study.groups);
    REQUIRE(report.participants.size() == 5);
    // tests written, suite runs, coverage runs, debug runs, awarded levels
    CHECK(participant(report, "p1").totals == MetricValues{12, 3, 1, 0, 2});
    CHECK(participant(report, "p2").totals == MetricValues{0, 5, 0, 4, 2});
    CHECK(participant(report, "p3").totals == MetricValues{3, 3, 3, 10, 4});
    CHECK(participant(report, "q1").totals == MetricValues{0, 1, 0, 0, 0});
    CHECK(participant(report, "q2").totals == MetricValues{0, 0, 0, 1, 0});
    CHECK(report.participants.front().id == "p1");
}

TEST_CASE("per-minute series close each minute and pad to the longest participant") {
    Study study;
    const auto report = group_report(study.groups);
    CHECK(report.minutes == 5);
    const auto& p1 = participant(report, "p1");
    REQUIRE(p1.per_minute.size() == 5);
    CHECK(p1.per_minute[0] == MetricValues{12, 1, 0, 0, 1});
    CHECK(p1.per_minute[1] == MetricValues{12, 2, 0, 0, 1});
    CHECK(p1.per_minute[2] == p1.totals);
    CHECK(p1.per_minute[4] == p1.totals);
    const auto& p2 = participant(report, "p2");
    CHECK(p2.per_minute[0][3] == 0);
    CHECK(p2.per_minute[3][3] == 3);
    CHECK(p2.per_minute[4][3] == 4);
}

TEST_CASE("group summaries, flags and intervals") {
    Study study;
    const auto report = group_report(study.groups);
    REQUIRE(report.groups.size() == 3);
    const auto& a = report.groups[0];
    CHECK(a.participants == std::vector<std::string>{"p1", "p2", "p3"});
    CHECK(a.flags.empty());
    CHECK(a.final_mean[0] == Approx(5.0));
    REQUIRE(a.final_ci);
    // Normal interval with z for 84.6 % and the sample standard deviation.
    const double sd = std::sqrt(((12 - 5.0) * (12 - 5.0) + 25 + 4) / 2.0);
    const double half = 1.4255440370804515 * sd / std::sqrt(3.0);
    CHECK((*a.final_ci)[0].lo == Approx(5.0 - half));
    CHECK((*a.final_ci)[0].hi == Approx(5.0 + half));
    REQUIRE(a.bands.size() == kMetricCount);
    CHECK(a.bands[0].mean.size() == 5);

    const auto& c = report.groups[2];
    CHECK(c.flags == std::vector<std::string>{"empty", "too_few_for_ci"});
    CHECK_FALSE(c.final_ci);
    REQUIRE(report.skipped.size() == 1);
    CHECK(report.skipped[0].group == "C");
}

TEST_CASE("pairwise tests match the brute-force oracles") {
    Study study;
    const auto report = group_report(study.groups);
    REQUIRE(report.pairwise.size() == 1);  // C has no participants
    const auto& cmp = report.pairwise[0];
    CHECK(cmp.a == "A");
    CHECK(cmp.b == "B");
    CHECK(cmp.wilcoxon[0].p_value == Approx(brute_wilcoxon({12, 0, 3}, {0, 0})).epsilon(1e-9));
    CHECK(cmp.wilcoxon[3].p_value == Approx(brute_wilcoxon({0, 4, 10}, {0, 1})).epsilon(1e-9));
    CHECK(cmp.no_tests_table == ContingencyTable2x2{1, 2, 2, 0});
    CHECK(cmp.no_tests.p_value == Approx(brute_fisher(1, 2, 2, 0)).epsilon(1e-9));

    const auto j = to_json(report);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("minutes") == 5);
    const double p = j.at("pairwise")[0].at("fisher_no_tests").at("p").get<double>();
    CHECK(p == round_significant(cmp.no_tests.p_value));
    CHECK(j.at("groups")[2].at("ci").is_null());
}

TEST_CASE("CSV exports") {
    Study study;
    const auto report = group_report(study.groups);
    const auto series = series_csv(report);
    CHECK(series.starts_with("group,participant,minute,tests_written,test_executions,coverage_executions,"
                             "debug_uses,levels_reached\n"));
    CHECK(std::count(series.begin(), series.end(), '\n') == 1 + 5 * 5);
    CHECK(series.find("A,p1,1,12,1,0,0,1\n") != std::string::npos);
    const auto bands = bands_csv(report);
    // Groups A and B, five metrics, five minutes.
    CHECK(std::count(bands.begin(), bands.end(), '\n') == 1 + 2 * 5 * 5);
}

TEST_CASE("duplicate participant ids fall back to paths") {
    TempDir dir;
    write_participant(dir / "x/p.ndjson", {{0, Activity::Run}});
    write_participant(dir / "y/p.ndjson", {{0, Activity::Debug}});
    const auto report = group_report({{"G", {dir / "x/p.ndjson", dir / "y/p.ndjson"}}});
    REQUIRE(report.participants.size() == 2);
    CHECK(report.participants[0].id != report.participants[1].id);
    CHECK(report.participants[0].id.ends_with("p.ndjson"));
}

TEST_CASE("corrupt logs are skipped and reported") {
    TempDir dir;
    write_participant(dir / "ok.ndjson", {{0, Activity::Run}});
    write_file(dir / "bad.ndjson", "{\"kind\":\"mystery\",\"ts\":1}\n");
    const auto report = group_report({{"G", {dir / "ok.ndjson", dir / "bad.ndjson"}}});
    CHECK(report.participants.size() == 1);
    REQUIRE(report.skipped.size() == 1);
    CHECK(report.skipped[0].error.find("line 1") != std::string::npos);
    CHECK(report.groups[0].flags == std::vector<std::string>{"too_few_for_ci"});
}

TEST_CASE("group files") {
    const auto groups = parse_groups(Json::parse(R"({"ctrl": ["a.ndjson", "/abs/b.ndjson"], "exp": []})"), "/logs");
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].name == "ctrl");
    CHECK(groups[0].logs == std::vector<std::filesystem::path>{"/logs/a.ndjson", "/abs/b.ndjson"});
    CHECK(groups[1].logs.empty());
    CHECK_THROWS_AS(parse_groups(Json::parse("[]"), "/"), ConfigError);
    CHECK_THROWS_AS(parse_groups(Json::parse(R"({"g": "a"})"), "/"), ConfigError);
    CHECK_THROWS_AS(parse_groups(Json::parse(R"({"g": [1]})"), "/"), ConfigError);
}
