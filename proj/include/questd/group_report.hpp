#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "questd/engine.hpp"
#include "questd/json_codec.hpp"
#include "questd/stats.hpp"

namespace questd::stats {

/// Metrics extracted from each replayed participant log, in report order.
inline constexpr std::array<std::string_view, 5> kMetrics = {"tests_written", "test_executions", "coverage_executions",
                                                             "debug_uses", "levels_reached"};
inline constexpr std::size_t kMetricCount = kMetrics.size();

using MetricValues = std::array<double, kMetricCount>;

/// Reads the metrics off a state: Safety First, The Tester, Gotta Catch 'Em All and The Debugger
/// progress, plus the sum of awarded levels (Bronze = 1 ... Platinum = 4).
MetricValues metrics_of(const EngineState& state);

struct ParticipantMetrics {
    std::string id;
    std::string group;
    std::filesystem::path log;
    MetricValues totals{};
    /// Cumulative value at the end of each minute since the participant's first log entry.
    std::vector<MetricValues> per_minute;
};

/// Replays one log and extracts its metrics. Throws the replay errors.
ParticipantMetrics participant_metrics(const std::filesystem::path& log, const EngineConfig& config = {});

struct GroupInput {
    std::string name;
    std::vector<std::filesystem::path> logs;
};

struct SkippedLog {
    std::string group;
    std::filesystem::path log;
    std::string error;
};

struct PairwiseComparison {
    std::string a;
    std::string b;
    std::array<WilcoxonResult, kMetricCount> wilcoxon{};
    /// Rows a, b; columns "wrote no tests", "wrote tests".
    ContingencyTable2x2 no_tests_table;
    FisherResult no_tests;
};

struct Band {
    std::vector<double> mean;
    std::vector<double> lo;
    std::vector<double> hi;
};

struct GroupSummary {
    std::string name;
    std::vector<std::string> participants;
    /// "empty" (no replayable logs) or "too_few_for_ci" (fewer than two participants).
    std::vector<std::string> flags;
    /// Interval over the participants' totals, per metric; absent with fewer than two participants.
    std::optional<std::array<Interval, kMetricCount>> final_ci;
    std::array<double, kMetricCount> final_mean{};
    /// Per-minute interval bands, per metric; empty with fewer than two participants.
    std::vector<Band> bands;
};

struct GroupReport {
    std::vector<GroupSummary> groups;
    /// Sorted by participant id.
    std::vector<ParticipantMetrics> participants;
    std::vector<SkippedLog> skipped;
    std::vector<PairwiseComparison> pairwise;
    /// Length of every per-minute series and band.
    std::size_t minutes = 0;
};

struct GroupReportOptions {
    EngineConfig engine;
    WilcoxonOptions wilcoxon{.large = LargeSample::Permutation};
    double ci_level = 0.846;
};

/// Replays every log, compares all pairs of non-empty groups and computes interval bands.
/// Logs that fail to replay are skipped and listed; empty groups are flagged and excluded from tests.
GroupReport group_report(const std::vector<GroupInput>& groups, const GroupReportOptions& options = {});

/// Parses `{"group": ["log", ...], ...}`; relative paths resolve against `logs_dir`. Throws ConfigError.
std::vector<GroupInput> parse_groups(const Json& j, const std::filesystem::path& logs_dir);

/// Report document; p-values rounded to 4 significant digits.
Json to_json(const GroupReport& report);

/// Long-format table: group,participant,minute,<metrics...>.
std::string series_csv(const GroupReport& report);
/// Long-format table: group,metric,minute,mean,lo,hi.
std::string bands_csv(const GroupReport& report);

}  // namespace questd::stats
