#include "questd/group_report.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "questd/errors.hpp"
#include "questd/event_log.hpp"

namespace questd::stats {

namespace {

double scalar_progress(const EngineState& state, std::string_view id) {
    return static_cast<double>(std::get<std::uint64_t>(state.progress[*index_of(id)]));
}

std::string format_number(double v) {
    std::ostringstream out;
    out.precision(10);
    out << v;
    return out.str();
}

Json wilcoxon_json(const WilcoxonResult& w) {
    return Json{{"p", round_significant(w.p_value)}, {"rank_sum", w.rank_sum}, {"mode", to_string(w.mode)}};
}

}  // namespace

MetricValues metrics_of(const EngineState& state) {
    double levels = 0;
    for (const auto level : state.awarded) levels += static_cast<double>(level);
    return {scalar_progress(state, "safety-first"), scalar_progress(state, "the-tester"),
            scalar_progress(state, "gotta-catch-em-all"), scalar_progress(state, "the-debugger"), levels};
}

ParticipantMetrics participant_metrics(const std::filesystem::path& log, const EngineConfig& config) {
    if (!std::filesystem::is_regular_file(log)) throw InvalidEvent("log file not found: " + log.string());
    const auto read = read_log_file(log);
    ParticipantMetrics result;
    result.log = log;
    result.id = log.stem().string();
    if (read.entries.empty()) return result;

    const auto start = entry_ts(read.entries.front());
    auto state = initial_state(start);
    for (const auto& entry : read.entries) {
        const auto minute = static_cast<std::size_t>(std::max<std::int64_t>(0, entry_ts(entry) - start) / kMinuteMs);
        // Close every minute that ended before this entry.
        while (result.per_minute.size() < minute) result.per_minute.push_back(metrics_of(state));
        fold_entry(state, entry, config);
    }
    result.totals = metrics_of(state);
    result.per_minute.push_back(result.totals);
    return result;
}

GroupReport group_report(const std::vector<GroupInput>& groups, const GroupReportOptions& options) {
    GroupReport report;
    std::map<std::string, std::vector<const ParticipantMetrics*>> members;

    std::vector<ParticipantMetrics> loaded;
    for (const auto& group : groups) {
        for (const auto& log : group.logs) {
            try {
                auto metrics = participant_metrics(log, options.engine);
                metrics.group = group.name;
                loaded.push_back(std::move(metrics));
            } catch (const std::exception& e) {
                report.skipped.push_back(SkippedLog{group.name, log, e.what()});
            }
        }
    }
    // Participant ids must be unique in the output; fall back to the full path on clashes.
    std::map<std::string, int> id_uses;
    for (const auto& p : loaded) ++id_uses[p.id];
    for (auto& p : loaded) {
        if (id_uses[p.id] > 1) p.id = p.log.string();
    }
    std::sort(loaded.begin(), loaded.end(), [](const auto& a, const auto& b) {
        return std::tie(a.id, a.group) < std::tie(b.id, b.group);
    });
    report.participants = std::move(loaded);

    for (const auto& p : report.participants) report.minutes = std::max(report.minutes, p.per_minute.size());
    // A participant who stopped early keeps their final values.
    for (auto& p : report.participants) {
        while (p.per_minute.size() < report.minutes) p.per_minute.push_back(p.totals);
    }
    for (const auto& p : report.participants) members[p.group].push_back(&p);

    for (const auto& group : groups) {
        GroupSummary summary;
        summary.name = group.name;
        const auto& ps = members[group.name];
        for (const auto* p : ps) summary.participants.push_back(p->id);
        if (ps.empty()) summary.flags.emplace_back("empty");
        if (ps.size() < 2) summary.flags.emplace_back("too_few_for_ci");
        for (std::size_t m = 0; m < kMetricCount; ++m) {
            if (ps.empty()) break;
            double sum = 0;
            for (const auto* p : ps) sum += p->totals[m];
            summary.final_mean[m] = sum / static_cast<double>(ps.size());
        }
        if (ps.size() >= 2) {
            std::array<Interval, kMetricCount> final_ci{};
            for (std::size_t m = 0; m < kMetricCount; ++m) {
                std::vector<double> values;
                for (const auto* p : ps) values.push_back(p->totals[m]);
                final_ci[m] = ci_mean(values, options.ci_level);

                Band band;
                for (std::size_t minute = 0; minute < report.minutes; ++minute) {
                    std::vector<double> at;
                    for (const auto* p : ps) at.push_back(p->per_minute[minute][m]);
                    const auto interval = ci_mean(at, options.ci_level);
                    band.mean.push_back(std::accumulate(at.begin(), at.end(), 0.0) / static_cast<double>(at.size()));
                    band.lo.push_back(interval.lo);
                    band.hi.push_back(interval.hi);
                }
                summary.bands.push_back(std::move(band));
            }
            summary.final_ci = final_ci;
        }
        report.groups.push_back(std::move(summary));
    }

    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            const auto& a = members[groups[i].name];
            const auto& b = members[groups[j].name];
            if (a.empty() || b.empty()) continue;
            PairwiseComparison cmp;
            cmp.a = groups[i].name;
            cmp.b = groups[j].name;
            for (std::size_t m = 0; m < kMetricCount; ++m) {
                std::vector<double> x, y;
                for (const auto* p : a) x.push_back(p->totals[m]);
                for (const auto* p : b) y.push_back(p->totals[m]);
                cmp.wilcoxon[m] = wilcoxon_exact(x, y, options.wilcoxon);
            }
            auto no_tests = [](const auto& ps) {
                return static_cast<std::uint64_t>(
                    std::count_if(ps.begin(), ps.end(), [](const auto* p) { return p->totals[0] == 0.0; }));
            };
            cmp.no_tests_table = ContingencyTable2x2{no_tests(a), a.size() - no_tests(a), no_tests(b),
                                                     b.size() - no_tests(b)};
            cmp.no_tests = fisher_exact_2x2(cmp.no_tests_table);
            report.pairwise.push_back(std::move(cmp));
        }
    }
    return report;
}

std::vector<GroupInput> parse_groups(const Json& j, const std::filesystem::path& logs_dir) {
    if (!j.is_object()) throw ConfigError("groups file must map group names to lists of log paths");
    std::vector<GroupInput> groups;
    for (const auto& [name, logs] : j.items()) {
        if (!logs.is_array()) throw ConfigError("group '" + name + "' must list log paths");
        GroupInput group{name, {}};
        for (const auto& log : logs) {
            if (!log.is_string()) throw ConfigError("group '" + name + "' has a non-string log path");
            std::filesystem::path path = log.get<std::string>();
            group.logs.push_back(path.is_absolute() ? path : logs_dir / path);
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

Json to_json(const GroupReport& report) {
    Json metrics = Json::array();
    for (const auto m : kMetrics) metrics.push_back(m);

    Json participants = Json::array();
    for (const auto& p : report.participants) {
        Json totals = Json::object();
        for (std::size_t m = 0; m < kMetricCount; ++m) totals[std::string(kMetrics[m])] = p.totals[m];
        participants.push_back(Json{{"id", p.id}, {"group", p.group}, {"log", p.log.string()}, {"totals", totals}});
    }

    Json groups = Json::array();
    for (const auto& g : report.groups) {
        Json mean = Json::object();
        Json ci = nullptr;
        for (std::size_t m = 0; m < kMetricCount; ++m) mean[std::string(kMetrics[m])] = g.final_mean[m];
        if (g.final_ci) {
            ci = Json::object();
            for (std::size_t m = 0; m < kMetricCount; ++m) {
                ci[std::string(kMetrics[m])] = Json{{"lo", (*g.final_ci)[m].lo}, {"hi", (*g.final_ci)[m].hi}};
            }
        }
        Json bands = Json::object();
        for (std::size_t m = 0; m < g.bands.size(); ++m) {
            bands[std::string(kMetrics[m])] = Json{{"mean", g.bands[m].mean}, {"lo", g.bands[m].lo}, {"hi", g.bands[m].hi}};
        }
        groups.push_back(Json{{"name", g.name},
                              {"participants", g.participants},
                              {"flags", g.flags},
                              {"mean", mean},
                              {"ci", ci},
                              {"bands", bands}});
    }

    Json pairwise = Json::array();
    for (const auto& c : report.pairwise) {
        Json wilcoxon = Json::object();
        for (std::size_t m = 0; m < kMetricCount; ++m) wilcoxon[std::string(kMetrics[m])] = wilcoxon_json(c.wilcoxon[m]);
        const auto& t = c.no_tests_table;
        pairwise.push_back(Json{{"a", c.a},
                                {"b", c.b},
                                {"wilcoxon", wilcoxon},
                                {"fisher_no_tests",
                                 {{"table", Json::array({Json::array({t.a, t.b}), Json::array({t.c, t.d})})},
                                  {"p", round_significant(c.no_tests.p_value)},
                                  {"degenerate", c.no_tests.degenerate}}}});
    }

    Json skipped = Json::array();
    for (const auto& s : report.skipped) {
        skipped.push_back(Json{{"group", s.group}, {"log", s.log.string()}, {"error", s.error}});
    }

    return Json{{"schema_version", 1},   {"metrics", metrics},   {"minutes", report.minutes},
                {"groups", groups},      {"participants", participants}, {"pairwise", pairwise},
                {"skipped_logs", skipped}};
}

std::string series_csv(const GroupReport& report) {
    std::ostringstream out;
    out << "group,participant,minute";
    for (const auto m : kMetrics) out << ',' << m;
    out << '\n';
    for (const auto& p : report.participants) {
        for (std::size_t minute = 0; minute < p.per_minute.size(); ++minute) {
            out << p.group << ',' << p.id << ',' << minute + 1;
            for (const auto v : p.per_minute[minute]) out << ',' << format_number(v);
            out << '\n';
        }
    }
    return out.str();
}

std::string bands_csv(const GroupReport& report) {
    std::ostringstream out;
    out << "group,metric,minute,mean,lo,hi\n";
    for (const auto& g : report.groups) {
        for (std::size_t m = 0; m < g.bands.size(); ++m) {
            const auto& band = g.bands[m];
            for (std::size_t minute = 0; minute < band.mean.size(); ++minute) {
                out << g.name << ',' << kMetrics[m] << ',' << minute + 1 << ',' << format_number(band.mean[minute])
                    << ',' << format_number(band.lo[minute]) << ',' << format_number(band.hi[minute]) << '\n';
            }
        }
    }
    return out.str();
}

}  // namespace questd::stats
