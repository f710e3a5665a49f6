// Python bindings. Structured values cross the boundary as JSON text; the questd package decodes them.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "questd/errors.hpp"
#include "questd/event_log.hpp"
#include "questd/group_report.hpp"
#include "questd/ingestion/classify.hpp"
#include "questd/ingestion/parsers.hpp"
#include "questd/json_codec.hpp"
#include "questd/state_io.hpp"
#include "questd/stats.hpp"

namespace py = pybind11;
using namespace questd;

namespace {

Json replay_json(const std::vector<LogEntry>& entries, std::int64_t idle_minutes) {
    const auto result = replay(entries, EngineConfig{idle_minutes * kMinuteMs});
    Json notifications = Json::array();
    for (const auto& n : result.notifications) notifications.push_back(to_json(n));
    return Json{{"state", state_view(result.state)}, {"notifications", notifications}};
}

stats::LargeSample large_sample(const std::string& name) {
    if (name == "reject") return stats::LargeSample::Reject;
    if (name == "normal") return stats::LargeSample::Normal;
    if (name == "permutation") return stats::LargeSample::Permutation;
    throw ConfigError("large must be 'reject', 'normal' or 'permutation', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_questd, m) {
    m.doc() = "questd core: catalog, report parsers, change classification, engine replay and statistics";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<MalformedReport>(m, "MalformedReport", base);
    py::register_exception<InvalidEvent>(m, "InvalidEvent", base);
    py::register_exception<OutOfOrderEvent>(m, "OutOfOrderEvent", base);
    py::register_exception<SnapshotMismatch>(m, "SnapshotMismatch", base);
    py::register_exception<CorruptState>(m, "CorruptState", base);
    py::register_exception<NotConfirmed>(m, "NotConfirmed", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);
    py::register_exception<EmptySample>(m, "EmptySample", base);
    py::register_exception<SampleTooLarge>(m, "SampleTooLarge", base);
    py::register_exception<InvalidTable>(m, "InvalidTable", base);
    py::register_exception<ZeroVariance>(m, "ZeroVariance", base);
    py::register_exception<TooFewValues>(m, "TooFewValues", base);
    py::register_exception<LengthMismatch>(m, "LengthMismatch", base);

    m.def("catalog_json", [] { return catalog_json().dump(); });

    m.def("parse_junit", [](const std::string& xml) { return to_json(ingestion::parse_junit_xml(xml)).dump(); },
          py::arg("xml"));
    m.def("parse_jacoco", [](const std::string& xml) { return to_json(ingestion::parse_jacoco_xml(xml)).dump(); },
          py::arg("xml"));
    m.def(
        "parse_lcov",
        [](const std::string& text, bool strict) {
            return to_json(ingestion::parse_lcov(text, strict ? ingestion::LcovMode::Strict : ingestion::LcovMode::Lenient))
                .dump();
        },
        py::arg("text"), py::arg("strict") = true);

    m.def(
        "classify_change",
        [](std::optional<std::string> prev, const std::string& next, const std::string& path) {
            Json facts = Json::array();
            for (const auto& f : ingestion::classify_change(prev, next, path)) facts.push_back(to_json(f));
            return Json{{"file_class", to_string(ingestion::classify_file(path, next))}, {"facts", facts}}.dump();
        },
        py::arg("prev"), py::arg("next"), py::arg("path"));

    m.def(
        "replay_ndjson",
        [](const std::string& text, std::int64_t idle_minutes) {
            std::istringstream in(text);
            return replay_json(read_log(in).entries, idle_minutes).dump();
        },
        py::arg("text"), py::arg("idle_minutes") = 30);

    m.def(
        "state_digest",
        [](const std::string& text) {
            std::istringstream in(text);
            return digest(replay(read_log(in).entries).state);
        },
        py::arg("text"));

    m.def(
        "fisher_exact",
        [](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
            const auto r = stats::fisher_exact_2x2({a, b, c, d});
            return py::make_tuple(r.p_value, r.degenerate);
        },
        py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));

    m.def(
        "wilcoxon_exact",
        [](const std::vector<double>& x, const std::vector<double>& y, std::size_t exact_cap, const std::string& large,
           std::uint64_t seed) {
            stats::WilcoxonOptions options;
            options.exact_cap = exact_cap;
            options.large = large_sample(large);
            options.seed = seed;
            const auto r = stats::wilcoxon_exact(x, y, options);
            return py::make_tuple(r.p_value, r.rank_sum, std::string(stats::to_string(r.mode)));
        },
        py::arg("x"), py::arg("y"), py::arg("exact_cap") = 25, py::arg("large") = "reject",
        py::arg("seed") = stats::WilcoxonOptions{}.seed);

    m.def(
        "pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) {
            const auto r = stats::pearson(x, y);
            return py::make_tuple(r.r, r.r_squared);
        },
        py::arg("x"), py::arg("y"));

    m.def(
        "ci_mean",
        [](const std::vector<double>& values, double level) {
            const auto ci = stats::ci_mean(values, level);
            return py::make_tuple(ci.lo, ci.hi);
        },
        py::arg("values"), py::arg("level") = 0.846);

    m.def(
        "group_report",
        [](const std::string& groups, const std::string& logs_dir, double ci_level, const std::string& large) {
            stats::GroupReportOptions options;
            options.ci_level = ci_level;
            options.wilcoxon.large = large_sample(large);
            return stats::to_json(stats::group_report(stats::parse_groups(Json::parse(groups), logs_dir), options)).dump();
        },
        py::arg("groups"), py::arg("logs_dir") = ".", py::arg("ci_level") = 0.846, py::arg("large") = "permutation");
}
