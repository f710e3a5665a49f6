#include "questd/ingestion/parsers.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <charconv>
#include <optional>
#include <sstream>

#include "questd/errors.hpp"

namespace questd::ingestion {

namespace {

namespace pt = boost::property_tree;

pt::ptree read_xml_document(std::string_view bytes, std::string_view what) {
    std::istringstream in{std::string(bytes)};
    pt::ptree tree;
    try {
        pt::read_xml(in, tree);
    } catch (const std::exception& e) {
        throw MalformedReport(std::string(what) + ": " + e.what());
    }
    return tree;
}

std::optional<std::string> attribute(const pt::ptree& node, const char* name) {
    const auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return std::nullopt;
    const auto value = attrs->get_optional<std::string>(name);
    if (!value) return std::nullopt;
    return *value;
}

std::uint64_t parse_count(std::string_view text, std::string_view what) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end) {
        throw MalformedReport(std::string(what) + ": expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

// ---------------- JUnit ----------------

struct SuiteWalk {
    std::vector<TestCaseResult> cases;
    std::uint64_t elements = 0;  // testcase elements including skipped ones
};

void walk_suite(const pt::ptree& suite, SuiteWalk& walk) {
    const auto suite_name = attribute(suite, "name").value_or("");
    const auto before = walk.elements;
    for (const auto& [tag, child] : suite) {
        if (tag == "testsuite") {
            walk_suite(child, walk);
            continue;
        }
        if (tag != "testcase") continue;
        ++walk.elements;
        const auto name = attribute(child, "name");
        if (!name) throw MalformedReport("junit: testcase without a name attribute");

        TestCaseResult result;
        result.method_name = *name;
        result.class_name = attribute(child, "classname").value_or(suite_name);
        bool skipped = false;
        for (const auto& [inner_tag, inner] : child) {
            if (inner_tag == "skipped" || inner_tag == "disabled") {
                skipped = true;
            } else if ((inner_tag == "failure" || inner_tag == "error") && result.status == TestStatus::Passed) {
                result.status = inner_tag == "failure" ? TestStatus::Failed : TestStatus::Errored;
                result.failure_type = attribute(inner, "type").value_or("");
            }
        }
        if (skipped && result.status == TestStatus::Passed) continue;
        walk.cases.push_back(std::move(result));
    }
    if (const auto declared = attribute(suite, "tests")) {
        const auto count = parse_count(*declared, "junit: tests attribute");
        if (count != walk.elements - before) {
            throw MalformedReport("junit: suite '" + suite_name + "' declares " + std::to_string(count) +
                                  " tests but contains " + std::to_string(walk.elements - before));
        }
    }
}

// ---------------- JaCoCo ----------------

struct CounterSet {
    bool any = false;
    std::uint64_t lines_covered = 0, lines_total = 0;
    std::uint64_t branches_covered = 0, branches_total = 0;
    std::uint64_t methods_covered = 0, methods_total = 0;
    std::uint64_t classes_covered = 0, classes_total = 0;
};

CounterSet read_counters(const pt::ptree& node) {
    CounterSet set;
    for (const auto& [tag, child] : node) {
        if (tag != "counter") continue;
        const auto type = attribute(child, "type");
        const auto missed = attribute(child, "missed");
        const auto covered = attribute(child, "covered");
        if (!type || !missed || !covered) throw MalformedReport("jacoco: counter needs type, missed and covered");
        const auto m = parse_count(*missed, "jacoco: missed");
        const auto c = parse_count(*covered, "jacoco: covered");
        if (m > UINT64_MAX - c) throw MalformedReport("jacoco: counter overflow");
        std::uint64_t* cov = nullptr;
        std::uint64_t* tot = nullptr;
        if (*type == "LINE") {
            cov = &set.lines_covered, tot = &set.lines_total;
        } else if (*type == "BRANCH") {
            cov = &set.branches_covered, tot = &set.branches_total;
        } else if (*type == "METHOD") {
            cov = &set.methods_covered, tot = &set.methods_total;
        } else if (*type == "CLASS") {
            cov = &set.classes_covered, tot = &set.classes_total;
        } else {
            continue;  // INSTRUCTION, COMPLEXITY
        }
        set.any = true;
        *cov = c;
        *tot = c + m;
    }
    return set;
}

std::string dotted(std::string name) {
    for (auto& ch : name) {
        if (ch == '/') ch = '.';
    }
    return name;
}

void collect_classes(const pt::ptree& node, std::vector<ClassCoverage>& out) {
    for (const auto& [tag, child] : node) {
        if (tag == "group" || tag == "package") {
            collect_classes(child, out);
        } else if (tag == "class") {
            const auto name = attribute(child, "name");
            if (!name) throw MalformedReport("jacoco: class without a name attribute");
            const auto counters = read_counters(child);
            if (!counters.any) continue;
            out.push_back(ClassCoverage{dotted(*name), counters.lines_covered, counters.lines_total,
                                        counters.branches_covered, counters.branches_total,
                                        counters.methods_covered, counters.methods_total});
        }
    }
}

// ---------------- LCOV ----------------

struct LcovSection {
    std::string file;
    std::uint64_t da_total = 0, da_hit = 0;
    std::uint64_t brda_total = 0, brda_hit = 0;
    std::uint64_t fn_total = 0, fnda_hit = 0;
    std::optional<std::uint64_t> lf, lh, brf, brh, fnf, fnh;
};

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

ClassCoverage close_section(const LcovSection& s, std::size_t line_no) {
    ClassCoverage c;
    c.class_name = s.file;
    c.lines_total = s.lf.value_or(s.da_total);
    c.lines_covered = s.lh.value_or(s.da_hit);
    c.branches_total = s.brf.value_or(s.brda_total);
    c.branches_covered = s.brh.value_or(s.brda_hit);
    c.methods_total = s.fnf.value_or(s.fn_total);
    c.methods_covered = s.fnh.value_or(s.fnda_hit);
    if (c.lines_covered > c.lines_total || c.branches_covered > c.branches_total ||
        c.methods_covered > c.methods_total) {
        throw MalformedReport("lcov: covered exceeds total in section ending at line " + std::to_string(line_no));
    }
    return c;
}

}  // namespace

TestRunReport parse_junit_xml(std::string_view bytes) {
    const auto doc = read_xml_document(bytes, "junit");
    TestRunReport report;
    SuiteWalk walk;
    bool found = false;
    for (const auto& [tag, node] : doc) {
        if (tag == "testsuite") {
            if (!found) report.suite_id = attribute(node, "name").value_or("");
            walk_suite(node, walk);
            found = true;
        } else if (tag == "testsuites") {
            report.suite_id = attribute(node, "name").value_or("");
            for (const auto& [inner_tag, suite] : node) {
                if (inner_tag != "testsuite") continue;
                if (report.suite_id.empty()) report.suite_id = attribute(suite, "name").value_or("");
                walk_suite(suite, walk);
            }
            found = true;
        }
    }
    if (!found) throw MalformedReport("junit: no testsuite or testsuites element");
    report.cases = std::move(walk.cases);
    return report;
}

CoverageReport parse_jacoco_xml(std::string_view bytes) {
    const auto doc = read_xml_document(bytes, "jacoco");
    const auto root = doc.get_child_optional("report");
    if (!root) throw MalformedReport("jacoco: no report element");

    CoverageReport report;
    collect_classes(*root, report.per_class);
    const auto counters = read_counters(*root);
    if (counters.any) {
        report.totals = CoverageCounters{counters.lines_covered,    counters.lines_total,
                                         counters.branches_covered, counters.branches_total,
                                         counters.methods_covered,  counters.methods_total,
                                         counters.classes_covered,  counters.classes_total};
    } else {
        report.totals = sum_per_class(report.per_class);
    }
    if (auto violation = check_invariants(report)) throw MalformedReport("jacoco: " + *violation);
    return report;
}

CoverageReport parse_lcov(std::string_view text, LcovMode mode) {
    CoverageReport report;
    std::optional<LcovSection> section;
    std::size_t line_no = 0;

    auto need_section = [&](std::string_view key) -> LcovSection& {
        if (!section) {
            throw MalformedReport("lcov: " + std::string(key) + " record outside of an SF section at line " +
                                  std::to_string(line_no));
        }
        return *section;
    };
    auto number = [&](std::string_view value) {
        return parse_count(value, "lcov line " + std::to_string(line_no));
    };

    for (auto raw : split(text, '\n')) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty()) continue;
        if (raw == "end_of_record") {
            report.per_class.push_back(close_section(need_section("end_of_record"), line_no));
            section.reset();
            continue;
        }
        const auto colon = raw.find(':');
        const auto key = raw.substr(0, colon);
        const auto value = colon == std::string_view::npos ? std::string_view{} : raw.substr(colon + 1);

        if (key == "TN" || key == "VER") {
            continue;
        } else if (key == "SF") {
            if (section) {
                if (mode == LcovMode::Strict) throw MalformedReport("lcov: SF without end_of_record before it");
                report.per_class.push_back(close_section(*section, line_no));
            }
            section = LcovSection{};
            section->file = std::string(value);
        } else if (key == "DA") {
            auto& s = need_section(key);
            const auto parts = split(value, ',');
            if (parts.size() < 2) throw MalformedReport("lcov: DA needs line,hits");
            number(parts[0]);
            ++s.da_total;
            if (number(parts[1]) > 0) ++s.da_hit;
        } else if (key == "BRDA") {
            auto& s = need_section(key);
            const auto parts = split(value, ',');
            if (parts.size() != 4) throw MalformedReport("lcov: BRDA needs line,block,branch,taken");
            ++s.brda_total;
            if (parts[3] != "-" && number(parts[3]) > 0) ++s.brda_hit;
        } else if (key == "FN") {
            ++need_section(key).fn_total;
        } else if (key == "FNDA") {
            auto& s = need_section(key);
            const auto parts = split(value, ',');
            if (parts.size() < 2) throw MalformedReport("lcov: FNDA needs hits,name");
            if (number(parts[0]) > 0) ++s.fnda_hit;
        } else if (key == "FNL" || key == "FNA") {
            need_section(key);
        } else if (key == "LF") {
            need_section(key).lf = number(value);
        } else if (key == "LH") {
            need_section(key).lh = number(value);
        } else if (key == "BRF") {
            need_section(key).brf = number(value);
        } else if (key == "BRH") {
            need_section(key).brh = number(value);
        } else if (key == "FNF") {
            need_section(key).fnf = number(value);
        } else if (key == "FNH") {
            need_section(key).fnh = number(value);
        } else if (mode == LcovMode::Strict) {
            throw MalformedReport("lcov: unknown record '" + std::string(key) + "' at line " + std::to_string(line_no));
        }
    }
    if (section) {
        if (mode == LcovMode::Strict) throw MalformedReport("lcov: missing end_of_record at end of input");
        report.per_class.push_back(close_section(*section, line_no));
    }
    report.totals = sum_per_class(report.per_class);
    return report;
}

std::string to_lcov(const CoverageReport& report) {
    std::ostringstream out;
    for (const auto& c : report.per_class) {
        out << "SF:" << c.class_name << '\n'
            << "FNF:" << c.methods_total << '\n'
            << "FNH:" << c.methods_covered << '\n'
            << "LF:" << c.lines_total << '\n'
            << "LH:" << c.lines_covered << '\n'
            << "BRF:" << c.branches_total << '\n'
            << "BRH:" << c.branches_covered << '\n'
            << "end_of_record\n";
    }
    return out.str();
}

}  // namespace questd::ingestion
