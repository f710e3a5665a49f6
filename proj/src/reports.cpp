#include "questd/reports.hpp"

namespace questd {

CoverageCounters sum_per_class(const std::vector<ClassCoverage>& per_class) {
    CoverageCounters sum;
    for (const auto& c : per_class) {
        sum.lines_covered += c.lines_covered;
        sum.lines_total += c.lines_total;
        sum.branches_covered += c.branches_covered;
        sum.branches_total += c.branches_total;
        sum.methods_covered += c.methods_covered;
        sum.methods_total += c.methods_total;
        sum.classes_total += 1;
        if (c.lines_covered > 0 || c.methods_covered > 0) sum.classes_covered += 1;
    }
    return sum;
}

std::optional<std::string> check_invariants(const CoverageReport& report) {
    const auto& t = report.totals;
    if (t.lines_covered > t.lines_total) return "lines covered exceeds total";
    if (t.branches_covered > t.branches_total) return "branches covered exceeds total";
    if (t.methods_covered > t.methods_total) return "methods covered exceeds total";
    if (t.classes_covered > t.classes_total) return "classes covered exceeds total";
    for (const auto& c : report.per_class) {
        if (c.lines_covered > c.lines_total || c.branches_covered > c.branches_total ||
            c.methods_covered > c.methods_total) {
            return "covered exceeds total for class " + c.class_name;
        }
    }
    if (!report.per_class.empty()) {
        const auto sum = sum_per_class(report.per_class);
        if (sum.lines_covered != t.lines_covered || sum.lines_total != t.lines_total ||
            sum.branches_covered != t.branches_covered || sum.branches_total != t.branches_total ||
            sum.methods_covered != t.methods_covered || sum.methods_total != t.methods_total ||
            sum.classes_total != t.classes_total) {
            return "totals disagree with per-class sums";
        }
    }
    return std::nullopt;
}

}  // namespace questd
