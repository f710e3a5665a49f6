#include "questd/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>

#include "questd/errors.hpp"

namespace questd::stats {

namespace {

/// Doubled midranks of the pooled sample, so tied ranks stay integral.
std::vector<std::uint64_t> doubled_midranks(const std::vector<double>& pooled) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<std::uint64_t> ranks(pooled.size());
    for (std::size_t i = 0; i < order.size();) {
        auto j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        for (auto k = i; k <= j; ++k) ranks[order[k]] = i + j + 2;
        i = j + 1;
    }
    return ranks;
}

std::uint64_t abs_diff(std::uint64_t a, std::uint64_t b) { return a > b ? a - b : b - a; }

/// Exact two-sided p by counting size-n subsets per doubled rank sum.
double counting_p(const std::vector<std::uint64_t>& ranks, std::size_t n, std::uint64_t observed,
                  std::uint64_t expected) {
    const auto max_sum = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
    // counts[k * (max_sum + 1) + s]: subsets of size k with rank sum s.
    std::vector<double> counts((n + 1) * (max_sum + 1), 0.0);
    const auto width = max_sum + 1;
    counts[0] = 1.0;
    std::size_t seen = 0;
    for (const auto r : ranks) {
        ++seen;
        for (auto k = std::min(n, seen); k >= 1; --k) {
            double* row = &counts[k * width];
            const double* prev = &counts[(k - 1) * width];
            for (auto s = max_sum; s >= r; --s) row[s] += prev[s - r];
        }
    }
    const auto cutoff = abs_diff(observed, expected);
    double extreme = 0.0;
    double total = 0.0;
    for (std::uint64_t s = 0; s <= max_sum; ++s) {
        const double c = counts[n * width + s];
        total += c;
        if (c > 0 && abs_diff(s, expected) >= cutoff) extreme += c;
    }
    return std::min(1.0, extreme / total);
}

double monte_carlo_p(std::vector<std::uint64_t> ranks, std::size_t n, std::uint64_t observed, std::uint64_t expected,
                     const WilcoxonOptions& options) {
    std::mt19937_64 rng(options.seed);
    const auto cutoff = abs_diff(observed, expected);
    std::uint64_t extreme = 0;
    for (std::size_t draw = 0; draw < options.monte_carlo_draws; ++draw) {
        std::uint64_t sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, ranks.size() - 1);
            std::swap(ranks[i], ranks[pick(rng)]);
            sum += ranks[i];
        }
        if (abs_diff(sum, expected) >= cutoff) ++extreme;
    }
    return static_cast<double>(extreme + 1) / static_cast<double>(options.monte_carlo_draws + 1);
}

double normal_p(const std::vector<double>& pooled, std::size_t n, std::uint64_t observed) {
    const auto total = static_cast<double>(pooled.size());
    const auto m = total - static_cast<double>(n);
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        auto j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double mean = static_cast<double>(n) * (total + 1) / 2.0;
    const double variance = static_cast<double>(n) * m / 12.0 * ((total + 1) - tie_term / (total * (total - 1)));
    if (variance <= 0) return 1.0;
    const double deviation = std::max(0.0, std::fabs(static_cast<double>(observed) / 2.0 - mean) - 0.5);
    return std::min(1.0, std::erfc(deviation / std::sqrt(variance) / std::sqrt(2.0)));
}

double log_choose(std::uint64_t n, std::uint64_t k) {
    return std::lgamma(static_cast<double>(n) + 1) - std::lgamma(static_cast<double>(k) + 1) -
           std::lgamma(static_cast<double>(n - k) + 1);
}

}  // namespace

std::string_view to_string(WilcoxonMode mode) {
    switch (mode) {
        case WilcoxonMode::Exact: return "exact";
        case WilcoxonMode::ExactCounting: return "exact-counting";
        case WilcoxonMode::MonteCarlo: return "monte-carlo";
        case WilcoxonMode::Normal: return "normal";
    }
    return "exact";
}

WilcoxonResult wilcoxon_exact(std::span<const double> x, std::span<const double> y, const WilcoxonOptions& options) {
    if (x.empty() || y.empty()) throw EmptySample("both samples need at least one value");
    std::vector<double> pooled(x.begin(), x.end());
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto ranks = doubled_midranks(pooled);
    const auto n = x.size();
    const auto observed = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n), std::uint64_t{0});
    const auto expected = static_cast<std::uint64_t>(n) * (pooled.size() + 1);  // doubled mean rank sum

    WilcoxonResult result;
    result.rank_sum = static_cast<double>(observed) / 2.0;

    if (pooled.size() <= options.exact_cap) {
        result.mode = WilcoxonMode::Exact;
        result.p_value = counting_p(ranks, n, observed, expected);
        return result;
    }
    switch (options.large) {
        case LargeSample::Reject:
            throw SampleTooLarge("pooled sample of " + std::to_string(pooled.size()) + " exceeds the exact cap of " +
                                 std::to_string(options.exact_cap) + "; enable a large-sample method");
        case LargeSample::Normal:
            result.mode = WilcoxonMode::Normal;
            result.p_value = normal_p(pooled, n, observed);
            return result;
        case LargeSample::Permutation: {
            const auto max_sum = std::accumulate(ranks.begin(), ranks.end(), std::uint64_t{0});
            if ((n + 1) * (max_sum + 1) <= options.max_counting_cells) {
                result.mode = WilcoxonMode::ExactCounting;
                result.p_value = counting_p(ranks, n, observed, expected);
            } else {
                result.mode = WilcoxonMode::MonteCarlo;
                result.p_value = monte_carlo_p(ranks, n, observed, expected, options);
            }
            return result;
        }
    }
    return result;
}

FisherResult fisher_exact_2x2(const ContingencyTable2x2& t) {
    const auto row1 = t.a + t.b;
    const auto row2 = t.c + t.d;
    const auto col1 = t.a + t.c;
    const auto col2 = t.b + t.d;
    const auto total = row1 + row2;
    if (total == 0) throw InvalidTable("contingency table is empty");
    if (row1 == 0 || row2 == 0 || col1 == 0 || col2 == 0) return FisherResult{1.0, true};

    auto log_p = [&](std::uint64_t a) {
        return log_choose(row1, a) + log_choose(row2, col1 - a) - log_choose(total, col1);
    };
    const auto observed = log_p(t.a);
    const auto lo = col1 > row2 ? col1 - row2 : 0;
    const auto hi = std::min(row1, col1);
    double p = 0.0;
    for (auto a = lo; a <= hi; ++a) {
        const auto lp = log_p(a);
        if (lp <= observed + std::log1p(1e-7)) p += std::exp(lp);
    }
    return FisherResult{std::min(1.0, p), false};
}

Correlation pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw LengthMismatch("pearson needs samples of equal length");
    if (x.size() < 2) throw TooFewValues("pearson needs at least two pairs");
    const auto n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw ZeroVariance("pearson is undefined for a constant sample");
    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    return Correlation{r, r * r};
}

double z_for_level(double level) {
    return boost::math::quantile(boost::math::normal_distribution<double>{}, 1.0 - (1.0 - level) / 2.0);
}

Interval ci_mean(std::span<const double> values, double level) {
    if (values.size() < 2) throw TooFewValues("a confidence interval needs at least two values");
    const auto n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (const auto v : values) ss += (v - mean) * (v - mean);
    const double half = z_for_level(level) * std::sqrt(ss / (n - 1)) / std::sqrt(n);
    return Interval{mean - half, mean + half};
}

bool intervals_overlap(const Interval& a, const Interval& b) { return a.lo <= b.hi && b.lo <= a.hi; }

double round_significant(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) return value;
    const double magnitude = std::floor(std::log10(std::fabs(value)));
    const double scale = std::pow(10.0, digits - 1 - magnitude);
    return std::round(value * scale) / scale;
}

}  // namespace questd::stats
