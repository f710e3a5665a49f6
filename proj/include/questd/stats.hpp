#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace questd::stats {

struct Sample {
    std::string label;
    std::vector<double> values;
};

/// What to do when the pooled sample exceeds the exact-enumeration cap.
enum class LargeSample { Reject, Permutation, Normal };

enum class WilcoxonMode { Exact, ExactCounting, MonteCarlo, Normal };

std::string_view to_string(WilcoxonMode mode);

struct WilcoxonOptions {
    std::size_t exact_cap = 25;
    LargeSample large = LargeSample::Reject;
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    std::size_t monte_carlo_draws = 1'000'000;
    /// Largest counting table (subsets x rank-sum cells) attempted before falling back to Monte Carlo.
    std::size_t max_counting_cells = 50'000'000;
};

struct WilcoxonResult {
    double p_value = 1.0;
    /// Rank sum of the first sample (midranks for ties).
    double rank_sum = 0.0;
    WilcoxonMode mode = WilcoxonMode::Exact;
};

/// Two-sided Wilcoxon-Mann-Whitney rank-sum test. The null distribution is the permutation
/// distribution of the first sample's rank sum over all assignments of the pooled values,
/// counted exactly by dynamic programming over doubled midranks.
/// Throws EmptySample, SampleTooLarge (total above exact_cap with LargeSample::Reject).
WilcoxonResult wilcoxon_exact(std::span<const double> x, std::span<const double> y, const WilcoxonOptions& options = {});

/// Rows are groups, columns outcome / not outcome.
struct ContingencyTable2x2 {
    std::uint64_t a = 0, b = 0, c = 0, d = 0;
    bool operator==(const ContingencyTable2x2&) const = default;
};

struct FisherResult {
    double p_value = 1.0;
    /// A row or column margin is zero; p is 1 by convention.
    bool degenerate = false;
};

/// Two-sided Fisher exact test: sums the hypergeometric probabilities of all tables with the
/// observed margins that are no more likely than the observed one (relative tolerance 1e-7).
/// Throws InvalidTable when the table is empty.
FisherResult fisher_exact_2x2(const ContingencyTable2x2& table);

struct Correlation {
    double r = 0.0;
    double r_squared = 0.0;
};

/// Product-moment correlation. Throws LengthMismatch, TooFewValues (< 2), ZeroVariance.
Correlation pearson(std::span<const double> x, std::span<const double> y);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Two-sided standard-normal critical value for a confidence level.
double z_for_level(double level);

/// mean ± z·s/√n using the sample standard deviation. Throws TooFewValues.
Interval ci_mean(std::span<const double> values, double level = 0.846);

/// Non-overlapping 84.6% intervals indicate a significant difference at the 5% level.
bool intervals_overlap(const Interval& a, const Interval& b);

/// Rounds to `digits` significant digits (p-values are reported with 4).
double round_significant(double value, int digits = 4);

}  // namespace questd::stats
