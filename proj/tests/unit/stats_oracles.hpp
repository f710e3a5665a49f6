#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

// Brute-force reference implementations, written without the library's rank or DP code.
namespace questd::testing {

/// Average ranks (1-based) of the pooled values.
inline std::vector<double> midranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double less = 0, equal = 0;
        for (const auto w : v) {
            if (w < v[i]) ++less;
            if (w == v[i]) ++equal;
        }
        r[i] = less + (equal + 1) / 2.0;
    }
    return r;
}

/// Two-sided permutation p of the first sample's rank sum, enumerating every subset.
inline double brute_wilcoxon(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> pooled = x;
    pooled.insert(pooled.end(), y.begin(), y.end());
    const auto ranks = midranks(pooled);
    const auto total = pooled.size();
    const auto n = x.size();
    double observed = 0;
    for (std::size_t i = 0; i < n; ++i) observed += ranks[i];
    const double expected = static_cast<double>(n) * (static_cast<double>(total) + 1) / 2.0;
    std::uint64_t extreme = 0, count = 0;
    for (std::uint32_t mask = 0; mask < (1u << total); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
        double s = 0;
        for (std::size_t i = 0; i < total; ++i) {
            if (mask & (1u << i)) s += ranks[i];
        }
        ++count;
        if (std::fabs(s - expected) >= std::fabs(observed - expected) - 1e-9) ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(count);
}

inline double choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    double r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

/// Two-sided Fisher p: sum over all tables with the same margins no more likely than the observed one.
inline double brute_fisher(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const auto r1 = a + b, r2 = c + d, c1 = a + c, n = r1 + r2;
    auto prob = [&](std::uint64_t x) { return choose(r1, x) * choose(r2, c1 - x) / choose(n, c1); };
    const double observed = prob(a);
    double p = 0;
    for (std::uint64_t x = 0; x <= std::min(r1, c1); ++x) {
        if (c1 - x > r2) continue;
        const double px = prob(x);
        if (px <= observed * (1 + 1e-7)) p += px;
    }
    return std::min(1.0, p);
}

}  // namespace questd::testing
