// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace testutil {

// Two-sample Kolmogorov-Smirnov statistic.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        const double fa = static_cast<double>(i) / a.size();
        const double fb = static_cast<double>(j) / b.size();
        d = std::max(d, std::abs(fa - fb));
    }
    return d;
}

// Critical value at significance alpha = 0.01: c(alpha) sqrt((n+m)/(n m)).
inline double ks_critical_1pct(std::size_t n, std::size_t m) {
    const double c = 1.62762;
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

struct MeanSe {
    double mean = 0.0, se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    const double m = s / static_cast<double>(v.size());
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    const double var = q / (static_cast<double>(v.size()) - 1.0);
    return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace testutil
