#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Kolmogorov-Smirnov distance of a sample from Uniform(0,1).
inline double ks_uniform_distance(std::vector<double> x) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max({d, std::fabs(x[i] - lo), std::fabs(hi - x[i])});
    }
    return d;
}
