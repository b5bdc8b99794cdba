#pragma once

#include <cstddef>

namespace nlwave {

/// Uniform abscissae x_i = x0 + i*h for i = 0..n-1.
struct UniformGrid {
    double x0 = 0.0;
    double h = 1.0;
    std::size_t n = 0;

    double x(std::size_t i) const { return x0 + static_cast<double>(i) * h; }
    double back() const { return x(n - 1); }

    /// Grid with `intervals` cells covering [lo, hi] (intervals + 1 points).
    static UniformGrid spanning(double lo, double hi, std::size_t intervals) {
        return UniformGrid{lo, (hi - lo) / static_cast<double>(intervals), intervals + 1};
    }
};

}  // namespace nlwave
