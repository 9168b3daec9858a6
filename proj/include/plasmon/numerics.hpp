#pragma once

#include <cstddef>
#include <span>

namespace plasmon {

/// Pairwise (tree) summation with a fixed split order, so the result is
/// reproducible bit-for-bit and the rounding error grows like O(log n).
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace plasmon
