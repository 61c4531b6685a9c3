#pragma once

#include <cstddef>
#include <span>

namespace slschro {

/// Pairwise (cascade) summation. The association order depends only on the
/// length, so the result is reproducible bit-for-bit.
template <typename T, typename F>
auto pairwise_sum(std::size_t n, F&& term) -> T {
  if (n == 0) return T{};
  if (n <= 16) {
    T acc = term(0);
    for (std::size_t i = 1; i < n; ++i) acc += term(i);
    return acc;
  }
  // recursive halves, iterative over blocks of 16 at the leaves
  struct Rec {
    static T go(std::size_t lo, std::size_t hi, F& f) {
      if (hi - lo <= 16) {
        T acc = f(lo);
        for (std::size_t i = lo + 1; i < hi; ++i) acc += f(i);
        return acc;
      }
      const std::size_t mid = lo + (hi - lo) / 2;
      return go(lo, mid, f) + go(mid, hi, f);
    }
  };
  return Rec::go(0, n, term);
}

inline double pairwise_sum(std::span<const double> xs) {
  return pairwise_sum<double>(xs.size(), [&](std::size_t i) { return xs[i]; });
}

}  // namespace slschro
