#pragma once

#include <cstddef>
#include <span>

namespace slschro {

/// (mean x^rho)^{1/rho} with a delta-method standard error.
struct MomentEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
  /// False when fewer than two samples were given; stderr_ is then NaN.
  bool has_stderr = false;
};

MomentEstimate rho_moment(std::span<const double> samples, double rho);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and its standard error (M-1 denominator), pairwise sums.
MeanEstimate mean_estimate(std::span<const double> samples);

}  // namespace slschro
