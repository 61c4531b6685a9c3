#include "slschro/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "slschro/summation.hpp"

namespace slschro {

MeanEstimate mean_estimate(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m == 0) throw std::invalid_argument("no samples");
  MeanEstimate out;
  out.mean = pairwise_sum(samples) / static_cast<double>(m);
  if (m < 2) {
    out.stderr_ = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double mu = out.mean;
  const double ss = pairwise_sum<double>(m, [&](std::size_t i) {
    const double d = samples[i] - mu;
    return d * d;
  });
  out.stderr_ = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  return out;
}

MomentEstimate rho_moment(std::span<const double> samples, double rho) {
  if (!(rho >= 1.0) || std::isinf(rho)) throw std::invalid_argument("rho must be finite and >= 1");
  if (samples.empty()) throw std::invalid_argument("rho_moment needs samples");
  std::vector<double> powered(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i] >= 0.0)) throw std::invalid_argument("rho_moment samples must be nonnegative");
    powered[i] = std::pow(samples[i], rho);
  }
  MomentEstimate out;
  out.count = samples.size();
  out.has_stderr = samples.size() >= 2;
  if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
    // a degenerate ensemble: report it exactly rather than through pow/rounding
    out.estimate = samples.front();
    out.stderr_ = out.has_stderr ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const auto mean = mean_estimate(powered);
  out.estimate = std::pow(mean.mean, 1.0 / rho);
  if (!out.has_stderr) {
    out.stderr_ = std::numeric_limits<double>::quiet_NaN();
  } else if (mean.mean == 0.0) {
    out.stderr_ = 0.0;
  } else {
    // d/dm m^{1/rho} = (1/rho) m^{1/rho - 1}
    out.stderr_ = std::pow(mean.mean, 1.0 / rho - 1.0) / rho * mean.stderr_;
  }
  return out;
}

}  // namespace slschro
