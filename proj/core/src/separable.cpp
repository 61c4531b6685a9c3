#include "slschro/separable.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slschro/spectral.hpp"
#include "slschro/summation.hpp"

namespace slschro {

namespace {
Grid axis_grid(const Grid& grid, int axis) {
  return Grid(1, {grid.points(axis), 1, 1}, {grid.length(axis), 1.0, 1.0});
}
}  // namespace

SeparableField::SeparableField(const Grid& grid, std::array<CplxBuffer, 3> factors)
    : grid_(grid), factors_(std::move(factors)) {
  for (int a = 0; a < grid_.dim(); ++a) {
    if (factors_[a].size() != grid_.points(a)) throw std::invalid_argument("factor length does not match its axis");
  }
}

SeparableField SeparableField::gaussian(const Grid& grid, const GaussianPacket& packet) {
  if (!(packet.a > 0.0)) throw std::invalid_argument("Gaussian packet needs a > 0");
  std::array<CplxBuffer, 3> factors;
  for (int a = 0; a < grid.dim(); ++a) {
    factors[a].resize(grid.points(a));
    for (std::size_t j = 0; j < grid.points(a); ++j) {
      const double dx = grid.coordinate(a, j) - packet.center[a];
      factors[a][j] = cplx{std::exp(-packet.a * dx * dx), 0.0};
    }
  }
  return SeparableField(grid, std::move(factors));
}

void SeparableField::free_propagate(double t) {
  if (t == 0.0) return;
  for (int a = 0; a < grid_.dim(); ++a) {
    SpectralEngine engine(axis_grid(grid_, a));
    const auto mult = free_multiplier(engine, t);
    engine.forward(factors_[a]);
    for (std::size_t m = 0; m < mult.size(); ++m) factors_[a][m] *= mult[m];
    engine.inverse_unscaled(factors_[a]);
  }
}

double SeparableField::lp_norm(double p) const {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("L^p norm needs p in [1, infinity]");
  double out = 1.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto& g = factors_[a];
    if (std::isinf(p)) {
      double m = 0.0;
      for (const auto& z : g) m = std::max(m, std::abs(z));
      out *= m;
      continue;
    }
    const double s = pairwise_sum<double>(g.size(), [&](std::size_t j) { return std::pow(std::abs(g[j]), p); });
    out *= std::pow(s * grid_.spacing(a), 1.0 / p);
  }
  return out;
}

double SeparableField::boundary_mass_fraction(double core_fraction) const {
  if (!(core_fraction > 0.0 && core_fraction < 1.0)) throw std::invalid_argument("core fraction must lie in (0,1)");
  double inside = 1.0;
  for (int a = 0; a < grid_.dim(); ++a) {
    const auto w = core_weights(grid_, a, core_fraction);
    const auto& g = factors_[a];
    const double total = pairwise_sum<double>(g.size(), [&](std::size_t j) { return std::norm(g[j]); });
    if (total == 0.0) return 0.0;
    const double in = pairwise_sum<double>(g.size(), [&](std::size_t j) { return w[j] * std::norm(g[j]); });
    inside *= in / total;
  }
  return std::clamp(1.0 - inside, 0.0, 1.0);
}

ComplexField SeparableField::expand() const {
  ComplexField out(grid_);
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = grid_.unravel(i);
    cplx z = factors_[0][idx[0]];
    for (int a = 1; a < grid_.dim(); ++a) z *= factors_[a][idx[a]];
    v[i] = z;
  }
  return out;
}

}  // namespace slschro
