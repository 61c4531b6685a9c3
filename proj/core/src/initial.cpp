#include "slschro/initial.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slschro {

namespace {
double squared_distance(const GaussianPacket& packet, std::span<const double> x) {
  double r2 = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double dx = x[a] - packet.center[a];
    r2 += dx * dx;
  }
  return r2;
}
}  // namespace

ComplexField sample_gaussian(const Grid& grid, const GaussianPacket& packet) {
  if (!(packet.a > 0.0)) throw std::invalid_argument("Gaussian packet needs a > 0");
  return ComplexField::from_function(grid, [&](std::span<const double> x) {
    return cplx{std::exp(-packet.a * squared_distance(packet, x)), 0.0};
  });
}

cplx free_gaussian_value(const GaussianPacket& packet, int dim, double t, std::span<const double> x) {
  const cplx denom{1.0, 4.0 * packet.a * t};
  const double r2 = squared_distance(packet, x);
  return std::pow(denom, -0.5 * dim) * std::exp(-packet.a * r2 / denom);
}

ComplexField free_gaussian(const Grid& grid, const GaussianPacket& packet, double t) {
  return ComplexField::from_function(grid, [&](std::span<const double> x) {
    return free_gaussian_value(packet, grid.dim(), t, x);
  });
}

double free_gaussian_lq_norm(const GaussianPacket& packet, int dim, double t, double q) {
  const double s = 1.0 + 16.0 * packet.a * packet.a * t * t;
  const double d = static_cast<double>(dim);
  if (std::isinf(q)) return std::pow(s, -d / 4.0);
  return std::pow(s, -d / 4.0 + d / (2.0 * q)) * std::pow(std::numbers::pi / (q * packet.a), d / (2.0 * q));
}

}  // namespace slschro
