#pragma once

#include <array>
#include <span>

#include "slschro/field.hpp"

namespace slschro {

/// Initial datum f(x) = exp(-a |x - c|^2).
struct GaussianPacket {
  double a = 0.25;
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

ComplexField sample_gaussian(const Grid& grid, const GaussianPacket& packet);

/// Continuum free evolution of the packet:
/// (1 + 4iat)^{-d/2} exp(-a |x-c|^2 / (1 + 4iat)).
cplx free_gaussian_value(const GaussianPacket& packet, int dim, double t, std::span<const double> x);
ComplexField free_gaussian(const Grid& grid, const GaussianPacket& packet, double t);

/// ||e^{it Laplacian} f||_{L^q(R^d)} = (1+16a^2t^2)^{-d/4 + d/(2q)} (pi/(qa))^{d/(2q)}.
double free_gaussian_lq_norm(const GaussianPacket& packet, int dim, double t, double q);

}  // namespace slschro
