#pragma once

#include <array>
#include <optional>
#include <vector>

#include "slschro/field.hpp"

namespace slschro {

enum class PotentialShape { gaussian, constant, sum_of_gaussians };

/// A exp(-sum_a (x_a - c_a)^2 / (2 sigma_a^2)).
struct GaussianBump {
  double amplitude = 1.0;
  std::array<double, 3> sigma{1.0, 1.0, 1.0};
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// Real potential V and its coupling delta.
struct PotentialSpec {
  int dim = 3;
  PotentialShape shape = PotentialShape::gaussian;
  std::vector<GaussianBump> bumps;  // one entry for the gaussian shape
  double constant = 0.0;            // value for the constant shape
  double delta = 0.0;

  static PotentialSpec gaussian(int dim, double amplitude, double sigma, double delta,
                                std::array<double, 3> center = {});
  static PotentialSpec constant_value(int dim, double value, double delta);
  static PotentialSpec sum_of_gaussians(int dim, std::vector<GaussianBump> bumps, double delta);

  double value(std::span<const double> x) const;
};

/// Rejects Gaussians narrower than 3 cells or wider than L/6.
void check_resolution(const PotentialSpec& spec, const Grid& grid);

/// V on the grid points, after check_resolution.
std::vector<double> sample_values(const PotentialSpec& spec, const Grid& grid);
ComplexField sample(const PotentialSpec& spec, const Grid& grid);

/// Closed forms. The constant shape has no finite L^r norm for r < inf on R^d
/// (TorusOnlyError). Mixed-sign sums have no closed ||V||_1 or ||V^||_1 and
/// throw std::domain_error; use the grid versions below.
double l1_norm(const PotentialSpec& spec);
double fourier_l1_norm(const PotentialSpec& spec);
double lr_norm(const PotentialSpec& spec, double r);

/// Grid quadratures of the same norms.
double l1_norm(const PotentialSpec& spec, const Grid& grid);
double fourier_l1_norm(const PotentialSpec& spec, const Grid& grid);
double lr_norm(const PotentialSpec& spec, const Grid& grid, double r);

/// delta (||V||_1 + ||V^||_1), closed form.
double smallness(const PotentialSpec& spec);
/// Same, falling back to grid quadrature when no closed form exists.
double smallness(const PotentialSpec& spec, const Grid& grid);

}  // namespace slschro
