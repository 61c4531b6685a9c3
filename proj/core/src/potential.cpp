#include "slschro/potential.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "slschro/errors.hpp"
#include "slschro/spectral.hpp"
#include "slschro/summation.hpp"

namespace slschro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("potential dimension must be 1, 2 or 3");
}

void check_bump(const GaussianBump& b, int dim) {
  for (int a = 0; a < dim; ++a) {
    if (!(b.sigma[a] > 0.0)) throw std::invalid_argument("Gaussian width must be positive");
  }
}

bool same_sign(const std::vector<GaussianBump>& bumps) {
  bool pos = false, neg = false;
  for (const auto& b : bumps) {
    pos = pos || b.amplitude > 0.0;
    neg = neg || b.amplitude < 0.0;
  }
  return !(pos && neg);
}

bool common_center(const std::vector<GaussianBump>& bumps, int dim) {
  for (const auto& b : bumps) {
    for (int a = 0; a < dim; ++a) {
      if (b.center[a] != bumps.front().center[a]) return false;
    }
  }
  return true;
}

double bump_l1(const GaussianBump& b, int dim) {
  double v = std::abs(b.amplitude);
  for (int a = 0; a < dim; ++a) v *= std::sqrt(kTwoPi) * b.sigma[a];
  return v;
}

}  // namespace

PotentialSpec PotentialSpec::gaussian(int dim, double amplitude, double sigma, double delta,
                                      std::array<double, 3> center) {
  check_dim(dim);
  PotentialSpec s;
  s.dim = dim;
  s.shape = PotentialShape::gaussian;
  s.bumps = {GaussianBump{amplitude, {sigma, sigma, sigma}, center}};
  s.delta = delta;
  check_bump(s.bumps.front(), dim);
  return s;
}

PotentialSpec PotentialSpec::constant_value(int dim, double value, double delta) {
  check_dim(dim);
  PotentialSpec s;
  s.dim = dim;
  s.shape = PotentialShape::constant;
  s.constant = value;
  s.delta = delta;
  return s;
}

PotentialSpec PotentialSpec::sum_of_gaussians(int dim, std::vector<GaussianBump> bumps, double delta) {
  check_dim(dim);
  if (bumps.empty()) throw std::invalid_argument("sum of Gaussians needs at least one bump");
  for (const auto& b : bumps) check_bump(b, dim);
  PotentialSpec s;
  s.dim = dim;
  s.shape = PotentialShape::sum_of_gaussians;
  s.bumps = std::move(bumps);
  s.delta = delta;
  return s;
}

double PotentialSpec::value(std::span<const double> x) const {
  if (shape == PotentialShape::constant) return constant;
  double v = 0.0;
  for (const auto& b : bumps) {
    double e = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double dx = x[a] - b.center[a];
      e += dx * dx / (2.0 * b.sigma[a] * b.sigma[a]);
    }
    v += b.amplitude * std::exp(-e);
  }
  return v;
}

void check_resolution(const PotentialSpec& spec, const Grid& grid) {
  if (spec.dim != grid.dim()) throw std::invalid_argument("potential and grid dimensions differ");
  if (spec.shape == PotentialShape::constant) return;
  for (const auto& b : spec.bumps) {
    for (int a = 0; a < spec.dim; ++a) {
      if (b.sigma[a] < 3.0 * grid.spacing(a)) {
        throw std::invalid_argument("Gaussian potential under-resolved: sigma = " + std::to_string(b.sigma[a]) +
                                    " < 3 cells (" + std::to_string(3.0 * grid.spacing(a)) + ")");
      }
      if (3.0 * b.sigma[a] > 0.5 * grid.length(a)) {
        throw std::invalid_argument("Gaussian potential not contained: 3 sigma = " +
                                    std::to_string(3.0 * b.sigma[a]) + " > L/2");
      }
    }
  }
}

std::vector<double> sample_values(const PotentialSpec& spec, const Grid& grid) {
  check_resolution(spec, grid);
  std::vector<double> out(grid.size());
  std::array<double, 3> x{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(a, idx[a]);
    out[i] = spec.value(std::span<const double>(x.data(), grid.dim()));
  }
  return out;
}

ComplexField sample(const PotentialSpec& spec, const Grid& grid) {
  const auto v = sample_values(spec, grid);
  CplxBuffer buf(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) buf[i] = cplx{v[i], 0.0};
  return ComplexField(grid, std::move(buf));
}

double l1_norm(const PotentialSpec& spec) {
  if (spec.shape == PotentialShape::constant) {
    if (spec.constant == 0.0) return 0.0;
    throw TorusOnlyError("constant potential has no finite L^1 norm on R^d");
  }
  if (!same_sign(spec.bumps)) throw std::domain_error("L^1 norm of a mixed-sign Gaussian sum has no closed form");
  double s = 0.0;
  for (const auto& b : spec.bumps) s += bump_l1(b, spec.dim);
  return s;
}

// V^(eta) = (2 pi)^-d int V e^{-i eta x} dx. A Gaussian bump transforms to
// A (2 pi)^{-d/2} prod sigma_a exp(-sigma_a^2 eta_a^2 / 2) e^{-i eta c}, whose L^1 norm is |A|.
// For a common center and one sign, V^ has one phase and ||V^||_1 = |V(center)|.
double fourier_l1_norm(const PotentialSpec& spec) {
  if (spec.shape == PotentialShape::constant) return std::abs(spec.constant);
  if (spec.bumps.size() == 1) return std::abs(spec.bumps.front().amplitude);
  if (!same_sign(spec.bumps) || !common_center(spec.bumps, spec.dim)) {
    throw std::domain_error("Fourier L^1 norm of this Gaussian sum has no closed form");
  }
  double s = 0.0;
  for (const auto& b : spec.bumps) s += std::abs(b.amplitude);
  return s;
}

double lr_norm(const PotentialSpec& spec, double r) {
  if (std::isnan(r) || r < 1.0) throw std::invalid_argument("L^r norm needs r in [1, infinity]");
  if (spec.shape == PotentialShape::constant) {
    if (std::isinf(r) || spec.constant == 0.0) return std::abs(spec.constant);
    throw TorusOnlyError("constant potential has no finite L^r norm on R^d for r < infinity");
  }
  if (spec.bumps.size() != 1) {
    if (r == 1.0) return l1_norm(spec);
    throw std::domain_error("L^r norm of a Gaussian sum has no closed form");
  }
  const auto& b = spec.bumps.front();
  if (std::isinf(r)) return std::abs(b.amplitude);
  // int exp(-r x^2 / (2 sigma^2)) dx = sqrt(2 pi sigma^2 / r)
  double v = std::abs(b.amplitude);
  for (int a = 0; a < spec.dim; ++a) v *= std::pow(kTwoPi * b.sigma[a] * b.sigma[a] / r, 1.0 / (2.0 * r));
  return v;
}

double l1_norm(const PotentialSpec& spec, const Grid& grid) { return lr_norm(spec, grid, 1.0); }

double fourier_l1_norm(const PotentialSpec& spec, const Grid& grid) {
  const auto v = sample_values(spec, grid);
  ComplexField f(grid);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = cplx{v[i], 0.0};
  const auto c = fourier_coefficients(f);
  return pairwise_sum<double>(c.size(), [&](std::size_t i) { return std::abs(c[i]); });
}

double lr_norm(const PotentialSpec& spec, const Grid& grid, double r) {
  const auto v = sample_values(spec, grid);
  ComplexField f(grid);
  for (std::size_t i = 0; i < v.size(); ++i) f[i] = cplx{v[i], 0.0};
  return lp_norm(f, r);
}

double smallness(const PotentialSpec& spec) {
  if (spec.delta == 0.0) return 0.0;
  return spec.delta * (l1_norm(spec) + fourier_l1_norm(spec));
}

double smallness(const PotentialSpec& spec, const Grid& grid) {
  if (spec.delta == 0.0) return 0.0;
  double l1 = 0.0;
  double f1 = 0.0;
  try {
    l1 = l1_norm(spec);
  } catch (const std::domain_error&) {
    l1 = l1_norm(spec, grid);
  }
  try {
    f1 = fourier_l1_norm(spec);
  } catch (const std::domain_error&) {
    f1 = fourier_l1_norm(spec, grid);
  }
  return spec.delta * (l1 + f1);
}

}  // namespace slschro
