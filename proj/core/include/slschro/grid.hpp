#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace slschro {

/// Periodic box [-L/2, L/2)^d sampled with n points per axis.
///
/// Point j on an axis sits at x_j = -L/2 + j*h. Frequencies follow FFT order,
/// k_m = (2*pi/L) * m with m in {0, .., n/2-1, -n/2, .., -1}, so the lattice is
/// symmetric about zero up to the Nyquist mode -n/2.
class Grid {
 public:
  Grid(int dim, std::array<std::size_t, 3> points, std::array<double, 3> lengths);

  int dim() const noexcept { return dim_; }
  std::size_t points(int axis) const { return points_.at(axis); }
  double length(int axis) const { return lengths_.at(axis); }
  double spacing(int axis) const { return lengths_.at(axis) / static_cast<double>(points_.at(axis)); }

  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept { return cell_volume_; }

  double coordinate(int axis, std::size_t j) const;
  /// Angular frequency of FFT bin m on the given axis.
  double frequency(int axis, std::size_t m) const;
  /// Sorted frequencies -n/2 .. n/2-1 of an axis (mainly for inspection).
  std::vector<double> frequency_lattice(int axis) const;

  /// Row-major strides: the last axis varies fastest.
  std::size_t stride(int axis) const { return strides_.at(axis); }
  std::array<std::size_t, 3> unravel(std::size_t flat) const;

  /// Squared wavenumber |k|^2 for every point, row-major.
  std::vector<double> wavenumber_squared() const;

  bool operator==(const Grid& other) const noexcept;

 private:
  int dim_;
  std::array<std::size_t, 3> points_{1, 1, 1};
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<std::size_t, 3> strides_{1, 1, 1};
  std::size_t size_ = 1;
  double cell_volume_ = 1.0;
};

/// True for n >= 8 of the form 2^k or 3*2^k.
bool is_fft_friendly(std::size_t n) noexcept;

/// Uniform grid: d axes, each with n points on a box of length L.
Grid make_grid(int dim, std::size_t n, double length);

/// Mixed-norm exponents: q for space, its dual p, rho for probability.
struct NormSpec {
  double q = 2.0;
  double rho = 2.0;
  int dim = 3;

  NormSpec(double q_, double rho_, int dim_);

  double p() const;
  /// alpha = d (1/2 - 1/q)
  double alpha() const;
  /// The range where the decay argument runs directly: alpha > 1.
  bool in_bootstrap_range() const { return alpha() > 1.0; }
};

}  // namespace slschro
