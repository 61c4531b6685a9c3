#include "slschro/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace slschro {

bool is_fft_friendly(std::size_t n) noexcept {
  if (n < 8) return false;
  if (n % 3 == 0) n /= 3;
  return (n & (n - 1)) == 0;
}

Grid::Grid(int dim, std::array<std::size_t, 3> points, std::array<double, 3> lengths) : dim_(dim) {
  if (dim < 1 || dim > 3) {
    throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  for (int a = 0; a < dim; ++a) {
    if (!is_fft_friendly(points[a])) {
      throw std::invalid_argument("grid points per axis must be >= 8 and a power of two (or 3 times one), got " +
                                  std::to_string(points[a]));
    }
    if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
      throw std::invalid_argument("box length must be positive and finite");
    }
    points_[a] = points[a];
    lengths_[a] = lengths[a];
  }
  for (int a = dim - 1; a >= 0; --a) {
    strides_[a] = size_;
    size_ *= points_[a];
  }
  for (int a = 0; a < dim; ++a) cell_volume_ *= spacing(a);
}

double Grid::coordinate(int axis, std::size_t j) const {
  return -0.5 * length(axis) + static_cast<double>(j) * spacing(axis);
}

double Grid::frequency(int axis, std::size_t m) const {
  const auto n = static_cast<long>(points(axis));
  long signed_m = static_cast<long>(m);
  if (signed_m >= n / 2) signed_m -= n;
  return 2.0 * std::numbers::pi / length(axis) * static_cast<double>(signed_m);
}

std::vector<double> Grid::frequency_lattice(int axis) const {
  std::vector<double> out;
  out.reserve(points(axis));
  for (std::size_t m = 0; m < points(axis); ++m) out.push_back(frequency(axis, m));
  std::sort(out.begin(), out.end());
  return out;
}

std::array<std::size_t, 3> Grid::unravel(std::size_t flat) const {
  std::array<std::size_t, 3> idx{0, 0, 0};
  for (int a = 0; a < dim_; ++a) {
    idx[a] = flat / strides_[a];
    flat %= strides_[a];
  }
  return idx;
}

std::vector<double> Grid::wavenumber_squared() const {
  std::array<std::vector<double>, 3> k2axis;
  for (int a = 0; a < dim_; ++a) {
    k2axis[a].resize(points_[a]);
    for (std::size_t m = 0; m < points_[a]; ++m) {
      const double k = frequency(a, m);
      k2axis[a][m] = k * k;
    }
  }
  std::vector<double> out(size_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto idx = unravel(i);
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += k2axis[a][idx[a]];
    out[i] = s;
  }
  return out;
}

bool Grid::operator==(const Grid& other) const noexcept {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (points_[a] != other.points_[a] || lengths_[a] != other.lengths_[a]) return false;
  }
  return true;
}

Grid make_grid(int dim, std::size_t n, double length) {
  return Grid(dim, {n, n, n}, {length, length, length});
}

NormSpec::NormSpec(double q_, double rho_, int dim_) : q(q_), rho(rho_), dim(dim_) {
  if (!(q >= 2.0)) throw std::invalid_argument("q must be >= 2 (or infinity)");
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be >= 1");
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
}

double NormSpec::p() const {
  if (std::isinf(q)) return 1.0;
  return q / (q - 1.0);
}

double NormSpec::alpha() const {
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return static_cast<double>(dim) * (0.5 - inv_q);
}

}  // namespace slschro
