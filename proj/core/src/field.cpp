#include "slschro/field.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "slschro/summation.hpp"

namespace slschro {

ComplexField::ComplexField(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), cplx{0.0, 0.0}) {}

ComplexField::ComplexField(Grid grid, CplxBuffer values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field value count does not match grid point count");
  }
}

ComplexField ComplexField::from_function(const Grid& grid,
                                         const std::function<cplx(std::span<const double>)>& fn) {
  ComplexField out(grid);
  std::array<double, 3> x{0.0, 0.0, 0.0};
  const int d = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unravel(i);
    for (int a = 0; a < d; ++a) x[a] = grid.coordinate(a, idx[a]);
    out.values_[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
  }
  return out;
}

bool ComplexField::all_finite() const noexcept {
  for (const auto& v : values_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

namespace {
void require_same_grid(const ComplexField& a, const ComplexField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
}
}  // namespace

ComplexField& ComplexField::operator+=(const ComplexField& rhs) {
  require_same_grid(*this, rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += rhs.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& rhs) {
  require_same_grid(*this, rhs);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= rhs.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cplx s) {
  for (auto& v : values_) v *= s;
  return *this;
}

ComplexField operator+(ComplexField lhs, const ComplexField& rhs) { return lhs += rhs; }
ComplexField operator-(ComplexField lhs, const ComplexField& rhs) { return lhs -= rhs; }
ComplexField operator*(cplx s, ComplexField f) { return f *= s; }

cplx inner_product(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b);
  const auto va = a.values();
  const auto vb = b.values();
  const cplx s = pairwise_sum<cplx>(va.size(), [&](std::size_t i) { return std::conj(va[i]) * vb[i]; });
  return s * a.grid().cell_volume();
}

}  // namespace slschro
