#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "slschro/aligned.hpp"
#include "slschro/grid.hpp"

namespace slschro {

using cplx = std::complex<double>;
using CplxBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

/// Complex values on a Grid, row-major, one per point.
class ComplexField {
 public:
  explicit ComplexField(Grid grid);
  ComplexField(Grid grid, CplxBuffer values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<cplx> values() noexcept { return values_; }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  /// Fill from a function of the point coordinates.
  static ComplexField from_function(const Grid& grid,
                                    const std::function<cplx(std::span<const double>)>& fn);

  bool all_finite() const noexcept;

  ComplexField& operator+=(const ComplexField& rhs);
  ComplexField& operator-=(const ComplexField& rhs);
  ComplexField& operator*=(cplx s);

 private:
  Grid grid_;
  CplxBuffer values_;
};

ComplexField operator+(ComplexField lhs, const ComplexField& rhs);
ComplexField operator-(ComplexField lhs, const ComplexField& rhs);
ComplexField operator*(cplx s, ComplexField f);

/// Discrete L^2 inner product sum conj(a) b h^d.
cplx inner_product(const ComplexField& a, const ComplexField& b);

}  // namespace slschro
