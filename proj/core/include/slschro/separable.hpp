#pragma once

#include <array>

#include "slschro/field.hpp"
#include "slschro/initial.hpp"

namespace slschro {

/// Rank-one field f(x) = g_0(x_0) g_1(x_1) ... carried as one factor per axis.
///
/// The free flow, discrete L^p norms and the boundary-mass weights all
/// factorize over axes, so this gives the d-dimensional grid result for
/// product data at a cost of d one-dimensional transforms. Only the free
/// flow preserves rank one; there is no noise step here.
class SeparableField {
 public:
  SeparableField(const Grid& grid, std::array<CplxBuffer, 3> factors);

  static SeparableField gaussian(const Grid& grid, const GaussianPacket& packet);

  const Grid& grid() const noexcept { return grid_; }
  const CplxBuffer& factor(int axis) const { return factors_.at(axis); }

  void free_propagate(double t);
  double lp_norm(double p) const;
  double boundary_mass_fraction(double core_fraction) const;

  /// Materialize the full d-dimensional field (small grids only).
  ComplexField expand() const;

 private:
  Grid grid_;
  std::array<CplxBuffer, 3> factors_;
};

}  // namespace slschro
