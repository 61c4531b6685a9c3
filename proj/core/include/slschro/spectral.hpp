#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "slschro/field.hpp"

namespace slschro {

namespace detail {
struct PlanPair;
}

/// FFT engine for one grid shape.
///
/// Forward transforms are unnormalized, inverse transforms divide by the point
/// count, so inverse(forward(f)) == f. Plans are shared between engines of the
/// same shape and executed through the new-array interface, which makes a
/// const engine safe to use from many threads as long as each thread passes its
/// own buffer.
class SpectralEngine {
 public:
  explicit SpectralEngine(const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  /// |k|^2 per Fourier bin, FFT order.
  std::span<const double> wavenumber_squared() const noexcept;

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;
  /// Backward transform without the 1/N factor (callers fold it into a multiplier).
  void inverse_unscaled(std::span<cplx> data) const;

 private:
  Grid grid_;
  std::shared_ptr<const detail::PlanPair> plans_;
  std::shared_ptr<const std::vector<double>> k2_;
};

/// Spectral multiplier exp(-i |k|^2 t) / N, ready to sandwich between
/// forward() and inverse_unscaled().
CplxBuffer free_multiplier(const SpectralEngine& engine, double t);

/// e^{it Laplacian} f, exact on the grid modes. Negative t runs the flow backwards.
ComplexField free_propagate(const ComplexField& field, double t);
void free_propagate_inplace(ComplexField& field, double t, const SpectralEngine& engine);

/// Discrete L^p norm (sum |v|^p h^d)^{1/p}; the grid maximum for p = infinity.
double lp_norm(const ComplexField& field, double p);

/// Round each component of xi to the nearest frequency of the grid lattice.
std::array<double, 3> snap_to_lattice(const Grid& grid, std::span<const double> xi);

/// Multiply by e^{i<xi,x>}. xi must lie on the frequency lattice.
ComplexField modulate(const ComplexField& field, std::span<const double> xi);

/// Periodic shift by whole cells along each axis.
ComplexField translate(const ComplexField& field, std::span<const long> cells);

/// Fraction of L^2 mass outside the centered box of side core_fraction * L.
/// Cells straddling the box edge are split by overlap length.
double boundary_mass_fraction(const ComplexField& field, double core_fraction);

/// Per-axis weights used by boundary_mass_fraction (fraction of each cell inside the core).
std::vector<double> core_weights(const Grid& grid, int axis, double core_fraction);

/// Discrete Fourier coefficients c_m with f(x) = sum_m c_m e^{i k_m x}.
CplxBuffer fourier_coefficients(const ComplexField& field);

}  // namespace slschro
