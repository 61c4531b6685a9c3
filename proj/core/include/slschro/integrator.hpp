#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "slschro/field.hpp"
#include "slschro/noise.hpp"
#include "slschro/potential.hpp"
#include "slschro/spectral.hpp"

namespace slschro {

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexField> records;
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  double dt = 0.0;
};

/// Multiply by exp(-i delta V(x) dB), the exact noise flow of one step.
ComplexField noise_phase_step(const ComplexField& field, std::span<const double> potential, double delta, double dB);
void noise_phase_inplace(std::span<cplx> values, std::span<const double> potential, double delta, double dB);

/// Half free step, noise phase with the full dB, half free step.
ComplexField strang_step(const ComplexField& field, double dt, double dB, std::span<const double> potential,
                         double delta);

/// Mesh indices of record times; each must sit on the mesh within 1e-9 dt.
std::vector<std::size_t> record_steps(std::span<const double> record_times, double dt, std::size_t steps);

/// Strang split-step integrator for one grid, potential and step size.
///
/// Consecutive half free steps are applied in Fourier space between kicks, so a
/// step costs one forward and one backward transform. The state passes through
/// the same arithmetic whether or not a time is recorded.
class SplitStepSolver {
 public:
  using Observer = std::function<void(std::size_t step, const ComplexField& state)>;

  SplitStepSolver(const Grid& grid, std::vector<double> potential, double delta, double dt);
  SplitStepSolver(const Grid& grid, const PotentialSpec& spec, double dt);

  const Grid& grid() const noexcept { return engine_.grid(); }
  double dt() const noexcept { return dt_; }
  std::span<const double> potential() const noexcept { return potential_; }
  double delta() const noexcept { return delta_; }

  /// Integrate over the first `steps` increments of the path, calling observe at
  /// each requested mesh index (sorted, duplicates allowed). Throws NumericalError
  /// naming the step if a non-finite value appears.
  void run(const ComplexField& f, std::span<const double> increments, std::span<const std::size_t> observe_steps,
           const Observer& observe) const;

  Trajectory evolve(const ComplexField& f, const BrownianPath& path, std::span<const double> record_times) const;
  ComplexField final_state(const ComplexField& f, std::span<const double> increments) const;

 private:
  SpectralEngine engine_;
  std::vector<double> potential_;
  double delta_;
  double dt_;
  CplxBuffer half_scaled_;  // exp(-i k^2 dt/2) / N
  CplxBuffer half_;         // exp(-i k^2 dt/2)
};

Trajectory evolve(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path,
                  std::span<const double> record_times);

/// ||Psi_dt(T) - Psi_{dt/2}(T)||_2, the finer run driven by refine(path).
double strong_error(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path);

}  // namespace slschro
