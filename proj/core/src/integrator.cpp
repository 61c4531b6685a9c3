#include "slschro/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slschro/errors.hpp"

namespace slschro {

void noise_phase_inplace(std::span<cplx> values, std::span<const double> potential, double delta, double dB) {
  if (values.size() != potential.size()) throw std::invalid_argument("potential size does not match field");
  if (delta == 0.0 || dB == 0.0) return;
  const double c = delta * dB;
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= std::polar(1.0, -c * potential[i]);
}

ComplexField noise_phase_step(const ComplexField& field, std::span<const double> potential, double delta, double dB) {
  ComplexField out = field;
  noise_phase_inplace(out.values(), potential, delta, dB);
  return out;
}

ComplexField strang_step(const ComplexField& field, double dt, double dB, std::span<const double> potential,
                         double delta) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  SpectralEngine engine(field.grid());
  ComplexField out = field;
  free_propagate_inplace(out, dt / 2.0, engine);
  noise_phase_inplace(out.values(), potential, delta, dB);
  free_propagate_inplace(out, dt / 2.0, engine);
  return out;
}

std::vector<std::size_t> record_steps(std::span<const double> record_times, double dt, std::size_t steps) {
  std::vector<std::size_t> out;
  out.reserve(record_times.size());
  for (double t : record_times) {
    const double r = t / dt;
    const double k = std::round(r);
    if (!(t >= 0.0) || std::abs(r - k) > 1e-9 * std::max(1.0, r)) {
      throw std::invalid_argument("record time " + std::to_string(t) + " is not on the integration mesh");
    }
    if (k > static_cast<double>(steps)) {
      throw std::invalid_argument("record time " + std::to_string(t) + " is past the path horizon");
    }
    out.push_back(static_cast<std::size_t>(k));
  }
  if (!std::is_sorted(out.begin(), out.end())) throw std::invalid_argument("record times must be increasing");
  return out;
}

SplitStepSolver::SplitStepSolver(const Grid& grid, std::vector<double> potential, double delta, double dt)
    : engine_(grid), potential_(std::move(potential)), delta_(delta), dt_(dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (potential_.size() != grid.size()) throw std::invalid_argument("potential size does not match grid");
  if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");
  half_scaled_ = free_multiplier(engine_, dt / 2.0);
  const auto k2 = engine_.wavenumber_squared();
  half_.resize(k2.size());
  for (std::size_t m = 0; m < k2.size(); ++m) half_[m] = std::polar(1.0, -k2[m] * dt / 2.0);
}

SplitStepSolver::SplitStepSolver(const Grid& grid, const PotentialSpec& spec, double dt)
    : SplitStepSolver(grid, sample_values(spec, grid), spec.delta, dt) {}

void SplitStepSolver::run(const ComplexField& f, std::span<const double> increments,
                          std::span<const std::size_t> observe_steps, const Observer& observe) const {
  if (!(f.grid() == grid())) throw std::invalid_argument("initial field lives on a different grid");
  if (!f.all_finite()) throw NumericalError("initial field has non-finite values");
  const std::size_t steps = increments.size();
  for (std::size_t s : observe_steps) {
    if (s > steps) throw std::invalid_argument("observation step past the end of the increments");
  }

  const std::size_t n = f.size();
  std::size_t next_obs = 0;
  auto emit = [&](std::size_t k, const CplxBuffer& spectral) {
    if (next_obs >= observe_steps.size() || observe_steps[next_obs] != k) return;
    ComplexField snap(grid(), spectral);
    engine_.inverse_unscaled(snap.values());
    while (next_obs < observe_steps.size() && observe_steps[next_obs] == k) {
      observe(k, snap);
      ++next_obs;
    }
  };

  // Record at t = 0 straight from f.
  while (next_obs < observe_steps.size() && observe_steps[next_obs] == 0) {
    observe(0, f);
    ++next_obs;
  }
  if (steps == 0) return;

  // spec holds Fourier coefficients (FFT / N) at the current mesh time.
  CplxBuffer spec(f.values().begin(), f.values().end());
  engine_.forward(spec);
  for (std::size_t m = 0; m < n; ++m) spec[m] *= half_scaled_[m];  // now at t_0 + dt/2, scaled

  CplxBuffer work(n);
  for (std::size_t k = 0; k < steps; ++k) {
    std::copy(spec.begin(), spec.end(), work.begin());
    engine_.inverse_unscaled(work);
    noise_phase_inplace(work, potential_, delta_, increments[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(work[i].real()) || !std::isfinite(work[i].imag())) {
        throw NumericalError("non-finite value after noise kick at step " + std::to_string(k));
      }
    }
    engine_.forward(work);
    for (std::size_t m = 0; m < n; ++m) spec[m] = work[m] * half_scaled_[m];  // t_{k+1}
    emit(k + 1, spec);
    if (k + 1 < steps) {
      for (std::size_t m = 0; m < n; ++m) spec[m] *= half_[m];  // t_{k+1} + dt/2
    }
  }
}

Trajectory SplitStepSolver::evolve(const ComplexField& f, const BrownianPath& path,
                                   std::span<const double> record_times) const {
  if (std::abs(path.dt - dt_) > 1e-15 * dt_) throw std::invalid_argument("path mesh does not match solver dt");
  const auto obs = record_steps(record_times, dt_, path.steps());
  Trajectory traj;
  traj.master_seed = path.master_seed;
  traj.index = path.index;
  traj.dt = dt_;
  const std::size_t last = obs.empty() ? 0 : obs.back();
  run(f, std::span<const double>(path.increments).first(last), obs, [&](std::size_t k, const ComplexField& state) {
    traj.times.push_back(static_cast<double>(k) * dt_);
    traj.records.push_back(state);
  });
  return traj;
}

ComplexField SplitStepSolver::final_state(const ComplexField& f, std::span<const double> increments) const {
  ComplexField out = f;
  const std::size_t last[1] = {increments.size()};
  run(f, increments, last, [&](std::size_t, const ComplexField& state) { out = state; });
  return out;
}

Trajectory evolve(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path,
                  std::span<const double> record_times) {
  SplitStepSolver solver(f.grid(), spec, path.dt);
  return solver.evolve(f, path, record_times);
}

double strong_error(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path) {
  const auto fine_path = refine(path);
  const auto v = sample_values(spec, f.grid());
  SplitStepSolver coarse(f.grid(), v, spec.delta, path.dt);
  SplitStepSolver fine(f.grid(), v, spec.delta, fine_path.dt);
  const auto a = coarse.final_state(f, path.increments);
  const auto b = fine.final_state(f, fine_path.increments);
  return lp_norm(a - b, 2.0);
}

}  // namespace slschro
