#include "slschro/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "slschro/errors.hpp"
#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/parallel.hpp"
#include "slschro/spectral.hpp"
#include "slschro/stats.hpp"

namespace slschro {

ComplexField pullback(const ComplexField& field, double t) { return free_propagate(field, -t); }

std::vector<std::pair<double, double>> dyadic_pairs(double t0, int count) {
  if (!(t0 > 0.0) || count < 1) throw std::invalid_argument("dyadic pairs need t0 > 0 and count >= 1");
  std::vector<std::pair<double, double>> out;
  double s = t0;
  for (int k = 0; k < count; ++k, s *= 2.0) out.emplace_back(s, 2.0 * s);
  return out;
}

std::vector<CauchyRow> cauchy_table(const EnsembleConfig& config, const std::vector<std::pair<double, double>>& pairs) {
  if (config.n_paths < 2) throw std::invalid_argument("Cauchy table needs at least 2 paths");
  if (pairs.empty()) return {};
  std::vector<double> times;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0) || s > t) throw std::invalid_argument("time pairs need 0 <= s <= t");
    times.push_back(s);
    times.push_back(t);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  const std::size_t steps = mesh_steps(config.dt, times.back());
  const auto obs = record_steps(times, config.dt, steps);
  auto slot = [&](double time) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), time) - times.begin());
  };

  const ComplexField f = sample_gaussian(config.grid, config.initial);
  const SplitStepSolver solver(config.grid, config.potential, config.dt);
  const SpectralEngine engine(config.grid);
  const std::size_t M = config.n_paths;
  const std::size_t P = pairs.size();
  std::vector<double> diffs(M * P);

  parallel_for(M, config.workers, [&](std::size_t path_index) {
    const auto path = sample_path(config.master_seed, path_index, config.dt, times.back());
    std::vector<ComplexField> pulled;
    pulled.reserve(times.size());
    std::size_t r = 0;
    solver.run(f, path.increments, obs, [&](std::size_t, const ComplexField& state) {
      const double mass = boundary_mass_fraction(state, config.core_fraction);
      if (!(mass < config.validity_threshold)) {
        throw ValidityError("path " + std::to_string(path_index) + ": t = " + std::to_string(times[r]) +
                            " is outside the validity window (boundary mass " + std::to_string(mass) + ")");
      }
      ComplexField p = state;
      free_propagate_inplace(p, -times[r], engine);
      pulled.push_back(std::move(p));
      ++r;
    });
    for (std::size_t i = 0; i < P; ++i) {
      const auto& [s, t] = pairs[i];
      diffs[path_index * P + i] = s == t ? 0.0 : lp_norm(pulled[slot(t)] - pulled[slot(s)], 2.0);
    }
  });

  std::vector<CauchyRow> rows;
  std::vector<double> samples(M);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t p = 0; p < M; ++p) samples[p] = diffs[p * P + i];
    for (double rho : config.rhos) {
      const auto m = rho_moment(samples, rho);
      rows.push_back(CauchyRow{pairs[i].first, pairs[i].second, rho, m.estimate, m.stderr_, M});
    }
  }
  return rows;
}

}  // namespace slschro
