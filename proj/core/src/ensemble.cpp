#include "slschro/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "slschro/errors.hpp"
#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/parallel.hpp"
#include "slschro/separable.hpp"
#include "slschro/spectral.hpp"
#include "slschro/stats.hpp"
#include "slschro/summation.hpp"

namespace slschro {

std::vector<StatRow> EnsembleStats::series(double q, double rho) const {
  std::vector<StatRow> out;
  for (const auto& r : rows) {
    if (r.q == q && r.rho == rho) out.push_back(r);
  }
  return out;
}

namespace {

void check_config(const EnsembleConfig& c) {
  if (c.n_paths < 2) throw std::invalid_argument("ensemble needs at least 2 paths");
  if (c.record_times.empty()) throw std::invalid_argument("ensemble needs record times");
  if (c.qs.empty() || c.rhos.empty()) throw std::invalid_argument("ensemble needs q and rho values");
  for (double q : c.qs) {
    if (!(q >= 2.0)) throw std::invalid_argument("q must be >= 2");
  }
  for (double r : c.rhos) {
    if (!(r >= 1.0) || std::isinf(r)) throw std::invalid_argument("rho must be finite and >= 1");
  }
  if (c.potential.dim != c.grid.dim()) throw std::invalid_argument("potential and grid dimensions differ");
}

}  // namespace

namespace {

// Reduce per-path samples into rows, checking the power-mean ordering in rho.
void reduce_rows(const EnsembleConfig& config, const std::vector<double>& times, const std::vector<double>& norms,
                 const std::vector<double>& masses, std::size_t M, EnsembleStats& stats) {
  const std::size_t R = times.size();
  const std::size_t Q = config.qs.size();
  std::vector<double> samples(M);
  for (std::size_t r = 0; r < R; ++r) {
    const double t = times[r];
    double mass = 0.0;
    for (std::size_t p = 0; p < M; ++p) mass = std::max(mass, masses[p * R + r]);
    stats.times.push_back(t);
    stats.boundary_mass.push_back(mass);
    const bool valid = mass < config.validity_threshold;
    for (std::size_t iq = 0; iq < Q; ++iq) {
      for (std::size_t p = 0; p < M; ++p) samples[p] = norms[(p * R + r) * Q + iq];
      double previous = 0.0;
      double previous_rho = 0.0;
      for (double rho : config.rhos) {
        const auto m = rho_moment(samples, rho);
        if (rho > previous_rho) {
          if (m.estimate < previous * (1.0 - 1e-12)) {
            throw NumericalError("rho-moment decreased in rho at t = " + std::to_string(t));
          }
          previous = m.estimate;
          previous_rho = rho;
        }
        stats.rows.push_back(StatRow{t, config.qs[iq], rho, m.estimate, m.stderr_, M, valid, mass});
      }
    }
  }
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleConfig& config) {
  check_config(config);
  const std::size_t steps = mesh_steps(config.dt, config.horizon);
  const auto obs = record_steps(config.record_times, config.dt, steps);
  const std::size_t R = obs.size();
  const std::size_t Q = config.qs.size();
  const std::size_t M = config.n_paths;
  std::vector<double> times(R);
  for (std::size_t r = 0; r < R; ++r) times[r] = static_cast<double>(obs[r]) * config.dt;

  EnsembleStats stats;
  stats.dim = config.grid.dim();
  stats.smallness = smallness(config.potential, config.grid);

  if (config.potential.delta == 0.0) {
    // Without coupling every path is e^{it Lap} f. The Gaussian datum is a
    // product over axes, so the grid solution is evaluated axis by axis.
    std::vector<double> norms(R * Q), masses(R);
    for (std::size_t r = 0; r < R; ++r) {
      auto u = SeparableField::gaussian(config.grid, config.initial);
      u.free_propagate(times[r]);
      for (std::size_t iq = 0; iq < Q; ++iq) norms[r * Q + iq] = u.lp_norm(config.qs[iq]);
      masses[r] = u.boundary_mass_fraction(config.core_fraction);
    }
    std::vector<double> all_norms(M * R * Q), all_masses(M * R);
    for (std::size_t p = 0; p < M; ++p) {
      std::copy(norms.begin(), norms.end(), all_norms.begin() + static_cast<std::ptrdiff_t>(p * R * Q));
      std::copy(masses.begin(), masses.end(), all_masses.begin() + static_cast<std::ptrdiff_t>(p * R));
    }
    reduce_rows(config, times, all_norms, all_masses, M, stats);
    return stats;
  }

  const ComplexField f = sample_gaussian(config.grid, config.initial);
  const SplitStepSolver solver(config.grid, config.potential, config.dt);

  // norms[(path * R + r) * Q + iq], masses[path * R + r]
  std::vector<double> norms(M * R * Q);
  std::vector<double> masses(M * R);

  parallel_for(M, config.workers, [&](std::size_t path_index) {
    const auto path = sample_path(config.master_seed, path_index, config.dt, times.back());
    std::size_t r = 0;
    try {
      solver.run(f, path.increments, obs, [&](std::size_t, const ComplexField& state) {
        for (std::size_t iq = 0; iq < Q; ++iq) norms[(path_index * R + r) * Q + iq] = lp_norm(state, config.qs[iq]);
        masses[path_index * R + r] = boundary_mass_fraction(state, config.core_fraction);
        ++r;
      });
    } catch (const NumericalError& e) {
      throw NumericalError("path " + std::to_string(path_index) + ": " + e.what());
    }
  });

  reduce_rows(config, times, norms, masses, M, stats);
  return stats;
}

double free_validity_horizon(const EnsembleConfig& config) {
  const std::size_t steps = mesh_steps(config.dt, config.horizon);
  const auto obs = record_steps(config.record_times, config.dt, steps);
  double last = -1.0;
  for (std::size_t k : obs) {
    const double t = static_cast<double>(k) * config.dt;
    auto u = SeparableField::gaussian(config.grid, config.initial);
    u.free_propagate(t);
    if (u.boundary_mass_fraction(config.core_fraction) >= config.validity_threshold) break;
    last = t;
  }
  return last;
}

DecayFit fit_power_law(const std::vector<double>& t, const std::vector<double>& estimate,
                       const std::vector<double>& stderr_, double alpha) {
  const std::size_t n = t.size();
  if (estimate.size() != n || stderr_.size() != n) throw std::invalid_argument("fit inputs differ in length");
  if (n < 6) throw ValidityError("decay fit needs at least 6 valid points, got " + std::to_string(n));
  const double t_min = *std::min_element(t.begin(), t.end());
  const double t_max = *std::max_element(t.begin(), t.end());
  if (!(t_min > 0.0) || t_max < 4.0 * t_min) {
    throw ValidityError("decay fit window must span a factor of 4 in t, got [" + std::to_string(t_min) + ", " +
                        std::to_string(t_max) + "]");
  }
  std::vector<double> x(n), y(n), w(n);
  bool weighted = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(estimate[i] > 0.0)) throw std::invalid_argument("decay fit needs positive estimates");
    x[i] = std::log(t[i]);
    y[i] = std::log(estimate[i]);
    const double rel = stderr_[i] / estimate[i];
    if (!(rel > 0.0) || !std::isfinite(rel)) weighted = false;
    w[i] = rel;
  }
  for (std::size_t i = 0; i < n; ++i) w[i] = weighted ? 1.0 / (w[i] * w[i]) : 1.0;

  const double sw = pairwise_sum(std::span<const double>(w));
  const double xbar = pairwise_sum<double>(n, [&](std::size_t i) { return w[i] * x[i]; }) / sw;
  const double ybar = pairwise_sum<double>(n, [&](std::size_t i) { return w[i] * y[i]; }) / sw;
  const double sxx = pairwise_sum<double>(n, [&](std::size_t i) { return w[i] * (x[i] - xbar) * (x[i] - xbar); });
  const double sxy = pairwise_sum<double>(n, [&](std::size_t i) { return w[i] * (x[i] - xbar) * (y[i] - ybar); });

  DecayFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  fit.t_min = t_min;
  fit.t_max = t_max;
  fit.target_alpha = alpha;
  fit.bootstrap_range = alpha > 1.0;
  fit.points = n;
  fit.weighted = weighted;
  double slope_se = 0.0;
  if (weighted) {
    slope_se = std::sqrt(1.0 / sxx);
  } else {
    const double rss = pairwise_sum<double>(n, [&](std::size_t i) {
      const double e = y[i] - fit.intercept - fit.slope * x[i];
      return e * e;
    });
    slope_se = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  fit.ci = 1.96 * slope_se;
  return fit;
}

DecayFit fit_decay(const EnsembleStats& stats, double rho, double q, FitWindow window) {
  const NormSpec norm(q, rho, stats.dim);
  std::vector<double> t, est, se;
  for (const auto& row : stats.series(q, rho)) {
    if (row.t < window.t_min) continue;
    if (row.t > window.t_max || !row.valid) break;
    t.push_back(row.t);
    est.push_back(row.estimate);
    se.push_back(row.stderr_);
  }
  return fit_power_law(t, est, se, norm.alpha());
}

double bootstrap_sup(const EnsembleStats& stats, double rho, double q, double t_min) {
  const double alpha = NormSpec(q, rho, stats.dim).alpha();
  double sup = 0.0;
  bool any = false;
  for (const auto& row : stats.series(q, rho)) {
    if (row.t < t_min) continue;
    if (!row.valid) break;
    sup = std::max(sup, std::pow(row.t, alpha) * row.estimate);
    any = true;
  }
  if (!any) throw ValidityError("no validity-flagged records for the bootstrap quantity");
  return sup;
}

}  // namespace slschro
