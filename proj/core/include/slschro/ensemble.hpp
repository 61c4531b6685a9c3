#pragma once

#include <cstdint>
#include <vector>

#include "slschro/grid.hpp"
#include "slschro/initial.hpp"
#include "slschro/potential.hpp"

namespace slschro {

struct EnsembleConfig {
  Grid grid = make_grid(3, 48, 48.0);
  PotentialSpec potential = PotentialSpec::gaussian(3, 1.0, 3.0, 0.05);
  GaussianPacket initial{};
  double dt = 0.01;
  double horizon = 8.0;
  std::vector<double> record_times;
  std::uint64_t master_seed = 0;
  std::size_t n_paths = 1000;
  std::vector<double> qs{2.0, 4.0, 8.0};
  std::vector<double> rhos{2.0, 4.0};
  double validity_threshold = 1e-6;
  double core_fraction = 0.5;
  unsigned workers = 1;
};

struct StatRow {
  double t = 0.0;
  double q = 0.0;
  double rho = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
  bool valid = false;
  double boundary_mass = 0.0;
};

struct EnsembleStats {
  int dim = 3;
  std::vector<double> times;
  /// Largest boundary-mass fraction over all paths, per record time.
  std::vector<double> boundary_mass;
  std::vector<StatRow> rows;  // ordered by t, then q, then rho as configured
  double smallness = 0.0;

  std::vector<StatRow> series(double q, double rho) const;
};

/// Sample ||Psi(t)||_q on every path and reduce to rho-moments. Results depend
/// only on the configuration, never on the worker count. A non-finite
/// trajectory aborts with its path index. With delta = 0 all paths coincide and
/// the free solution is computed once, axis by axis.
EnsembleStats run_ensemble(const EnsembleConfig& config);

/// Last record time (from the front) whose free evolution keeps boundary mass
/// below the threshold; a negative value if even the first record fails.
double free_validity_horizon(const EnsembleConfig& config);

struct FitWindow {
  double t_min = 2.0;
  double t_max = 1e300;
};

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci = 0.0;  // 95% half-width on the slope
  double t_min = 0.0;
  double t_max = 0.0;
  double target_alpha = 0.0;
  bool bootstrap_range = false;  // alpha > 1
  std::size_t points = 0;
  bool weighted = false;
};

/// Least squares of log(estimate) against log(t), weighted by inverse squared
/// relative standard errors (unweighted if any error is zero). Needs >= 6
/// points spanning a factor >= 4 in t; throws ValidityError otherwise.
DecayFit fit_power_law(const std::vector<double>& t, const std::vector<double>& estimate,
                       const std::vector<double>& stderr_, double alpha);

/// Fit over the validity-flagged prefix of the series inside the window.
DecayFit fit_decay(const EnsembleStats& stats, double rho, double q, FitWindow window = {});

/// sup of t^alpha * estimate over validity-flagged records with t >= t_min.
double bootstrap_sup(const EnsembleStats& stats, double rho, double q, double t_min = 0.0);

}  // namespace slschro
