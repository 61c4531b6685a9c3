#pragma once

#include <utility>
#include <vector>

#include "slschro/ensemble.hpp"
#include "slschro/field.hpp"

namespace slschro {

/// e^{-it Laplacian} applied to a state at time t.
ComplexField pullback(const ComplexField& field, double t);

struct CauchyRow {
  double s = 0.0;
  double t = 0.0;
  double rho = 0.0;
  double estimate = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
};

/// Dyadic pairs (t0 2^k, t0 2^{k+1}) for k = 0 .. count-1.
std::vector<std::pair<double, double>> dyadic_pairs(double t0, int count);

/// ||pullback(Psi(t), t) - pullback(Psi(s), s)||_{L^rho_omega L^2_x} for each pair,
/// on the configured paths (the same paths for every pair). Uses grid, potential,
/// initial, dt, seed, n_paths, rhos, validity settings and workers from the config.
/// Throws ValidityError if any pair time leaves the validity window on any path.
std::vector<CauchyRow> cauchy_table(const EnsembleConfig& config, const std::vector<std::pair<double, double>>& pairs);

}  // namespace slschro
