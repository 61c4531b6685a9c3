#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "slschro/field.hpp"
#include "slschro/noise.hpp"
#include "slschro/potential.hpp"

namespace slschro {

/// Where the integrands of the explicit terms are evaluated inside each mesh cell.
/// midpoint matches the instant at which the integrator applies its noise kick.
enum class Quadrature { midpoint, left_endpoint };

/// Psi(t) = free + stochastic + drift [+ double_stochastic] + remainder.
struct DuhamelTerms {
  ComplexField free;        // e^{it Lap} f
  ComplexField stochastic;  // -i delta sum_k e^{i(t-s_k)Lap} V e^{i s_k Lap} f dB_k
  ComplexField drift;       // -(delta^2/2) sum_k e^{i(t-s_k)Lap} V^2 e^{i s_k Lap} f dt
  std::optional<ComplexField> double_stochastic;  // -delta^2 sum_{j<k} ... dB_j dB_k (order 2)
  ComplexField psi;
  ComplexField remainder;
};

/// Expansion terms at mesh time t on the given path. order is 1 or 2.
DuhamelTerms duhamel_terms(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path, double t,
                           int order = 1, Quadrature quadrature = Quadrature::midpoint);

struct IsometryResult {
  double lhs = 0.0;  // Monte Carlo E || sum_k G_k dB_k ||_2^2
  double lhs_stderr = 0.0;
  double rhs = 0.0;  // Simpson quadrature of int_0^t || V e^{is Lap} f ||_2^2 ds
  double relative_error = 0.0;
  double relative_stderr = 0.0;
  std::size_t n_paths = 0;
};

/// Second moment of the stochastic convolution with deterministic integrand
/// Phi(s) = V e^{is Lap} f against the deterministic integral. Left-endpoint
/// sums with step dt; the quadratic form over the Gram matrix of the
/// per-step integrands gives each path in O(K^2).
IsometryResult ito_isometry_check(const ComplexField& f, const PotentialSpec& spec, double t, double dt,
                                  std::size_t n_paths, std::uint64_t master_seed, int simpson_intervals = 200);

struct ProbeResult {
  std::string name;
  std::vector<double> params;
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

/// F_t(s) over a finite set of modulation frequencies (snapped to the lattice),
/// each evaluated as an L^rho_omega L^q_x norm over the given paths, divided by
/// t^{-alpha} ||f||_p exp(c1 delta^2 ||V^||_1^2 s + c2 delta^4 ||V^||_1^4 s^2).
struct ModulatedProbeSettings {
  double q = 8.0;
  double rho = 2.0;
  double c1 = 1.0;
  double c2 = 1.0;
};

std::vector<ProbeResult> modulated_probe(const ComplexField& f, const PotentialSpec& spec,
                                         const std::vector<BrownianPath>& paths,
                                         const std::vector<std::pair<double, double>>& st_pairs,
                                         const std::vector<std::array<double, 3>>& xis,
                                         const ModulatedProbeSettings& settings);

/// Bound shapes for the operator chain e^{iu_m Lap} prod_{j<m} (V e^{iu_j Lap}).
///   exchange:       |sum u|^{-alpha} ||V^||_1^{m-1} ||f||_p
///   strong:         prod <u_j>^{-alpha} (||V^||_1 + ||V||_{pq/(q-p)})^{m-1} ||f||_p,  |sum u| > 1
///   variable_small: the strong shape with u_j > 0, u_1 < 1, sum u > 2
enum class ChainForm { exchange, strong, variable_small };

ProbeResult chain_bound_probe(std::span<const double> u, const ComplexField& f, const PotentialSpec& spec, double q,
                              ChainForm form);

}  // namespace slschro
