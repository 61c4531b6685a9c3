#include "slschro/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "slschro/integrator.hpp"
#include "slschro/spectral.hpp"
#include "slschro/stats.hpp"
#include "slschro/summation.hpp"

namespace slschro {

namespace {

// c_m *= exp(-i k_m^2 tau), i.e. e^{i tau Lap} on coefficients
void free_phase(CplxBuffer& c, std::span<const double> k2, double tau) {
  if (tau == 0.0) return;
  for (std::size_t m = 0; m < c.size(); ++m) c[m] *= std::polar(1.0, -k2[m] * tau);
}

CplxBuffer coefficients_of(const ComplexField& f, const SpectralEngine& engine) {
  CplxBuffer c(f.values().begin(), f.values().end());
  engine.forward(c);
  const double inv_n = 1.0 / static_cast<double>(c.size());
  for (auto& z : c) z *= inv_n;
  return c;
}

// e^{-is Lap} (w * e^{is Lap} u) in coefficients, given the physical values of e^{is Lap} u.
void interaction_product(const CplxBuffer& physical, std::span<const double> w, double s, const SpectralEngine& engine,
                         CplxBuffer& out) {
  const double inv_n = 1.0 / static_cast<double>(physical.size());
  for (std::size_t i = 0; i < physical.size(); ++i) out[i] = physical[i] * (w[i] * inv_n);
  engine.forward(out);
  free_phase(out, engine.wavenumber_squared(), -s);
}

ComplexField to_field(CplxBuffer coeffs, double t, cplx scale, const SpectralEngine& engine) {
  free_phase(coeffs, engine.wavenumber_squared(), t);
  for (auto& z : coeffs) z *= scale;
  engine.inverse_unscaled(coeffs);
  return ComplexField(engine.grid(), std::move(coeffs));
}

std::size_t mesh_index(double t, const BrownianPath& path) {
  const double times[1] = {t};
  return record_steps(times, path.dt, path.steps()).front();
}

double fourier_l1_or_grid(const PotentialSpec& spec, const Grid& grid) {
  try {
    return fourier_l1_norm(spec);
  } catch (const std::domain_error&) {
    return fourier_l1_norm(spec, grid);
  }
}

double lr_or_grid(const PotentialSpec& spec, const Grid& grid, double r) {
  try {
    return lr_norm(spec, r);
  } catch (const std::domain_error&) {
    return lr_norm(spec, grid, r);
  }
}

}  // namespace

DuhamelTerms duhamel_terms(const ComplexField& f, const PotentialSpec& spec, const BrownianPath& path, double t,
                           int order, Quadrature quadrature) {
  if (order != 1 && order != 2) throw std::invalid_argument("truncation order must be 1 or 2");
  const Grid& grid = f.grid();
  const std::size_t K = mesh_index(t, path);
  const double dt = path.dt;
  const double offset = quadrature == Quadrature::midpoint ? 0.5 : 0.0;

  const SpectralEngine engine(grid);
  const auto k2 = engine.wavenumber_squared();
  const std::size_t N = grid.size();
  const auto v = sample_values(spec, grid);
  std::vector<double> v2(N);
  for (std::size_t i = 0; i < N; ++i) v2[i] = v[i] * v[i];

  const CplxBuffer fhat = coefficients_of(f, engine);
  CplxBuffer stoch(N), drift(N), twice(N), running(N);
  CplxBuffer g(N), w(N), y(N);

  for (std::size_t k = 0; k < K; ++k) {
    const double s = (static_cast<double>(k) + offset) * dt;
    const double db = path.increments[k];
    std::copy(fhat.begin(), fhat.end(), g.begin());
    free_phase(g, k2, s);
    engine.inverse_unscaled(g);  // e^{is Lap} f

    interaction_product(g, v, s, engine, w);
    if (order == 2) {
      std::copy(running.begin(), running.end(), y.begin());
      free_phase(y, k2, s);
      engine.inverse_unscaled(y);
      interaction_product(y, v, s, engine, y);
      for (std::size_t m = 0; m < N; ++m) twice[m] += y[m] * db;
      for (std::size_t m = 0; m < N; ++m) running[m] += w[m] * db;
    }
    for (std::size_t m = 0; m < N; ++m) stoch[m] += w[m] * db;

    interaction_product(g, v2, s, engine, w);
    for (std::size_t m = 0; m < N; ++m) drift[m] += w[m] * dt;
  }

  const double delta = spec.delta;
  DuhamelTerms out{
      to_field(fhat, t, 1.0, engine),
      to_field(std::move(stoch), t, cplx{0.0, -delta}, engine),
      to_field(std::move(drift), t, -0.5 * delta * delta, engine),
      std::nullopt,
      ComplexField(grid),
      ComplexField(grid),
  };
  if (order == 2) out.double_stochastic = to_field(std::move(twice), t, -delta * delta, engine);

  const SplitStepSolver solver(grid, v, delta, dt);
  out.psi = solver.final_state(f, std::span<const double>(path.increments).first(K));
  out.remainder = out.psi - out.free - out.stochastic - out.drift;
  if (out.double_stochastic) out.remainder -= *out.double_stochastic;
  return out;
}

IsometryResult ito_isometry_check(const ComplexField& f, const PotentialSpec& spec, double t, double dt,
                                  std::size_t n_paths, std::uint64_t master_seed, int simpson_intervals) {
  if (n_paths < 2) throw std::invalid_argument("isometry check needs at least 2 paths");
  if (simpson_intervals < 2 || simpson_intervals % 2 != 0) {
    throw std::invalid_argument("Simpson rule needs an even number of intervals");
  }
  const Grid& grid = f.grid();
  const std::size_t K = mesh_steps(dt, t);
  const SpectralEngine engine(grid);
  const std::size_t N = grid.size();
  const auto v = sample_values(spec, grid);
  const CplxBuffer fhat = coefficients_of(f, engine);

  // Interaction-picture integrands e^{-is_k Lap} V e^{is_k Lap} f; inner products are unchanged by the
  // common e^{it Lap}, and Parseval gives <a,b> = |box| sum conj(a_m) b_m.
  std::vector<CplxBuffer> W(K, CplxBuffer(N));
  CplxBuffer g(N);
  for (std::size_t k = 0; k < K; ++k) {
    const double s = static_cast<double>(k) * dt;
    std::copy(fhat.begin(), fhat.end(), g.begin());
    free_phase(g, engine.wavenumber_squared(), s);
    engine.inverse_unscaled(g);
    interaction_product(g, v, s, engine, W[k]);
  }
  double box = 1.0;
  for (int a = 0; a < grid.dim(); ++a) box *= grid.length(a);
  std::vector<double> gram(K * K);
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = j; k < K; ++k) {
      const double re = pairwise_sum<double>(N, [&](std::size_t m) { return (std::conj(W[j][m]) * W[k][m]).real(); });
      gram[j * K + k] = gram[k * K + j] = box * re;
    }
  }

  std::vector<double> samples(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const auto path = sample_path(master_seed, p, dt, t);
    const auto& db = path.increments;
    samples[p] = pairwise_sum<double>(K, [&](std::size_t j) {
      return db[j] * pairwise_sum<double>(K, [&](std::size_t k) { return gram[j * K + k] * db[k]; });
    });
  }
  const auto lhs = mean_estimate(samples);

  // Independent route: Simpson in s of ||V e^{is Lap} f||^2 on the physical grid.
  const double h = t / simpson_intervals;
  const SpectralEngine eng2(grid);
  auto integrand = [&](double s) {
    ComplexField u = f;
    free_propagate_inplace(u, s, eng2);
    auto vals = u.values();
    return pairwise_sum<double>(N, [&](std::size_t i) { return v[i] * v[i] * std::norm(vals[i]); }) *
           grid.cell_volume();
  };
  double acc = integrand(0.0) + integrand(t);
  for (int i = 1; i < simpson_intervals; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
  const double rhs = acc * h / 3.0;

  IsometryResult r;
  r.lhs = lhs.mean;
  r.lhs_stderr = lhs.stderr_;
  r.rhs = rhs;
  r.n_paths = n_paths;
  if (rhs == 0.0) {
    r.relative_error = lhs.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    r.relative_stderr = 0.0;
  } else {
    r.relative_error = std::abs(lhs.mean - rhs) / rhs;
    r.relative_stderr = lhs.stderr_ / rhs;
  }
  return r;
}

std::vector<ProbeResult> modulated_probe(const ComplexField& f, const PotentialSpec& spec,
                                         const std::vector<BrownianPath>& paths,
                                         const std::vector<std::pair<double, double>>& st_pairs,
                                         const std::vector<std::array<double, 3>>& xis,
                                         const ModulatedProbeSettings& settings) {
  if (paths.empty() || xis.empty()) throw std::invalid_argument("modulated probe needs paths and frequencies");
  const Grid& grid = f.grid();
  const NormSpec norm(settings.q, settings.rho, grid.dim());
  const double dt = paths.front().dt;
  for (const auto& p : paths) {
    if (p.dt != dt) throw std::invalid_argument("probe paths must share one mesh");
  }

  std::vector<std::array<double, 3>> snapped;
  for (const auto& xi : xis) snapped.push_back(snap_to_lattice(grid, std::span<const double>(xi.data(), grid.dim())));

  std::vector<double> s_times;
  for (const auto& [s, t] : st_pairs) {
    if (!(s >= 0.0) || s > t || !(t > 0.0)) throw std::invalid_argument("probe pairs need 0 <= s <= t, t > 0");
    s_times.push_back(s);
  }
  std::sort(s_times.begin(), s_times.end());
  s_times.erase(std::unique(s_times.begin(), s_times.end()), s_times.end());

  const SplitStepSolver solver(grid, spec, dt);
  const SpectralEngine engine(grid);
  const std::size_t P = paths.size(), X = snapped.size();
  // samples[(pair * X + x) * P + path]
  std::vector<double> samples(st_pairs.size() * X * P);

  for (std::size_t ip = 0; ip < P; ++ip) {
    const auto obs = record_steps(s_times, dt, paths[ip].steps());
    std::size_t slot = 0;
    solver.run(f, std::span<const double>(paths[ip].increments).first(obs.back()), obs,
               [&](std::size_t, const ComplexField& state) {
                 const double s = s_times[slot++];
                 for (std::size_t pair = 0; pair < st_pairs.size(); ++pair) {
                   if (st_pairs[pair].first != s) continue;
                   for (std::size_t x = 0; x < X; ++x) {
                     ComplexField u = modulate(state, std::span<const double>(snapped[x].data(), grid.dim()));
                     free_propagate_inplace(u, st_pairs[pair].second - s, engine);
                     samples[(pair * X + x) * P + ip] = lp_norm(u, settings.q);
                   }
                 }
               });
  }

  const double vhat = fourier_l1_or_grid(spec, grid);
  const double fp = lp_norm(f, norm.p());
  const double d2 = spec.delta * spec.delta * vhat * vhat;
  std::vector<ProbeResult> out;
  for (std::size_t pair = 0; pair < st_pairs.size(); ++pair) {
    const auto [s, t] = st_pairs[pair];
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t x = 0; x < X; ++x) {
      const auto m = rho_moment(std::span<const double>(samples).subspan((pair * X + x) * P, P), settings.rho);
      if (m.estimate > best) {
        best = m.estimate;
        arg = x;
      }
    }
    const double bound =
        std::pow(t, -norm.alpha()) * fp * std::exp(settings.c1 * d2 * s + settings.c2 * d2 * d2 * s * s);
    ProbeResult r;
    r.name = "modulated";
    r.params = {s, t, spec.delta, settings.q, snapped[arg][0], snapped[arg][1], snapped[arg][2]};
    r.value = best;
    r.bound = bound;
    r.ratio = best / bound;
    out.push_back(std::move(r));
  }
  return out;
}

ProbeResult chain_bound_probe(std::span<const double> u, const ComplexField& f, const PotentialSpec& spec, double q,
                              ChainForm form) {
  const std::size_t m = u.size();
  if (m != 2 && m != 3) throw std::invalid_argument("chain probe supports m = 2 or 3");
  const Grid& grid = f.grid();
  const NormSpec norm(q, 2.0, grid.dim());
  const double alpha = norm.alpha();
  const double p = norm.p();
  double sum = 0.0;
  for (double x : u) sum += x;

  switch (form) {
    case ChainForm::exchange:
      if (sum == 0.0) throw std::invalid_argument("exchange form needs sum of u_j != 0");
      break;
    case ChainForm::strong:
      if (!(std::abs(sum) > 1.0)) throw std::invalid_argument("strong form needs |sum u_j| > 1");
      break;
    case ChainForm::variable_small:
      for (double x : u) {
        if (!(x > 0.0)) throw std::invalid_argument("variable-small form needs u_j > 0");
      }
      if (!(u[0] < 1.0) || !(sum > 2.0)) throw std::invalid_argument("variable-small form needs u_1 < 1, sum u_j > 2");
      break;
  }

  const SpectralEngine engine(grid);
  const auto v = sample_values(spec, grid);
  ComplexField state = f;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    free_propagate_inplace(state, u[j], engine);
    auto vals = state.values();
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= v[i];
  }
  free_propagate_inplace(state, u[m - 1], engine);

  const double value = lp_norm(state, q);
  const double fp = lp_norm(f, p);
  const double vhat = fourier_l1_or_grid(spec, grid);
  double bound = 0.0;
  if (form == ChainForm::exchange) {
    bound = std::pow(std::abs(sum), -alpha) * std::pow(vhat, static_cast<double>(m - 1)) * fp;
  } else {
    const double r = p * q / (q - p);
    double brackets = 1.0;
    for (double x : u) brackets *= std::pow(1.0 + x * x, -alpha / 2.0);
    bound = brackets * std::pow(vhat + lr_or_grid(spec, grid, r), static_cast<double>(m - 1)) * fp;
  }

  ProbeResult out;
  out.name = form == ChainForm::exchange ? "chain_exchange"
             : form == ChainForm::strong ? "chain_strong"
                                         : "chain_variable_small";
  out.params.assign(u.begin(), u.end());
  out.params.push_back(q);
  out.value = value;
  out.bound = bound;
  out.ratio = value == 0.0 ? 0.0 : value / bound;
  return out;
}

}  // namespace slschro
