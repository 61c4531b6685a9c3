#include "slschro_app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "slschro/duhamel.hpp"
#include "slschro/ensemble.hpp"
#include "slschro/errors.hpp"
#include "slschro/initial.hpp"
#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/scattering.hpp"
#include "slschro/snapshot.hpp"
#include "slschro/spectral.hpp"

namespace slschro::app {

using nlohmann::ordered_json;

namespace {

Provenance provenance(const AppConfig& c, const std::string& command) {
  return {command, c.digest, c.master_seed, c.smallness()};
}

ordered_json num(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

ordered_json fit_json(const DecayFit& fit) {
  ordered_json j;
  j["slope"] = num(fit.slope);
  j["intercept"] = num(fit.intercept);
  j["ci"] = num(fit.ci);
  j["target_alpha"] = num(fit.target_alpha);
  j["window"] = {num(fit.t_min), num(fit.t_max)};
  j["points"] = fit.points;
  j["weighted"] = fit.weighted;
  j["bootstrap_range"] = fit.bootstrap_range;
  return j;
}

Table ensemble_table(const EnsembleStats& stats) {
  Table t;
  t.columns = {"t", "q", "rho", "estimate", "stderr", "n_paths", "valid", "boundary_mass"};
  for (const auto& r : stats.rows) {
    t.rows.push_back({r.t, r.q, r.rho, r.estimate, r.stderr_, static_cast<long long>(r.n_paths), r.valid,
                      r.boundary_mass});
  }
  return t;
}

// Largest t such that every record up to t is validity-flagged.
double valid_prefix_end(const EnsembleStats& stats, double q, double rho) {
  double end = -1.0;
  for (const auto& r : stats.series(q, rho)) {
    if (!r.valid) break;
    end = r.t;
  }
  return end;
}

// Ordinary least-squares slope of log y against log x.
double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

struct CauchyVerdict {
  bool nonincreasing = true;
  double final_over_first = 0.0;
};

CauchyVerdict judge(const std::vector<CauchyRow>& rows, double rho) {
  std::vector<const CauchyRow*> series;
  for (const auto& r : rows) {
    if (r.rho == rho) series.push_back(&r);
  }
  CauchyVerdict v;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const double slack = 3.0 * std::hypot(series[k - 1]->stderr_, series[k]->stderr_);
    if (series[k]->estimate > series[k - 1]->estimate + slack) v.nonincreasing = false;
  }
  v.final_over_first = series.back()->estimate / series.front()->estimate;
  return v;
}

Table cauchy_csv(const std::vector<CauchyRow>& rows) {
  Table t;
  t.columns = {"s", "t", "rho", "estimate", "stderr", "n_paths"};
  for (const auto& r : rows) t.rows.push_back({r.s, r.t, r.rho, r.estimate, r.stderr_, static_cast<long long>(r.n_paths)});
  return t;
}

std::string q_column(double q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "norm_q%g", q);
  return buf;
}

}  // namespace

CommandResult run_free_dispersive(const AppConfig& c, const RunOptions& o) {
  auto ec = c.ensemble(o.workers);
  ec.potential.delta = 0.0;
  ec.n_paths = 2;
  ec.rhos = {2.0};
  const auto stats = run_ensemble(ec);
  const double horizon = valid_prefix_end(stats, 2.0, 2.0);
  if (horizon <= 0.0) throw ValidityError("free evolution leaves the validity window before the first record");

  FitWindow window;
  window.t_min = c.fit_t_min.value_or(horizon / 10.0);
  window.t_max = c.fit_t_max.value_or(horizon);
  const auto prov = provenance(c, "free-dispersive");

  Table table;
  table.columns = {"t", "q", "estimate", "oracle", "relative_error", "valid", "boundary_mass"};
  for (const auto& r : stats.rows) {
    const double oracle = free_gaussian_lq_norm(c.initial, c.grid.dim(), r.t, r.q);
    table.rows.push_back({r.t, r.q, r.estimate, oracle, std::abs(r.estimate - oracle) / oracle, r.valid,
                          r.boundary_mass});
  }

  ordered_json report;
  report["validity_horizon"] = horizon;
  report["window"] = {window.t_min, window.t_max};
  report["fits"] = ordered_json::array();
  bool all_pass = true;
  for (double q : c.qs) {
    const auto fit = fit_decay(stats, 2.0, q, window);
    ordered_json j{{"q", q}};
    j.update(fit_json(fit));
    const double err = std::abs(fit.slope + fit.target_alpha);
    j["slope_error"] = err;
    j["pass"] = err < 0.03;
    all_pass = all_pass && err < 0.03;
    report["fits"].push_back(j);
  }
  report["pass"] = all_pass;

  CommandResult out;
  out.artifacts.push_back(render_table("free_dispersive", table, prov, o.format));
  out.artifacts.push_back(render_report("free_dispersive_fit.json", report, prov));
  out.report = std::move(report);
  return out;
}

CommandResult run_simulate(const AppConfig& c, const RunOptions& o) {
  const auto path = sample_path(c.master_seed, c.path_index, c.dt, c.horizon);
  const SplitStepSolver solver(c.grid, c.potential, c.dt);
  const auto f = sample_gaussian(c.grid, c.initial);
  const double mass0 = lp_norm(f, 2.0);
  const auto traj = solver.evolve(f, path, c.record_times);
  const auto steps = record_steps(c.record_times, c.dt, path.steps());
  const auto prov = provenance(c, "simulate");

  Table table;
  table.columns = {"index", "t", "brownian", "mass_drift", "boundary_mass", "snapshot"};
  for (double q : c.qs) table.columns.push_back(q_column(q));

  CommandResult out;
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const auto& psi = traj.records[k];
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.sls", k);
    std::ostringstream bytes(std::ios::binary);
    write_snapshot(psi, bytes);
    out.artifacts.push_back({name, bytes.str()});

    const double drift = std::abs(lp_norm(psi, 2.0) - mass0) / mass0;
    worst = std::max(worst, drift);
    std::vector<Cell> row{static_cast<long long>(k), traj.times[k], path.value_at(steps[k]), drift,
                          boundary_mass_fraction(psi, c.core_fraction), std::string(name)};
    for (double q : c.qs) row.emplace_back(lp_norm(psi, q));
    table.rows.push_back(std::move(row));
  }
  out.artifacts.push_back(render_table("simulate", table, prov, o.format));

  ordered_json report;
  report["path_index"] = c.path_index;
  report["steps"] = path.steps();
  report["records"] = traj.records.size();
  report["max_mass_drift"] = worst;
  out.artifacts.push_back(render_report("simulate_report.json", report, prov));
  out.report = std::move(report);
  return out;
}

CommandResult run_decay(const AppConfig& c, const RunOptions& o) {
  const auto ec = c.ensemble(o.workers);
  FitWindow window;
  window.t_min = c.fit_t_min.value_or(2.0);
  if (c.fit_t_max) window.t_max = *c.fit_t_max;

  // Refuse before the expensive run when the free flow already exhausts the window.
  const double horizon = free_validity_horizon(ec);
  if (horizon < 0.0) throw ValidityError("free evolution leaves the validity window before the first record");
  if (horizon < 4.0 * window.t_min) {
    throw ValidityError("validity window ends at t = " + format_double(horizon) +
                        ", short of the factor-4 span needed above t_min = " + format_double(window.t_min));
  }

  const auto stats = run_ensemble(ec);
  const auto fit = fit_decay(stats, c.fit_rho, c.fit_q, window);
  const double sup = bootstrap_sup(stats, c.fit_rho, c.fit_q, window.t_min);
  double free_sup = sup;
  if (c.potential.delta != 0.0) {
    auto fc = ec;
    fc.potential.delta = 0.0;
    fc.n_paths = 2;
    fc.rhos = {c.fit_rho};
    fc.qs = {c.fit_q};
    free_sup = bootstrap_sup(run_ensemble(fc), c.fit_rho, c.fit_q, window.t_min);
  }
  const auto prov = provenance(c, "decay");

  ordered_json report;
  report["q"] = c.fit_q;
  report["rho"] = c.fit_rho;
  report.update(fit_json(fit));
  report["slope_error"] = std::abs(fit.slope + fit.target_alpha);
  report["free_validity_horizon"] = horizon;
  report["bootstrap"] = {{"sup", num(sup)},
                         {"free_sup", num(free_sup)},
                         {"ratio", num(sup / free_sup)},
                         {"factor", c.bootstrap_factor},
                         {"pass", sup <= c.bootstrap_factor * free_sup}};

  CommandResult out;
  out.artifacts.push_back(render_table("ensemble", ensemble_table(stats), prov, o.format));
  out.artifacts.push_back(render_report("decay_fit.json", report, prov));
  out.report = std::move(report);
  return out;
}

CommandResult run_scatter(const AppConfig& c, const RunOptions& o) {
  const auto ec = c.ensemble(o.workers);
  auto pairs = c.pairs;
  double horizon = std::nan("");
  if (pairs.empty()) {
    horizon = free_validity_horizon(ec);
    if (horizon < 0.0) throw ValidityError("free evolution leaves the validity window before the first record");
    const double span = std::ldexp(1.0, c.dyadic_count);
    const double t0 = std::floor(horizon / span / c.dt + 1e-9) * c.dt;
    if (!(t0 >= c.dt)) {
      throw ValidityError("validity window ends at t = " + format_double(horizon) + ", too short for " +
                          std::to_string(c.dyadic_count) + " dyadic pairs");
    }
    pairs = dyadic_pairs(t0, c.dyadic_count);
  }

  const auto rows = cauchy_table(ec, pairs);
  const auto verdict = judge(rows, c.fit_rho);
  const auto prov = provenance(c, "scatter");

  ordered_json report;
  report["rho"] = c.fit_rho;
  report["free_validity_horizon"] = num(horizon);
  report["pairs"] = ordered_json::array();
  for (const auto& [s, t] : pairs) report["pairs"].push_back({s, t});
  report["nonincreasing"] = verdict.nonincreasing;
  report["final_over_first"] = num(verdict.final_over_first);
  report["pass"] = verdict.nonincreasing && verdict.final_over_first < 0.2;

  CommandResult out;
  out.artifacts.push_back(render_table("scatter", cauchy_csv(rows), prov, o.format));

  if (c.control) {
    double amplitude = c.potential.constant;
    if (c.potential.shape != PotentialShape::constant) {
      amplitude = 0.0;
      for (const auto& b : c.potential.bumps) amplitude = std::max(amplitude, std::abs(b.amplitude));
    }
    auto cc = ec;
    cc.potential = PotentialSpec::constant_value(c.grid.dim(), amplitude, c.potential.delta);
    const auto control = cauchy_table(cc, pairs);
    const auto cv = judge(control, c.fit_rho);
    const bool decreases = cv.nonincreasing && cv.final_over_first < 0.2;
    report["control"] = {{"amplitude", amplitude},
                         {"nonincreasing", cv.nonincreasing},
                         {"final_over_first", num(cv.final_over_first)},
                         {"shows_decrease", decreases}};
    out.artifacts.push_back(render_table("scatter_control", cauchy_csv(control), prov, o.format));
  }

  out.artifacts.push_back(render_report("scatter_report.json", report, prov));
  out.report = std::move(report);
  return out;
}

CommandResult run_duhamel(const AppConfig& c, const RunOptions& o) {
  const auto& d = c.duhamel;
  const auto path = sample_path(c.master_seed, d.path_index, c.dt, d.t);
  const auto f = sample_gaussian(c.grid, c.initial);
  const auto prov = provenance(c, "duhamel");

  Table terms;
  terms.columns = {"delta",      "order",        "free_norm", "stochastic_norm", "drift_norm",
                   "double_norm", "remainder_norm", "psi_norm"};
  std::vector<double> first, rem1, rem2;
  for (double delta : d.deltas) {
    auto spec = c.potential;
    spec.delta = delta;
    for (int order = 1; order <= 2; ++order) {
      const auto t = duhamel_terms(f, spec, path, d.t, order);
      const double dbl = t.double_stochastic ? lp_norm(*t.double_stochastic, 2.0) : std::nan("");
      const double r = lp_norm(t.remainder, 2.0);
      terms.rows.push_back({delta, static_cast<long long>(order), lp_norm(t.free, 2.0), lp_norm(t.stochastic, 2.0),
                            lp_norm(t.drift, 2.0), dbl, r, lp_norm(t.psi, 2.0)});
      if (order == 1) {
        first.push_back(lp_norm(t.stochastic, 2.0));
        rem1.push_back(r);
      } else {
        rem2.push_back(r);
      }
    }
  }

  ordered_json report;
  report["t"] = d.t;
  report["path_index"] = d.path_index;
  report["deltas"] = d.deltas;
  const double e1 = log_slope(d.deltas, first);
  const double er = log_slope(d.deltas, rem1);
  report["first_order_exponent"] = num(e1);
  report["remainder_exponent"] = num(er);
  report["second_order_remainder_exponent"] = num(log_slope(d.deltas, rem2));
  report["scaling_pass"] = std::abs(e1 - 1.0) <= 0.1 && std::abs(er - 2.0) <= 0.3;

  if (d.isometry_paths > 0) {
    const auto iso = ito_isometry_check(f, c.potential, d.t, d.isometry_dt, d.isometry_paths, c.master_seed,
                                        d.simpson_intervals);
    const double rel = std::abs(iso.relative_error);
    report["isometry"] = {{"lhs", iso.lhs},
                          {"lhs_stderr", iso.lhs_stderr},
                          {"rhs", iso.rhs},
                          {"relative_error", iso.relative_error},
                          {"relative_stderr", iso.relative_stderr},
                          {"n_paths", iso.n_paths},
                          {"pass", rel < 3.0 * iso.relative_stderr && rel < 0.05}};
  }

  const auto& p = c.probes;
  std::vector<ProbeResult> probes;
  for (const auto& tuple : p.chain) probes.push_back(chain_bound_probe(tuple.u, f, c.potential, p.q, tuple.form));
  if (p.modulated_paths > 0) {
    double t_max = 0.0;
    for (const auto& pr : p.modulated_pairs) t_max = std::max(t_max, pr.second);
    std::vector<BrownianPath> paths;
    for (std::size_t i = 0; i < p.modulated_paths; ++i) paths.push_back(sample_path(c.master_seed, i, c.dt, t_max));
    auto mod = modulated_probe(f, c.potential, paths, p.modulated_pairs, p.modulated_xis, p.modulated);
    probes.insert(probes.end(), mod.begin(), mod.end());
  }
  Table probe_table;
  probe_table.columns = {"name", "params", "ratio", "baseline", "pass"};
  bool probes_pass = true;
  for (const auto& r : probes) {
    const double baseline = p.baselines.contains(r.name) ? p.baselines.at(r.name).get<double>() : 1.0;
    const bool pass = r.ratio <= p.baseline_factor * baseline;
    probes_pass = probes_pass && pass;
    probe_table.rows.push_back({r.name, format_list(r.params), r.ratio, baseline, pass});
  }
  report["probes"] = probes.size();
  report["probes_pass"] = probes_pass;

  CommandResult out;
  out.artifacts.push_back(render_table("duhamel_terms", terms, prov, o.format));
  if (!probes.empty()) out.artifacts.push_back(render_table("probes", probe_table, prov, o.format));
  out.artifacts.push_back(render_report("duhamel_report.json", report, prov));
  out.report = std::move(report);
  return out;
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
  std::filesystem::create_directories(dir);
  for (const auto& a : artifacts) {
    std::ofstream file(dir / a.name, std::ios::binary | std::ios::trunc);
    file.write(a.bytes.data(), static_cast<std::streamsize>(a.bytes.size()));
    if (!file) throw std::runtime_error("cannot write " + (dir / a.name).string());
  }
}

}  // namespace slschro::app
