#include <cmath>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "slschro/duhamel.hpp"
#include "slschro/ensemble.hpp"
#include "slschro/initial.hpp"
#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/snapshot.hpp"
#include "slschro/spectral.hpp"
#include "slschro_app/commands.hpp"
#include "slschro_app/report.hpp"

namespace slschro::app {

namespace {

using Check = std::function<std::optional<std::string>()>;

double max_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::optional<std::string> bound(const char* what, double value, double limit) {
  if (value < limit) return std::nullopt;
  return std::string(what) + " = " + format_double(value) + " >= " + format_double(limit);
}

ComplexField packet(const Grid& g, double a = 0.5) { return sample_gaussian(g, GaussianPacket{a, {}}); }

}  // namespace

int run_selftest(std::ostream& out, unsigned workers) {
  std::vector<std::pair<std::string, Check>> checks;

  checks.emplace_back("free flow unitary and a group", [] {
    const auto g = make_grid(2, 32, 16.0);
    const auto f = packet(g);
    const auto a = free_propagate(free_propagate(f, 0.3), 0.4);
    const auto b = free_propagate(f, 0.7);
    if (auto e = bound("group law error", max_diff(a, b), 1e-12)) return e;
    return bound("norm change", std::abs(lp_norm(b, 2.0) - lp_norm(f, 2.0)) / lp_norm(f, 2.0), 1e-13);
  });

  checks.emplace_back("free grid flow matches the Gaussian oracle", [] {
    const auto g = make_grid(1, 256, 40.0);
    const auto num = free_propagate(packet(g), 0.5);
    return bound("max error", max_diff(num, free_gaussian(g, GaussianPacket{0.5, {}}, 0.5)), 1e-10);
  });

  checks.emplace_back("constant potential matches the phase oracle", [] {
    const auto g = make_grid(1, 64, 32.0);
    const auto spec = PotentialSpec::constant_value(1, 0.7, 0.3);
    const auto path = sample_path(11, 0, 0.01, 1.0);
    const SplitStepSolver solver(g, spec, 0.01);
    const auto f = packet(g);
    const auto num = solver.final_state(f, path.increments);
    const auto exact = std::polar(1.0, -0.3 * 0.7 * path.terminal()) * free_propagate(f, 1.0);
    return bound("max error", max_diff(num, exact), 1e-10);
  });

  checks.emplace_back("mass conserved along a path", [] {
    const auto g = make_grid(3, 24, 16.0);
    const auto spec = PotentialSpec::gaussian(3, 1.0, 2.0, 0.1);
    const auto path = sample_path(3, 0, 0.01, 1.0);
    const SplitStepSolver solver(g, spec, 0.01);
    const auto f = packet(g);
    const auto psi = solver.final_state(f, path.increments);
    return bound("relative drift", std::abs(lp_norm(psi, 2.0) - lp_norm(f, 2.0)) / lp_norm(f, 2.0), 1e-12);
  });

  checks.emplace_back("global phase commutes with the flow", [] {
    const auto g = make_grid(1, 64, 32.0);
    const auto spec = PotentialSpec::gaussian(1, 1.0, 2.0, 0.2);
    const auto path = sample_path(5, 1, 0.02, 0.5);
    const SplitStepSolver solver(g, spec, 0.02);
    const cplx phase = std::polar(1.0, 0.9);
    const auto f = packet(g);
    const auto a = phase * solver.final_state(f, path.increments);
    const auto b = solver.final_state(phase * f, path.increments);
    return bound("max difference", max_diff(a, b), 1e-14);
  });

  checks.emplace_back("bridge refinement sums exactly", []() -> std::optional<std::string> {
    const auto coarse = sample_path(7, 2, 0.04, 1.0);
    const auto fine = refine(coarse);
    for (std::size_t k = 0; k < coarse.steps(); ++k) {
      if (fine.increments[2 * k] + fine.increments[2 * k + 1] != coarse.increments[k]) {
        return "cell " + std::to_string(k) + " does not sum";
      }
    }
    return std::nullopt;
  });

  checks.emplace_back("paths reproducible from their seed", []() -> std::optional<std::string> {
    if (sample_path(9, 4, 0.01, 1.0).increments != sample_path(9, 4, 0.01, 1.0).increments) return "paths differ";
    if (sample_path(9, 4, 0.01, 1.0).increments == sample_path(9, 5, 0.01, 1.0).increments) return "indices collide";
    return std::nullopt;
  });

  checks.emplace_back("ensemble independent of workers, monotone in rho", [workers]() -> std::optional<std::string> {
    EnsembleConfig c;
    c.grid = make_grid(1, 64, 32.0);
    c.potential = PotentialSpec::gaussian(1, 1.0, 2.0, 0.2);
    c.initial.a = 0.5;
    c.dt = 0.05;
    c.horizon = 1.0;
    c.record_times = {0.5, 1.0};
    c.n_paths = 8;
    c.workers = 1;
    const auto a = run_ensemble(c);
    c.workers = std::max(2u, workers);
    const auto b = run_ensemble(c);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
      if (a.rows[i].estimate != b.rows[i].estimate || a.rows[i].stderr_ != b.rows[i].stderr_) {
        return "row " + std::to_string(i) + " depends on the worker count";
      }
    }
    for (std::size_t i = 0; i + 1 < a.rows.size(); ++i) {
      const auto& r = a.rows[i];
      const auto& s = a.rows[i + 1];
      if (r.t == s.t && r.q == s.q && s.rho > r.rho && s.estimate < r.estimate) return "rho-moment decreased";
    }
    return std::nullopt;
  });

  checks.emplace_back("Duhamel terms reconstruct the solution", [] {
    const auto g = make_grid(1, 64, 32.0);
    const auto spec = PotentialSpec::gaussian(1, 1.0, 2.0, 0.1);
    const auto path = sample_path(13, 0, 0.02, 0.4);
    const auto t = duhamel_terms(packet(g), spec, path, 0.4, 2);
    auto sum = t.free + t.stochastic + t.drift + *t.double_stochastic + t.remainder;
    return bound("reconstruction error", max_diff(sum, t.psi), 1e-13);
  });

  checks.emplace_back("snapshot round trip", [] {
    const auto g = make_grid(2, 16, 8.0);
    const auto f = free_propagate(packet(g), 0.2);
    std::stringstream buf;
    write_snapshot(f, buf);
    return bound("difference", max_diff(read_snapshot(buf), f), 1e-300);
  });

  int failures = 0;
  for (const auto& [name, check] : checks) {
    std::optional<std::string> failure;
    try {
      failure = check();
    } catch (const std::exception& e) {
      failure = std::string("threw: ") + e.what();
    }
    if (failure) {
      ++failures;
      out << "FAIL " << name << ": " << *failure << "\n";
    } else {
      out << "PASS " << name << "\n";
    }
  }
  out << (failures == 0 ? "selftest passed" : "selftest failed") << " (" << checks.size() - failures << "/"
      << checks.size() << ")\n";
  return failures;
}

}  // namespace slschro::app
