#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "slschro/errors.hpp"
#include "slschro/initial.hpp"
#include "slschro/integrator.hpp"

using namespace slschro;

namespace {

double max_abs_diff(const ComplexField& a, const ComplexField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct Case {
  Grid grid = make_grid(2, 32, 16.0);
  ComplexField f = sample_gaussian(grid, GaussianPacket{0.5, {0.7, -0.3, 0.0}});
  PotentialSpec v = PotentialSpec::gaussian(2, 1.0, 1.5, 0.1, {0.5, 0.0, 0.0});
};

}  // namespace

TEST(NoisePhase, ZeroCouplingIsIdentity) {
  Case s;
  const auto vals = sample_values(s.v, s.grid);
  const auto out = noise_phase_step(s.f, vals, 0.0, 0.3);
  for (std::size_t i = 0; i < s.f.size(); ++i) EXPECT_EQ(out[i], s.f[i]);
}

TEST(NoisePhase, PreservesModulus) {
  Case s;
  const auto vals = sample_values(s.v, s.grid);
  const auto out = noise_phase_step(s.f, vals, 0.4, 1.7);
  for (std::size_t i = 0; i < s.f.size(); ++i) EXPECT_NEAR(std::abs(out[i]), std::abs(s.f[i]), 1e-15);
  EXPECT_NEAR(lp_norm(out, 2.0) / lp_norm(s.f, 2.0), 1.0, 1e-15);
}

TEST(NoisePhase, ConstantPotentialIsGlobalPhase) {
  Case s;
  const std::vector<double> c(s.grid.size(), 0.8);
  const auto out = noise_phase_step(s.f, c, 0.2, 0.5);
  const auto expected = std::polar(1.0, -0.2 * 0.8 * 0.5) * s.f;
  EXPECT_LT(max_abs_diff(out, expected), 1e-15);
}

TEST(StrangStep, ZeroCouplingEqualsFreeFlow) {
  Case s;
  const auto vals = sample_values(s.v, s.grid);
  const auto a = strang_step(s.f, 0.05, 0.2, vals, 0.0);
  const auto b = free_propagate(s.f, 0.05);
  EXPECT_LT(lp_norm(a - b, 2.0), 1e-13 * lp_norm(s.f, 2.0));
}

TEST(StrangStep, MassPreserved) {
  Case s;
  const auto vals = sample_values(s.v, s.grid);
  const auto a = strang_step(s.f, 0.05, 0.2, vals, 0.3);
  EXPECT_NEAR(lp_norm(a, 2.0) / lp_norm(s.f, 2.0), 1.0, 1e-14);
}

TEST(StrangStep, FirstOrderTaylorResidualShrinks) {
  Case s;
  const auto vals = sample_values(s.v, s.grid);
  const SpectralEngine engine(s.grid);
  // Laplacian of f spectrally
  ComplexField lap = s.f;
  engine.forward(lap.values());
  const auto k2 = engine.wavenumber_squared();
  for (std::size_t m = 0; m < k2.size(); ++m) lap[m] *= -k2[m];
  engine.inverse(lap.values());

  auto residual = [&](double dt) {
    const double db = dt;  // dB scaled with dt so the remainder is O(dt^2)
    const auto step = strang_step(s.f, dt, db, vals, s.v.delta);
    ComplexField lin = s.f;
    for (std::size_t i = 0; i < lin.size(); ++i) {
      lin[i] += cplx{0.0, dt} * lap[i] - cplx{0.0, s.v.delta * db} * vals[i] * s.f[i];
    }
    return lp_norm(step - lin, 2.0);
  };
  const double r1 = residual(1e-3);
  const double r2 = residual(5e-4);
  EXPECT_GT(r1 / r2, 3.5);
  EXPECT_LT(r1 / r2, 4.5);
}

TEST(Evolve, RecordAtZeroIsInitialDatum) {
  Case s;
  const auto path = sample_path(1, 0, 0.01, 0.1);
  const double times[1] = {0.0};
  const auto traj = evolve(s.f, s.v, path, times);
  ASSERT_EQ(traj.records.size(), 1u);
  for (std::size_t i = 0; i < s.f.size(); ++i) EXPECT_EQ(traj.records[0][i], s.f[i]);
}

TEST(Evolve, ZeroCouplingMatchesAnalyticGaussian) {
  const Grid g = make_grid(1, 512, 64.0);
  const GaussianPacket packet{1.0, {}};
  const auto f = sample_gaussian(g, packet);
  auto spec = PotentialSpec::gaussian(1, 1.0, 1.0, 0.0);
  const auto path = sample_path(5, 0, 0.01, 1.0);
  const std::vector<double> times{0.25, 0.5, 1.0};
  const auto traj = evolve(f, spec, path, times);
  for (std::size_t r = 0; r < times.size(); ++r) {
    const auto exact = free_gaussian(g, packet, times[r]);
    ASSERT_LT(boundary_mass_fraction(exact, 0.5), 1e-6);
    EXPECT_LT(max_abs_diff(traj.records[r], exact), 1e-8);
  }
}

TEST(Evolve, MassDriftOverThousandSteps) {
  Case s;
  const auto path = sample_path(8, 3, 0.01, 10.0);
  std::vector<double> times;
  for (int k = 1; k <= 10; ++k) times.push_back(k * 1.0);
  const auto traj = evolve(s.f, s.v, path, times);
  const double m0 = lp_norm(s.f, 2.0);
  for (const auto& rec : traj.records) EXPECT_LT(std::abs(lp_norm(rec, 2.0) - m0) / m0, 1e-12);
}

TEST(Evolve, EveryStepUnitary) {
  Case s;
  const auto path = sample_path(8, 4, 0.01, 0.5);
  const SplitStepSolver solver(s.grid, s.v, 0.01);
  std::vector<std::size_t> all(51);
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  double prev = lp_norm(s.f, 2.0);
  solver.run(s.f, path.increments, all, [&](std::size_t, const ComplexField& state) {
    const double m = lp_norm(state, 2.0);
    EXPECT_LT(std::abs(m - prev) / prev, 1e-13);
    prev = m;
  });
}

TEST(Evolve, RecordChoiceDoesNotChangeBits) {
  Case s;
  const auto path = sample_path(8, 5, 0.01, 1.0);
  const std::vector<double> many{0.1, 0.2, 0.5, 1.0};
  const std::vector<double> one{1.0};
  const auto a = evolve(s.f, s.v, path, many);
  const auto b = evolve(s.f, s.v, path, one);
  for (std::size_t i = 0; i < s.f.size(); ++i) EXPECT_EQ(a.records.back()[i], b.records.back()[i]);
}

TEST(Evolve, GaugeCovariance) {
  Case s;
  const auto path = sample_path(8, 6, 0.01, 0.5);
  const cplx phase = std::polar(1.0, 0.7);
  const std::vector<double> times{0.2, 0.5};
  const auto a = evolve(s.f, s.v, path, times);
  const auto b = evolve(phase * s.f, s.v, path, times);
  for (std::size_t r = 0; r < times.size(); ++r) EXPECT_LT(max_abs_diff(b.records[r], phase * a.records[r]), 1e-13);
}

TEST(Evolve, ConstantPotentialClosedForm) {
  const Grid g = make_grid(3, 16, 12.0);
  const auto f = sample_gaussian(g, GaussianPacket{0.5, {}});
  const auto spec = PotentialSpec::constant_value(3, 0.9, 0.3);
  const auto path = sample_path(12, 1, 0.01, 1.0);
  const std::vector<double> times{0.3, 1.0};
  const auto traj = evolve(f, spec, path, times);
  for (std::size_t r = 0; r < times.size(); ++r) {
    const std::size_t k = static_cast<std::size_t>(std::lround(times[r] / 0.01));
    const auto expected = std::polar(1.0, -0.3 * 0.9 * path.value_at(k)) * free_propagate(f, times[r]);
    EXPECT_LT(max_abs_diff(traj.records[r], expected), 1e-10);
  }
}

TEST(Evolve, CouplingContinuityIsFirstOrder) {
  Case s;
  const auto path = sample_path(21, 0, 0.01, 1.0);
  const std::vector<double> times{1.0};
  auto at = [&](double delta) {
    auto spec = s.v;
    spec.delta = delta;
    return evolve(s.f, spec, path, times).records.back();
  };
  const auto base = at(0.0);
  const double e1 = lp_norm(at(0.1) - base, 2.0);
  const double e2 = lp_norm(at(0.05) - base, 2.0);
  const double e3 = lp_norm(at(0.025) - base, 2.0);
  EXPECT_NEAR(std::log2(e1 / e2), 1.0, 0.1);
  EXPECT_NEAR(std::log2(e2 / e3), 1.0, 0.1);
}

TEST(Evolve, RejectsOffMeshRecordTimes) {
  Case s;
  const auto path = sample_path(1, 0, 0.01, 1.0);
  const std::vector<double> bad{0.005};
  EXPECT_THROW(evolve(s.f, s.v, path, bad), std::invalid_argument);
  const std::vector<double> late{2.0};
  EXPECT_THROW(evolve(s.f, s.v, path, late), std::invalid_argument);
}

TEST(Evolve, NonFiniteIsHardFailure) {
  Case s;
  auto vals = sample_values(s.v, s.grid);
  vals[17] = std::numeric_limits<double>::quiet_NaN();
  const SplitStepSolver solver(s.grid, vals, 0.1, 0.01);
  const auto path = sample_path(1, 0, 0.01, 0.1);
  try {
    solver.final_state(s.f, path.increments);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("step 0"), std::string::npos);
  }
}

TEST(StrongError, ExactCases) {
  Case s;
  const auto path = sample_path(3, 1, 0.02, 1.0);
  auto free_spec = s.v;
  free_spec.delta = 0.0;
  EXPECT_LT(strong_error(s.f, free_spec, path), 1e-12);
  EXPECT_LT(strong_error(s.f, PotentialSpec::constant_value(2, 0.7, 0.3), path), 1e-12);
}

TEST(StrongError, GaussianPotentialConvergesAtOrderOne) {
  const Grid g = make_grid(1, 128, 32.0);
  const auto f = sample_gaussian(g, GaussianPacket{0.5, {1.0, 0, 0}});
  const auto spec = PotentialSpec::gaussian(1, 1.0, 1.5, 0.5);
  const int paths = 32;
  std::vector<double> x, y;
  for (double dt : {0.08, 0.04, 0.02, 0.01, 0.005}) {
    double sum = 0.0;
    for (int p = 0; p < paths; ++p) {
      auto path = sample_path(17, p, 0.08, 1.04);
      while (path.dt > dt * 1.5) path = refine(path);
      const double e = strong_error(f, spec, path);
      sum += e * e;
    }
    x.push_back(std::log(dt));
    y.push_back(0.5 * std::log(sum / paths));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  EXPECT_GE(sxy / sxx, 0.9);
}
