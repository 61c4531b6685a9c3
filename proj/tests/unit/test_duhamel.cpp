#include <gtest/gtest.h>

#include <cmath>

#include "slschro/duhamel.hpp"
#include "slschro/initial.hpp"
#include "slschro/spectral.hpp"

using namespace slschro;

namespace {

struct Case {
  Grid grid = make_grid(1, 128, 32.0);
  ComplexField f = sample_gaussian(grid, GaussianPacket{0.5, {0.5, 0, 0}});
  PotentialSpec v = PotentialSpec::gaussian(1, 1.0, 1.5, 0.1);
};

double l2(const ComplexField& a) { return lp_norm(a, 2.0); }

}  // namespace

TEST(DuhamelTerms, ZeroCoupling) {
  Case s;
  s.v.delta = 0.0;
  const auto path = sample_path(1, 0, 0.01, 1.0);
  const auto terms = duhamel_terms(s.f, s.v, path, 1.0);
  EXPECT_EQ(l2(terms.stochastic), 0.0);
  EXPECT_EQ(l2(terms.drift), 0.0);
  EXPECT_LT(l2(terms.remainder), 1e-12);
}

TEST(DuhamelTerms, ReconstructsPsi) {
  Case s;
  const auto path = sample_path(2, 0, 0.01, 1.0);
  for (int order : {1, 2}) {
    const auto terms = duhamel_terms(s.f, s.v, path, 1.0, order);
    ComplexField sum = terms.free + terms.stochastic + terms.drift + terms.remainder;
    if (terms.double_stochastic) sum += *terms.double_stochastic;
    EXPECT_LT(l2(sum - terms.psi), 1e-14 * l2(terms.psi));
    EXPECT_EQ(terms.double_stochastic.has_value(), order == 2);
  }
  EXPECT_THROW(duhamel_terms(s.f, s.v, path, 1.0, 3), std::invalid_argument);
  EXPECT_THROW(duhamel_terms(s.f, s.v, path, 1.005), std::invalid_argument);
}

TEST(DuhamelTerms, SecondQuadratureAgreesToFirstOrderInDt) {
  Case s;
  s.v.delta = 0.3;
  std::vector<double> gaps_stoch, gaps_drift;
  auto path = sample_path(3, 0, 0.02, 1.0);
  for (int level = 0; level < 3; ++level) {
    const auto mid = duhamel_terms(s.f, s.v, path, 1.0, 1, Quadrature::midpoint);
    const auto left = duhamel_terms(s.f, s.v, path, 1.0, 1, Quadrature::left_endpoint);
    gaps_stoch.push_back(l2(mid.stochastic - left.stochastic));
    gaps_drift.push_back(l2(mid.drift - left.drift));
    path = refine(path);
  }
  for (std::size_t i = 1; i < gaps_drift.size(); ++i) {
    EXPECT_NEAR(gaps_drift[i - 1] / gaps_drift[i], 2.0, 0.2);
    EXPECT_GT(gaps_stoch[i - 1] / gaps_stoch[i], 1.4);
  }
}

TEST(DuhamelTerms, RemainderIsSecondOrderInDelta) {
  Case s;
  std::vector<double> rem, first;
  const std::vector<double> deltas{0.2, 0.1, 0.05};
  for (double d : deltas) {
    s.v.delta = d;
    double r2 = 0.0, f2 = 0.0;
    for (std::uint64_t p = 0; p < 6; ++p) {
      const auto terms = duhamel_terms(s.f, s.v, sample_path(4, p, 0.01, 1.0), 1.0);
      r2 += std::pow(l2(terms.remainder), 2);
      f2 += std::pow(l2(terms.stochastic), 2);
    }
    rem.push_back(std::sqrt(r2 / 6));
    first.push_back(std::sqrt(f2 / 6));
  }
  const double er = std::log(rem.front() / rem.back()) / std::log(4.0);
  const double ef = std::log(first.front() / first.back()) / std::log(4.0);
  EXPECT_NEAR(er, 2.0, 0.3);
  EXPECT_NEAR(ef, 1.0, 0.1);
}

TEST(DuhamelTerms, SecondOrderTruncationShrinksRemainder) {
  Case s;
  s.v.delta = 0.2;
  const auto path = sample_path(5, 0, 0.01, 1.0);
  EXPECT_LT(l2(duhamel_terms(s.f, s.v, path, 1.0, 2).remainder), l2(duhamel_terms(s.f, s.v, path, 1.0, 1).remainder));
}

TEST(Isometry, ZeroIntegrand) {
  Case s;
  const auto spec = PotentialSpec::gaussian(1, 0.0, 1.5, 0.1);
  const auto r = ito_isometry_check(s.f, spec, 1.0, 0.05, 100, 1);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.relative_error, 0.0);
}

TEST(Isometry, ConstantPotentialRightSide) {
  Case s;
  const auto spec = PotentialSpec::constant_value(1, 0.6, 0.1);
  const auto r = ito_isometry_check(s.f, spec, 1.5, 0.05, 100, 1);
  EXPECT_NEAR(r.rhs, 0.36 * 1.5 * std::pow(l2(s.f), 2), 1e-12);
}

TEST(Isometry, GaussianPotentialWithinMonteCarloError) {
  Case s;
  const auto r = ito_isometry_check(s.f, s.v, 1.0, 0.02, 2000, 99);
  EXPECT_LT(r.relative_error, 3.0 * r.relative_stderr);
  EXPECT_GT(r.rhs, 0.0);
}

TEST(ModulatedProbe, ZeroCouplingNoModulation) {
  const Grid g = make_grid(1, 128, 32.0);
  const auto f = sample_gaussian(g, GaussianPacket{1.0, {}});
  const auto spec = PotentialSpec::gaussian(1, 1.0, 1.0, 0.0);
  const std::vector<BrownianPath> paths{sample_path(1, 0, 0.01, 1.0), sample_path(1, 1, 0.01, 1.0)};
  const auto res = modulated_probe(f, spec, paths, {{0.3, 1.0}, {1.0, 1.0}}, {{0.0, 0.0, 0.0}}, {8.0, 2.0});
  const double free_norm = lp_norm(free_propagate(f, 1.0), 8.0);
  for (const auto& r : res) EXPECT_NEAR(r.value / free_norm, 1.0, 1e-12);
}

TEST(ModulatedProbe, ZeroCouplingBoundedByGaussianPrefactor) {
  const Grid g = make_grid(1, 256, 64.0);
  const GaussianPacket packet{1.0, {}};
  const auto f = sample_gaussian(g, packet);
  const auto spec = PotentialSpec::gaussian(1, 1.0, 1.0, 0.0);
  const std::vector<BrownianPath> paths{sample_path(1, 0, 0.01, 2.0)};
  const double unit = 2.0 * std::acos(-1.0) / 64.0;
  const std::vector<std::array<double, 3>> xis{{0, 0, 0}, {3 * unit, 0, 0}, {-7 * unit, 0, 0}};
  const double q = 8.0;
  const NormSpec n(q, 2.0, 1);
  for (const auto& r : modulated_probe(f, spec, paths, {{0.5, 1.0}, {0.5, 2.0}, {1.0, 2.0}}, xis, {q, 2.0})) {
    const double t = r.params[1];
    const double prefactor =
        free_gaussian_lq_norm(packet, 1, t, q) * std::pow(t, n.alpha()) / lp_norm(f, n.p());
    EXPECT_LE(r.ratio, prefactor * (1 + 1e-6));
    EXPECT_TRUE(std::isfinite(r.ratio));
  }
}

TEST(ChainProbe, ZeroPotential) {
  Case s;
  const auto spec = PotentialSpec::gaussian(1, 0.0, 1.5, 0.0);
  const double u[2] = {1.0, 2.0};
  const auto r = chain_bound_probe(u, s.f, spec, 8.0, ChainForm::exchange);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.ratio, 0.0);
}

TEST(ChainProbe, DegenerateChainIsFreeFlowOfProduct) {
  Case s;
  const double t = 1.7;
  const double u[2] = {0.0, t};
  const auto r = chain_bound_probe(u, s.f, s.v, 4.0, ChainForm::exchange);
  const auto vf = sample(s.v, s.grid);
  ComplexField prod = s.f;
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= vf[i];
  EXPECT_NEAR(r.value, lp_norm(free_propagate(prod, t), 4.0), 1e-12);
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(r.ratio));
}

TEST(ChainProbe, PreconditionsEnforced) {
  Case s;
  const double short_sum[2] = {0.3, 0.5};
  EXPECT_THROW(chain_bound_probe(short_sum, s.f, s.v, 8.0, ChainForm::strong), std::invalid_argument);
  const double late_start[3] = {1.5, 0.5, 1.0};
  EXPECT_THROW(chain_bound_probe(late_start, s.f, s.v, 8.0, ChainForm::variable_small), std::invalid_argument);
  const double good[3] = {0.5, 0.9, 1.0};
  EXPECT_NO_THROW(chain_bound_probe(good, s.f, s.v, 8.0, ChainForm::variable_small));
  const double four[4] = {1, 1, 1, 1};
  EXPECT_THROW(chain_bound_probe(four, s.f, s.v, 8.0, ChainForm::exchange), std::invalid_argument);
}

TEST(ChainProbe, RatiosFiniteOverSampledTuples) {
  Case s;
  for (int i = 1; i <= 30; ++i) {
    const double u[3] = {0.07 * i, 0.05 * (31 - i), 0.5 + 0.03 * i};
    for (auto form : {ChainForm::exchange, ChainForm::strong}) {
      const auto r = chain_bound_probe(u, s.f, s.v, 8.0, form);
      EXPECT_TRUE(std::isfinite(r.ratio));
      EXPECT_GE(r.ratio, 0.0);
    }
  }
}
