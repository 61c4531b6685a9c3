#include "slschro/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <cstdint>
#include <tuple>

#include "slschro/summation.hpp"

namespace slschro {

namespace detail {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::size_t size = 0;

  PlanPair() = default;
  PlanPair(const PlanPair&) = delete;
  PlanPair& operator=(const PlanPair&) = delete;
  ~PlanPair();
};

namespace {
// The FFTW planner is not thread-safe; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

PlanPair::~PlanPair() {
  std::lock_guard lock(planner_mutex());
  if (forward != nullptr) fftw_destroy_plan(forward);
  if (backward != nullptr) fftw_destroy_plan(backward);
}

namespace {

using ShapeKey = std::tuple<int, std::size_t, std::size_t, std::size_t>;

std::shared_ptr<const PlanPair> plans_for(const Grid& grid) {
  static std::map<ShapeKey, std::shared_ptr<const PlanPair>> cache;
  const ShapeKey key{grid.dim(), grid.points(0), grid.dim() > 1 ? grid.points(1) : 1,
                     grid.dim() > 2 ? grid.points(2) : 1};
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto pair = std::make_shared<PlanPair>();
  std::array<int, 3> n{};
  for (int a = 0; a < grid.dim(); ++a) n[a] = static_cast<int>(grid.points(a));
  CplxBuffer scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  // FFTW_ESTIMATE keeps the plan (and therefore the arithmetic) identical across runs.
  pair->forward = fftw_plan_dft(grid.dim(), n.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  pair->backward = fftw_plan_dft(grid.dim(), n.data(), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  pair->size = grid.size();
  if (pair->forward == nullptr || pair->backward == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
  cache.emplace(key, pair);
  return pair;
}

}  // namespace
}  // namespace detail

namespace {

class K2Cache {
 public:
  std::shared_ptr<const std::vector<double>> get(const Grid& grid) {
    std::lock_guard lock(mutex_);
    for (const auto& [g, v] : entries_) {
      if (g == grid) return v;
    }
    auto v = std::make_shared<const std::vector<double>>(grid.wavenumber_squared());
    if (entries_.size() > 16) entries_.erase(entries_.begin());
    entries_.emplace_back(grid, v);
    return v;
  }

 private:
  std::mutex mutex_;
  std::vector<std::pair<Grid, std::shared_ptr<const std::vector<double>>>> entries_;
};

K2Cache& k2_cache() {
  static K2Cache cache;
  return cache;
}

void check_buffer(std::span<cplx> data, std::size_t expected) {
  if (data.size() != expected) throw std::invalid_argument("buffer size does not match the FFT plan");
  if (reinterpret_cast<std::uintptr_t>(data.data()) % AlignedAllocator<cplx>::alignment != 0) {
    throw std::invalid_argument("FFT buffers must be 64-byte aligned");
  }
}

}  // namespace

SpectralEngine::SpectralEngine(const Grid& grid)
    : grid_(grid), plans_(detail::plans_for(grid)), k2_(k2_cache().get(grid)) {}

std::span<const double> SpectralEngine::wavenumber_squared() const noexcept { return *k2_; }

void SpectralEngine::forward(std::span<cplx> data) const {
  check_buffer(data, plans_->size);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void SpectralEngine::inverse_unscaled(std::span<cplx> data) const {
  check_buffer(data, plans_->size);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
}

void SpectralEngine::inverse(std::span<cplx> data) const {
  inverse_unscaled(data);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

CplxBuffer free_multiplier(const SpectralEngine& engine, double t) {
  const auto k2 = engine.wavenumber_squared();
  const double scale = 1.0 / static_cast<double>(k2.size());
  CplxBuffer out(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double phase = -k2[i] * t;
    out[i] = cplx{std::cos(phase) * scale, std::sin(phase) * scale};
  }
  return out;
}

void free_propagate_inplace(ComplexField& field, double t, const SpectralEngine& engine) {
  if (t == 0.0) return;
  const auto mult = free_multiplier(engine, t);
  auto v = field.values();
  engine.forward(v);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= mult[i];
  engine.inverse_unscaled(v);
}

ComplexField free_propagate(const ComplexField& field, double t) {
  ComplexField out = field;
  if (t == 0.0) return out;
  SpectralEngine engine(field.grid());
  free_propagate_inplace(out, t, engine);
  return out;
}

double lp_norm(const ComplexField& field, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("L^p norm needs p in [1, infinity]");
  const auto v = field.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& z : v) m = std::max(m, std::abs(z));
    return m;
  }
  const double h = field.grid().cell_volume();
  double sum = 0.0;
  if (p == 2.0) {
    sum = pairwise_sum<double>(v.size(), [&](std::size_t i) { return std::norm(v[i]); });
  } else {
    sum = pairwise_sum<double>(v.size(), [&](std::size_t i) { return std::pow(std::abs(v[i]), p); });
  }
  return std::pow(sum * h, 1.0 / p);
}

std::array<double, 3> snap_to_lattice(const Grid& grid, std::span<const double> xi) {
  if (xi.size() != static_cast<std::size_t>(grid.dim())) {
    throw std::invalid_argument("modulation frequency has the wrong dimension");
  }
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int a = 0; a < grid.dim(); ++a) {
    const double unit = 2.0 * std::numbers::pi / grid.length(a);
    const double m = std::round(xi[a] / unit);
    const double half = static_cast<double>(grid.points(a) / 2);
    if (m < -half || m > half - 1.0) throw std::invalid_argument("modulation frequency beyond the Nyquist range");
    out[a] = m * unit;
  }
  return out;
}

ComplexField modulate(const ComplexField& field, std::span<const double> xi) {
  const Grid& grid = field.grid();
  const auto snapped = snap_to_lattice(grid, xi);
  std::array<std::vector<cplx>, 3> phases;
  for (int a = 0; a < grid.dim(); ++a) {
    const double unit = 2.0 * std::numbers::pi / grid.length(a);
    if (std::abs(xi[a] - snapped[a]) > 1e-9 * unit) {
      throw std::invalid_argument("modulation frequency is off the grid lattice; snap it first");
    }
    phases[a].resize(grid.points(a));
    for (std::size_t j = 0; j < grid.points(a); ++j) {
      const double arg = snapped[a] * grid.coordinate(a, j);
      phases[a][j] = cplx{std::cos(arg), std::sin(arg)};
    }
  }
  ComplexField out = field;
  auto v = out.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = grid.unravel(i);
    cplx factor = phases[0][idx[0]];
    for (int a = 1; a < grid.dim(); ++a) factor *= phases[a][idx[a]];
    v[i] *= factor;
  }
  return out;
}

ComplexField translate(const ComplexField& field, std::span<const long> cells) {
  const Grid& grid = field.grid();
  if (cells.size() != static_cast<std::size_t>(grid.dim())) throw std::invalid_argument("shift has the wrong dimension");
  ComplexField out(grid);
  const auto src = field.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto idx = grid.unravel(i);
    std::size_t target = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const auto n = static_cast<long>(grid.points(a));
      const long j = ((static_cast<long>(idx[a]) + cells[a]) % n + n) % n;
      target += static_cast<std::size_t>(j) * grid.stride(a);
    }
    dst[target] = src[i];
  }
  return out;
}

std::vector<double> core_weights(const Grid& grid, int axis, double core_fraction) {
  const double L = grid.length(axis);
  const double h = grid.spacing(axis);
  const double half_core = 0.5 * core_fraction * L;
  std::vector<double> w(grid.points(axis));
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double x = grid.coordinate(axis, j);
    double inside = 0.0;
    for (double shift : {-L, 0.0, L}) {
      const double lo = std::max(x - 0.5 * h + shift, -half_core);
      const double hi = std::min(x + 0.5 * h + shift, half_core);
      inside += std::max(0.0, hi - lo);
    }
    w[j] = std::min(1.0, inside / h);
  }
  return w;
}

double boundary_mass_fraction(const ComplexField& field, double core_fraction) {
  if (!(core_fraction > 0.0 && core_fraction < 1.0)) throw std::invalid_argument("core fraction must lie in (0,1)");
  const Grid& grid = field.grid();
  std::array<std::vector<double>, 3> w;
  for (int a = 0; a < grid.dim(); ++a) w[a] = core_weights(grid, a, core_fraction);
  const auto v = field.values();
  const double total = pairwise_sum<double>(v.size(), [&](std::size_t i) { return std::norm(v[i]); });
  if (total == 0.0) return 0.0;
  const double outside = pairwise_sum<double>(v.size(), [&](std::size_t i) {
    const auto idx = grid.unravel(i);
    double wi = w[0][idx[0]];
    for (int a = 1; a < grid.dim(); ++a) wi *= w[a][idx[a]];
    return (1.0 - wi) * std::norm(v[i]);
  });
  return std::clamp(outside / total, 0.0, 1.0);
}

CplxBuffer fourier_coefficients(const ComplexField& field) {
  SpectralEngine engine(field.grid());
  CplxBuffer c(field.values().begin(), field.values().end());
  engine.forward(c);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (auto& z : c) z *= scale;
  return c;
}

}  // namespace slschro
