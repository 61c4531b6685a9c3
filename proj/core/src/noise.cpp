#include "slschro/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace slschro {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index, std::uint32_t level) noexcept {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ index);
  h = mix64(h ^ (static_cast<std::uint64_t>(level) * 0xd1b54a32d192ed03ULL));
  return h;
}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double scale = 0x1.0p-53;
  const double u1 = static_cast<double>(engine_() >> 11) * scale;
  const double u2 = static_cast<double>(engine_() >> 11) * scale;
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double BrownianPath::value_at(std::size_t k) const {
  if (k > increments.size()) throw std::out_of_range("mesh index past the horizon");
  double b = 0.0;
  for (std::size_t i = 0; i < k; ++i) b += increments[i];
  return b;
}

std::size_t mesh_steps(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("horizon must be nonnegative");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("horizon is not an integer multiple of dt");
  }
  return static_cast<std::size_t>(steps);
}

namespace {
double quantize(double x, double quantum) { return std::nearbyint(x / quantum) * quantum; }
}  // namespace

BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t index, double dt, double horizon) {
  BrownianPath p;
  p.master_seed = master_seed;
  p.index = index;
  p.dt = dt;
  p.horizon = horizon;
  const std::size_t n = mesh_steps(dt, horizon);
  // 2^e0 >= 8 sqrt(dt): increments beyond that are 8-sigma events and still fit the mantissa.
  const int e0 = static_cast<int>(std::ceil(std::log2(8.0 * std::sqrt(dt))));
  p.quantum = std::ldexp(1.0, e0 - 44);
  p.increments.resize(n);
  NormalStream normals(stream_seed(master_seed, index, 0));
  const double sd = std::sqrt(dt);
  for (auto& inc : p.increments) inc = quantize(sd * normals.next(), p.quantum);
  return p;
}

BrownianPath refine(const BrownianPath& path) {
  if (path.level >= kMaxRefinementLevel) throw std::invalid_argument("refinement level limit reached");
  BrownianPath fine;
  fine.master_seed = path.master_seed;
  fine.index = path.index;
  fine.level = path.level + 1;
  fine.dt = path.dt / 2.0;
  fine.horizon = path.horizon;
  fine.quantum = path.quantum / 2.0;
  fine.increments.resize(2 * path.increments.size());
  NormalStream normals(stream_seed(path.master_seed, path.index, fine.level));
  const double half_sd = std::sqrt(path.dt) / 2.0;
  for (std::size_t k = 0; k < path.increments.size(); ++k) {
    const double db = path.increments[k];
    const double first = quantize(db / 2.0 + half_sd * normals.next(), fine.quantum);
    fine.increments[2 * k] = first;
    fine.increments[2 * k + 1] = db - first;
  }
  return fine;
}

}  // namespace slschro
