#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace slschro {

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Generator seed for one stream: depends only on (master seed, path index, refinement level).
std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index, std::uint32_t level) noexcept;

/// Standard normals by Box-Muller on mt19937_64, both outputs used.
///
/// u = (bits >> 11) * 2^-53 in [0,1); radius sqrt(-2 log(1-u1)), angle 2 pi u2.
/// Pinned: seeded runs are compared byte-for-byte.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : engine_(seed) {}
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// One Brownian path on a uniform mesh, as increments over [k dt, (k+1) dt).
///
/// Increments are rounded to multiples of `quantum` (a power of two, about
/// 2^-44 of the increment scale). Halving the quantum at each refinement keeps
/// the bridge split exact in floating point.
struct BrownianPath {
  std::uint64_t master_seed = 0;
  std::uint64_t index = 0;
  std::uint32_t level = 0;
  double dt = 0.0;
  double horizon = 0.0;
  double quantum = 0.0;
  std::vector<double> increments;

  std::size_t steps() const noexcept { return increments.size(); }
  /// B at mesh point k (k = 0 .. steps()), summed left to right.
  double value_at(std::size_t k) const;
  double terminal() const { return value_at(steps()); }
};

/// Number of steps T/dt; throws unless T/dt is an integer within 1e-9 (relative).
std::size_t mesh_steps(double dt, double horizon);

BrownianPath sample_path(std::uint64_t master_seed, std::uint64_t index, double dt, double horizon);

/// Brownian-bridge midpoint insertion: each increment dB over a cell of length h
/// splits into (dB/2 + sqrt(h)/2 Z, dB/2 - sqrt(h)/2 Z) with the pair summing to dB exactly.
BrownianPath refine(const BrownianPath& path);

inline constexpr std::uint32_t kMaxRefinementLevel = 16;

}  // namespace slschro
