#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "slschro/duhamel.hpp"
#include "slschro/ensemble.hpp"
#include "slschro/grid.hpp"
#include "slschro/initial.hpp"
#include "slschro/potential.hpp"

namespace slschro::app {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ChainTuple {
  ChainForm form = ChainForm::exchange;
  std::vector<double> u;
};

struct ProbeSettings {
  double q = 8.0;
  std::vector<ChainTuple> chain;
  std::size_t modulated_paths = 0;
  std::vector<std::pair<double, double>> modulated_pairs;
  std::vector<std::array<double, 3>> modulated_xis;
  ModulatedProbeSettings modulated;
  nlohmann::json baselines = nlohmann::json::object();  // probe name -> baseline ratio
  double baseline_factor = 1.5;
};

struct DuhamelSettings {
  double t = 1.0;
  std::vector<double> deltas{0.2, 0.1, 0.05};
  std::uint64_t path_index = 0;
  std::size_t isometry_paths = 0;
  double isometry_dt = 0.02;
  int simpson_intervals = 200;
};

struct AppConfig {
  nlohmann::json canonical;  // effective document, seed override applied
  std::string digest;        // FNV-1a 64 of canonical, 16 hex digits

  Grid grid = make_grid(3, 48, 48.0);
  PotentialSpec potential;
  GaussianPacket initial;

  std::uint64_t master_seed = 0;
  double dt = 0.01;
  double horizon = 8.0;

  std::size_t n_paths = 1000;
  std::vector<double> qs{2.0, 4.0, 8.0};
  std::vector<double> rhos{2.0, 4.0};
  double validity_threshold = 1e-6;
  double core_fraction = 0.5;
  double bootstrap_factor = 2.0;

  std::vector<double> record_times;
  double fit_q = 8.0;
  double fit_rho = 2.0;
  std::optional<double> fit_t_min;
  std::optional<double> fit_t_max;

  std::vector<std::pair<double, double>> pairs;  // empty: chosen from the validity window
  int dyadic_count = 4;
  bool control = false;

  std::uint64_t path_index = 0;
  DuhamelSettings duhamel;
  ProbeSettings probes;

  EnsembleConfig ensemble(unsigned workers) const;
  double smallness() const;
};

/// Validate a parsed document. Unknown keys anywhere are rejected.
AppConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Read and parse a file; malformed JSON is a ConfigError.
AppConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override = std::nullopt);

std::string config_digest(const nlohmann::json& canonical);

}  // namespace slschro::app
