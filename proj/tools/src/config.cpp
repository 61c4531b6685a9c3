#include "slschro_app/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "slschro/integrator.hpp"
#include "slschro/noise.hpp"
#include "slschro/scattering.hpp"

namespace slschro::app {

using nlohmann::json;

namespace {

// Typed access to one JSON object; finish() rejects keys that were never read.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(where(key) + ": " + what);
  }

  std::string where(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) {
      if (!fallback) fail(key, "required");
      return *fallback;
    }
    const auto& v = obj_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(key, "must be positive");
    return x;
  }

  std::uint64_t unsigned_int(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(key, "must be a non-negative integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = obj_.at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    return number_list(obj_.at(key), where(key));
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    static const json empty = json::object();
    return Section(obj_.contains(key) && !obj_.at(key).is_null() ? obj_.at(key) : empty, where(key));
  }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where(item.key()) + ": unknown key");
    }
  }

  static std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where + ": must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) {
        throw ConfigError(where + ": must be an array of finite numbers");
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::array<double, 3> vector3(Section& s, const std::string& key, int dim) {
  std::array<double, 3> out{};
  if (!s.has(key)) return out;
  const auto v = Section::number_list(s.raw(key), s.where(key));
  if (static_cast<int>(v.size()) != dim) s.fail(key, "needs " + std::to_string(dim) + " entries");
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

std::array<double, 3> widths(Section& s, const std::string& key, int dim) {
  if (!s.has(key)) s.fail(key, "required");
  const auto& v = s.raw(key);
  std::array<double, 3> out{1.0, 1.0, 1.0};
  if (v.is_number()) {
    out.fill(v.get<double>());
  } else {
    const auto list = Section::number_list(v, s.where(key));
    if (static_cast<int>(list.size()) != dim) s.fail(key, "needs a number or " + std::to_string(dim) + " entries");
    std::copy(list.begin(), list.end(), out.begin());
  }
  for (int a = 0; a < dim; ++a) {
    if (!(out[a] > 0.0) || !std::isfinite(out[a])) s.fail(key, "widths must be positive");
  }
  return out;
}

bool on_mesh(double t, double dt) {
  const double k = std::round(t / dt);
  return k >= 0.0 && std::abs(t - k * dt) <= 1e-9 * dt;
}

std::vector<std::pair<double, double>> pair_list(Section& s, const std::string& key) {
  std::vector<std::pair<double, double>> out;
  const auto& v = s.raw(key);
  if (!v.is_array()) s.fail(key, "must be an array of [s, t] pairs");
  for (const auto& e : v) {
    const auto p = Section::number_list(e, s.where(key));
    if (p.size() != 2) s.fail(key, "each entry must be [s, t]");
    out.emplace_back(p[0], p[1]);
  }
  return out;
}

void parse_grid(AppConfig& c, Section s) {
  const auto dim = s.unsigned_int("dim", 3);
  const auto n = s.unsigned_int("n", 48);
  const double length = s.positive("length", 48.0);
  if (dim < 1 || dim > 3) s.fail("dim", "must be 1, 2 or 3");
  if (!is_fft_friendly(n)) s.fail("n", "must be >= 8 and of the form 2^k or 3*2^k");
  try {
    c.grid = make_grid(static_cast<int>(dim), n, length);
  } catch (const std::invalid_argument& e) {
    s.fail("", e.what());
  }
  s.finish();
}

void parse_potential(AppConfig& c, Section s) {
  const int dim = c.grid.dim();
  const std::string shape = s.string("shape", "gaussian");
  const double delta = s.number("delta", 0.0);
  if (delta < 0.0) s.fail("delta", "must be non-negative");
  if (shape == "gaussian") {
    GaussianBump b;
    b.amplitude = s.number("amplitude", 1.0);
    b.sigma = widths(s, "sigma", dim);
    b.center = vector3(s, "center", dim);
    c.potential = PotentialSpec::sum_of_gaussians(dim, {b}, delta);
    c.potential.shape = PotentialShape::gaussian;
  } else if (shape == "constant") {
    c.potential = PotentialSpec::constant_value(dim, s.number("amplitude", 1.0), delta);
  } else if (shape == "sum_of_gaussians") {
    if (!s.has("bumps")) s.fail("bumps", "required for sum_of_gaussians");
    const auto& list = s.raw("bumps");
    if (!list.is_array() || list.empty()) s.fail("bumps", "must be a non-empty array");
    std::vector<GaussianBump> bumps;
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section b(list[i], s.where("bumps") + "[" + std::to_string(i) + "]");
      GaussianBump g;
      g.amplitude = b.number("amplitude", 1.0);
      g.sigma = widths(b, "sigma", dim);
      g.center = vector3(b, "center", dim);
      b.finish();
      bumps.push_back(g);
    }
    c.potential = PotentialSpec::sum_of_gaussians(dim, std::move(bumps), delta);
  } else {
    s.fail("shape", "must be gaussian, constant or sum_of_gaussians");
  }
  try {
    check_resolution(c.potential, c.grid);
  } catch (const std::invalid_argument& e) {
    s.fail("sigma", e.what());
  }
  s.finish();
}

void parse_noise(AppConfig& c, Section s) {
  c.master_seed = s.unsigned_int("master_seed", 0);
  c.dt = s.positive("dt", 0.01);
  c.horizon = s.positive("T", 8.0);
  try {
    mesh_steps(c.dt, c.horizon);
  } catch (const std::invalid_argument&) {
    s.fail("T", "must be an integer multiple of dt");
  }
  s.finish();
}

void parse_ensemble(AppConfig& c, Section s) {
  const auto m = s.unsigned_int("n_paths", 1000);
  if (m < 2) s.fail("n_paths", "must be at least 2");
  c.n_paths = m;
  c.qs = s.numbers("q", c.qs);
  c.rhos = s.numbers("rho", c.rhos);
  if (c.qs.empty()) s.fail("q", "must not be empty");
  if (c.rhos.empty()) s.fail("rho", "must not be empty");
  for (double q : c.qs) {
    if (!(q >= 2.0)) s.fail("q", "entries must be >= 2");
  }
  for (double r : c.rhos) {
    if (!(r >= 1.0)) s.fail("rho", "entries must be >= 1");
  }
  c.validity_threshold = s.positive("validity_threshold", 1e-6);
  c.core_fraction = s.positive("core_fraction", 0.5);
  if (c.core_fraction >= 1.0) s.fail("core_fraction", "must be below 1");
  c.bootstrap_factor = s.positive("bootstrap_factor", 2.0);
  s.finish();
}

ChainForm chain_form(Section& s, const std::string& key) {
  const std::string name = s.string(key, "exchange");
  if (name == "exchange") return ChainForm::exchange;
  if (name == "strong") return ChainForm::strong;
  if (name == "variable_small") return ChainForm::variable_small;
  s.fail(key, "must be exchange, strong or variable_small");
}

void parse_probes(AppConfig& c, Section s) {
  auto& p = c.probes;
  p.q = s.number("q", 8.0);
  if (!(p.q > 2.0)) s.fail("q", "must exceed 2");
  if (s.has("chain")) {
    const auto& list = s.raw("chain");
    if (!list.is_array()) s.fail("chain", "must be an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      Section e(list[i], s.where("chain") + "[" + std::to_string(i) + "]");
      ChainTuple tuple;
      tuple.form = chain_form(e, "form");
      tuple.u = e.numbers("u", {});
      if (tuple.u.size() != 2 && tuple.u.size() != 3) e.fail("u", "needs 2 or 3 entries");
      double sum = 0.0;
      for (double x : tuple.u) sum += x;
      if (tuple.form == ChainForm::exchange && sum == 0.0) e.fail("u", "exchange form needs a nonzero sum");
      if (tuple.form == ChainForm::strong && !(std::abs(sum) > 1.0)) e.fail("u", "strong form needs |sum| > 1");
      if (tuple.form == ChainForm::variable_small) {
        const bool positive = std::all_of(tuple.u.begin(), tuple.u.end(), [](double x) { return x > 0.0; });
        if (!positive || !(tuple.u[0] < 1.0) || !(sum > 2.0)) {
          e.fail("u", "variable_small form needs u > 0, u[0] < 1 and sum > 2");
        }
      }
      e.finish();
      p.chain.push_back(std::move(tuple));
    }
  }
  Section m = s.sub("modulated");
  p.modulated_paths = m.unsigned_int("paths", 0);
  if (m.has("pairs")) p.modulated_pairs = pair_list(m, "pairs");
  if (m.has("xis")) {
    const auto& list = m.raw("xis");
    if (!list.is_array()) m.fail("xis", "must be an array");
    for (const auto& e : list) {
      const auto v = Section::number_list(e, m.where("xis"));
      if (static_cast<int>(v.size()) != c.grid.dim()) m.fail("xis", "entries need one component per axis");
      std::array<double, 3> xi{};
      std::copy(v.begin(), v.end(), xi.begin());
      p.modulated_xis.push_back(xi);
    }
  }
  p.modulated.q = p.q;
  p.modulated.rho = m.number("rho", 2.0);
  p.modulated.c1 = m.number("c1", 1.0);
  p.modulated.c2 = m.number("c2", 1.0);
  m.finish();
  if (p.modulated_paths > 0 && (p.modulated_pairs.empty() || p.modulated_xis.empty())) {
    s.fail("modulated", "needs pairs and xis when paths > 0");
  }
  for (const auto& [st, tt] : p.modulated_pairs) {
    if (!(st >= 0.0 && st <= tt) || !on_mesh(st, c.dt) || !on_mesh(tt, c.dt)) {
      s.fail("modulated.pairs", "need 0 <= s <= t on the dt mesh");
    }
  }
  if (s.has("baselines")) {
    const auto& b = s.raw("baselines");
    if (!b.is_object()) s.fail("baselines", "must map probe names to numbers");
    for (const auto& item : b.items()) {
      if (!item.value().is_number() || !(item.value().get<double>() > 0.0)) {
        s.fail("baselines." + item.key(), "must be a positive number");
      }
    }
    p.baselines = b;
  }
  p.baseline_factor = s.positive("baseline_factor", 1.5);
  s.finish();
}

void parse_duhamel(AppConfig& c, Section s) {
  auto& d = c.duhamel;
  d.t = s.positive("t", 1.0);
  if (!on_mesh(d.t, c.dt)) s.fail("t", "must sit on the dt mesh");
  d.deltas = s.numbers("deltas", d.deltas);
  if (d.deltas.size() < 2) s.fail("deltas", "needs at least two values");
  for (double x : d.deltas) {
    if (!(x > 0.0)) s.fail("deltas", "entries must be positive");
  }
  d.path_index = s.unsigned_int("path_index", 0);
  d.isometry_paths = s.unsigned_int("isometry_paths", 0);
  d.isometry_dt = s.positive("isometry_dt", 0.02);
  if (d.isometry_paths > 0 && !on_mesh(d.t, d.isometry_dt)) s.fail("isometry_dt", "t must be a multiple of it");
  const auto intervals = s.unsigned_int("simpson_intervals", 200);
  if (intervals < 2 || intervals % 2 != 0) s.fail("simpson_intervals", "must be even and >= 2");
  d.simpson_intervals = static_cast<int>(intervals);
  s.finish();
}

void parse_experiment(AppConfig& c, Section s) {
  const int dim = c.grid.dim();
  {
    Section init = s.sub("initial");
    c.initial.a = init.positive("a", 0.25);
    c.initial.center = vector3(init, "center", dim);
    init.finish();
  }

  if (s.has("record_times") && s.has("record_every")) s.fail("record_times", "give record_times or record_every");
  if (s.has("record_times")) {
    c.record_times = s.numbers("record_times", {});
  } else {
    const double every = s.positive("record_every", c.horizon);
    const auto count = static_cast<std::size_t>(std::floor(c.horizon / every + 1e-9));
    for (std::size_t k = 1; k <= count; ++k) c.record_times.push_back(static_cast<double>(k) * every);
  }
  if (c.record_times.empty()) s.fail("record_times", "must not be empty");
  if (!std::is_sorted(c.record_times.begin(), c.record_times.end())) s.fail("record_times", "must be sorted");
  try {
    record_steps(c.record_times, c.dt, mesh_steps(c.dt, c.horizon));
  } catch (const std::invalid_argument& e) {
    s.fail("record_times", e.what());
  }

  {
    Section fit = s.sub("fit");
    c.fit_q = fit.number("q", *std::max_element(c.qs.begin(), c.qs.end()));
    c.fit_rho = fit.number("rho", c.rhos.front());
    if (std::find(c.qs.begin(), c.qs.end(), c.fit_q) == c.qs.end()) fit.fail("q", "must be one of ensemble.q");
    if (std::find(c.rhos.begin(), c.rhos.end(), c.fit_rho) == c.rhos.end()) {
      fit.fail("rho", "must be one of ensemble.rho");
    }
    if (fit.has("t_min")) c.fit_t_min = fit.positive("t_min");
    if (fit.has("t_max")) c.fit_t_max = fit.positive("t_max");
    fit.finish();
  }

  if (s.has("pairs") && s.has("dyadic")) s.fail("pairs", "give pairs or dyadic");
  if (s.has("pairs")) c.pairs = pair_list(s, "pairs");
  {
    Section dy = s.sub("dyadic");
    const auto count = dy.unsigned_int("count", 4);
    if (count < 1 || count > 16) dy.fail("count", "must be between 1 and 16");
    c.dyadic_count = static_cast<int>(count);
    if (dy.has("t0")) c.pairs = dyadic_pairs(dy.positive("t0"), c.dyadic_count);
    dy.finish();
  }
  for (const auto& [ps, pt] : c.pairs) {
    if (!(ps > 0.0 && ps < pt && pt <= c.horizon + 1e-9 * c.dt) || !on_mesh(ps, c.dt) || !on_mesh(pt, c.dt)) {
      s.fail("pairs", "need 0 < s < t <= T on the dt mesh");
    }
  }
  c.control = s.boolean("control", false);
  c.path_index = s.unsigned_int("path_index", 0);
  parse_duhamel(c, s.sub("duhamel"));
  parse_probes(c, s.sub("probes"));
  s.finish();
}

}  // namespace

EnsembleConfig AppConfig::ensemble(unsigned workers) const {
  EnsembleConfig e;
  e.grid = grid;
  e.potential = potential;
  e.initial = initial;
  e.dt = dt;
  e.horizon = horizon;
  e.record_times = record_times;
  e.master_seed = master_seed;
  e.n_paths = n_paths;
  e.qs = qs;
  e.rhos = rhos;
  e.validity_threshold = validity_threshold;
  e.core_fraction = core_fraction;
  e.workers = workers;
  return e;
}

double AppConfig::smallness() const {
  if (potential.shape == PotentialShape::constant) return std::nan("");
  return slschro::smallness(potential, grid);
}

std::string config_digest(const json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical.dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

AppConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  AppConfig c;
  c.canonical = doc;
  if (seed_override) {
    if (!c.canonical.contains("noise") || c.canonical["noise"].is_null()) c.canonical["noise"] = json::object();
    if (c.canonical["noise"].is_object()) c.canonical["noise"]["master_seed"] = *seed_override;
  }
  Section top(c.canonical, "");
  for (const char* required : {"grid", "potential", "noise"}) {
    if (!top.has(required)) top.fail(required, "section required");
  }
  parse_grid(c, top.sub("grid"));
  parse_potential(c, top.sub("potential"));
  parse_noise(c, top.sub("noise"));
  parse_ensemble(c, top.sub("ensemble"));
  parse_experiment(c, top.sub("experiment"));
  top.finish();
  c.digest = config_digest(c.canonical);
  return c;
}

AppConfig load_config(const std::string& path, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream text;
  text << in.rdbuf();
  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": malformed JSON: " + e.what());
  }
  return parse_config(doc, seed_override);
}

}  // namespace slschro::app
