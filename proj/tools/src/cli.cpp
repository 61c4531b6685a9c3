#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "slschro/errors.hpp"
#include "slschro_app/commands.hpp"

namespace slschro::app {

namespace {

struct Flags {
  std::string config;
  std::string out;
  unsigned workers = 0;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

void add_flags(CLI::App* sub, Flags& flags, bool config_required) {
  auto* config = sub->add_option("--config", flags.config, "experiment config (JSON)")->check(CLI::ExistingFile);
  if (config_required) config->required();
  sub->add_option("--out", flags.out, "output directory (default: $SLSCHRO_OUT or .)");
  sub->add_option("--workers", flags.workers, "worker threads (default: hardware threads)")
      ->check(CLI::Range(1u, 4096u));
  sub->add_option("--seed", flags.seed, "master seed, overrides noise.master_seed");
  sub->add_option("--format", flags.format, "table format")->check(CLI::IsMember({"csv", "json"}));
}

std::string output_dir(const Flags& flags) {
  if (!flags.out.empty()) return flags.out;
  if (const char* env = std::getenv("SLSCHRO_OUT"); env && *env) return env;
  return ".";
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Split-step solver and experiments for the Schrodinger equation with multiplicative noise"};
  app.require_subcommand(1);
  Flags flags;
  struct Entry {
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {"free-dispersive", "free Gaussian L^q decay against its closed form"},
      {"simulate", "one noise path, SLS1 snapshots at the record times"},
      {"decay", "Monte Carlo L^rho_omega L^q_x decay and power-law fit"},
      {"scatter", "Cauchy table of pulled-back states on dyadic time pairs"},
      {"duhamel", "Duhamel expansion scaling, isometry check and bound probes"},
      {"selftest", "quick property checks"},
  };
  for (const auto& e : entries) add_flags(app.add_subcommand(e.name, e.help), flags, std::string(e.name) != "selftest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  RunOptions options;
  options.workers = flags.workers > 0 ? flags.workers : std::max(1u, std::thread::hardware_concurrency());
  options.format = flags.format == "json" ? TableFormat::json : TableFormat::csv;

  try {
    if (command == "selftest") {
      if (!flags.config.empty()) load_config(flags.config, flags.seed);
      return run_selftest(std::cout, options.workers) == 0 ? kExitOk : kExitOther;
    }
    const auto config = load_config(flags.config, flags.seed);
    CommandResult result;
    if (command == "free-dispersive") {
      result = run_free_dispersive(config, options);
    } else if (command == "simulate") {
      result = run_simulate(config, options);
    } else if (command == "decay") {
      result = run_decay(config, options);
    } else if (command == "scatter") {
      result = run_scatter(config, options);
    } else {
      result = run_duhamel(config, options);
    }
    const std::string dir = output_dir(flags);
    write_artifacts(dir, result.artifacts);
    std::cout << result.report.dump(2) << "\n";
    std::cerr << command << ": wrote " << result.artifacts.size() << " file(s) to " << dir << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidityError& e) {
    std::cerr << "validity window exhausted: " << e.what() << "\n";
    return kExitValidity;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
}

}  // namespace slschro::app
