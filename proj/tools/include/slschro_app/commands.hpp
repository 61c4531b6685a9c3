#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "slschro_app/config.hpp"
#include "slschro_app/report.hpp"

namespace slschro::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitOther = 1,
  kExitConfig = 2,
  kExitValidity = 3,
  kExitNumerical = 4,
};

struct RunOptions {
  unsigned workers = 1;
  TableFormat format = TableFormat::csv;
};

/// Files to write plus the main report, which callers may inspect directly.
struct CommandResult {
  std::vector<Artifact> artifacts;
  nlohmann::ordered_json report;
};

CommandResult run_free_dispersive(const AppConfig& config, const RunOptions& options);
CommandResult run_simulate(const AppConfig& config, const RunOptions& options);
CommandResult run_decay(const AppConfig& config, const RunOptions& options);
CommandResult run_scatter(const AppConfig& config, const RunOptions& options);
CommandResult run_duhamel(const AppConfig& config, const RunOptions& options);

/// Quick property checks on small grids; one PASS/FAIL line each. Returns the failure count.
int run_selftest(std::ostream& out, unsigned workers);

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts);

/// Entire command line: parse flags, run, write outputs, map errors to exit codes.
int run_cli(int argc, char** argv);

}  // namespace slschro::app
