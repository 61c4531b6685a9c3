#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace slschro::app {

enum class TableFormat { csv, json };

/// One output file held in memory until the whole command has succeeded.
struct Artifact {
  std::string name;
  std::string bytes;
};

/// Provenance stamped on every table and report.
struct Provenance {
  std::string command;
  std::string digest;
  std::uint64_t master_seed = 0;
  double smallness = 0.0;
};

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

/// Semicolon-joined %.17g values.
std::string format_list(const std::vector<double>& values);

/// CSV (with '#' provenance lines) or a JSON object carrying the same data.
Artifact render_table(const std::string& stem, const Table& table, const Provenance& prov, TableFormat format);

/// Pretty JSON report; provenance fields are merged in at the top level.
Artifact render_report(const std::string& name, nlohmann::ordered_json report, const Provenance& prov);

}  // namespace slschro::app
