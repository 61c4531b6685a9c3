#include "slschro_app/report.hpp"

#include <cmath>
#include <cstdio>

namespace slschro::app {

using nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += format_double(values[i]);
  }
  return out;
}

namespace {

std::string csv_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

ordered_json json_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_double(*d);
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  if (const auto* b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

ordered_json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

Artifact render_table(const std::string& stem, const Table& table, const Provenance& prov, TableFormat format) {
  if (format == TableFormat::json) {
    ordered_json doc;
    doc["command"] = prov.command;
    doc["config_digest"] = prov.digest;
    doc["master_seed"] = prov.master_seed;
    doc["smallness"] = number(prov.smallness);
    doc["columns"] = table.columns;
    doc["rows"] = ordered_json::array();
    for (const auto& row : table.rows) {
      ordered_json r = ordered_json::array();
      for (const auto& c : row) r.push_back(json_cell(c));
      doc["rows"].push_back(std::move(r));
    }
    return {stem + ".json", doc.dump(2) + "\n"};
  }
  std::string out;
  out += "# command=" + prov.command + "\n";
  out += "# config_digest=" + prov.digest + "\n";
  out += "# master_seed=" + std::to_string(prov.master_seed) + "\n";
  out += "# smallness=" + format_double(prov.smallness) + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += table.columns[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return {stem + ".csv", out};
}

Artifact render_report(const std::string& name, ordered_json report, const Provenance& prov) {
  ordered_json doc;
  doc["command"] = prov.command;
  doc["config_digest"] = prov.digest;
  doc["master_seed"] = prov.master_seed;
  doc["smallness"] = number(prov.smallness);
  for (auto& item : report.items()) doc[item.key()] = std::move(item.value());
  return {name, doc.dump(2) + "\n"};
}

}  // namespace slschro::app
