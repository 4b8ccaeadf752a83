#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "normlab/error.hpp"

namespace normlab::cli {

using nlohmann::json;

enum class Format { Csv, Json };

/// Tabular result plus metadata, rendered as CSV (comment header) or JSON.
struct Report {
  json meta = json::object();
  json summary = json::object();
  std::vector<std::string> columns;
  std::vector<json> rows;  // each row is an array aligned with columns

  void add_row(json row) { rows.push_back(std::move(row)); }
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return v.dump();
  if (v.is_number_float()) return format_number(v.get<double>());
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
      if (c == '"') quoted += '"';
      quoted += c;
    }
    return quoted + "\"";
  }
  return v.dump();
}

inline void write_csv(std::ostream& os, const Report& r) {
  for (const auto& [key, value] : r.meta.items()) {
    if (value.is_object()) {
      for (const auto& [k2, v2] : value.items()) os << "# " << key << "." << k2 << ": " << csv_cell(v2) << "\n";
    } else {
      os << "# " << key << ": " << csv_cell(value) << "\n";
    }
  }
  for (const auto& [key, value] : r.summary.items()) {
    os << "# summary." << key << ": " << (value.is_structured() ? value.dump() : csv_cell(value)) << "\n";
  }
  for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << "\n";
  }
}

inline void write_json(std::ostream& os, const Report& r) {
  json doc;
  doc["meta"] = r.meta;
  doc["summary"] = r.summary;
  json rows = json::array();
  for (const auto& row : r.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < r.columns.size() && i < row.size(); ++i) obj[r.columns[i]] = row[i];
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << "\n";
}

inline void emit(const Report& r, Format format, const std::string& out_path) {
  auto render = [&](std::ostream& os) {
    if (format == Format::Csv)
      write_csv(os, r);
    else
      write_json(os, r);
  };
  if (out_path.empty() || out_path == "-") {
    render(std::cout);
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::ConfigParseError, "cannot open output file " + out_path);
  render(file);
}

}  // namespace normlab::cli
