#pragma once

// Tabular command output in CSV or JSON. Every table starts with its schema id;
// numbers carry 17 significant digits.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bose2d/csv.hpp"
#include "bose2d/errors.hpp"

namespace bose2d::cli {

enum exit_code : int {
  exit_ok = 0,
  exit_check_failed = 2,
  exit_usage = 64,
  exit_data = 65,
  exit_numeric = 70,
};

/// Environment variable naming the default output directory.
inline constexpr const char *output_dir_env = "BOSE2D_OUTPUT_DIR";

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Record {
  std::string schema_id;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
      throw domain_error("Record: row width differs from the header");
    rows.push_back(std::move(row));
  }
};

enum class Format { csv, json };

inline Format parse_format(const std::string &s) {
  if (s == "csv")
    return Format::csv;
  if (s == "json")
    return Format::json;
  throw parse_error("unknown format '" + s + "' (expected csv or json)");
}

inline std::string format_cell(const Cell &c) {
  if (std::holds_alternative<std::monostate>(c))
    return "null";
  if (const auto *d = std::get_if<double>(&c))
    return csv::format(*d);
  if (const auto *i = std::get_if<long long>(&c))
    return std::to_string(*i);
  return csv::quote(std::get<std::string>(c));
}

inline void write_csv(std::ostream &out, const Record &r) {
  out << "# schema_id: " << r.schema_id << "\n";
  for (const auto &n : r.notes)
    out << "# note: " << n << "\n";
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    out << (i ? "," : "") << r.columns[i];
  out << "\n";
  for (const auto &row : r.rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_cell(row[i]);
    out << "\n";
  }
}

inline void write_json(std::ostream &out, const Record &r) {
  nlohmann::ordered_json j;
  j["schema_id"] = r.schema_id;
  j["columns"] = r.columns;
  j["notes"] = r.notes;
  auto rows = nlohmann::ordered_json::array();
  for (const auto &row : r.rows) {
    auto jr = nlohmann::ordered_json::array();
    for (const auto &c : row) {
      if (std::holds_alternative<std::monostate>(c))
        jr.push_back(nullptr);
      else if (const auto *d = std::get_if<double>(&c))
        jr.push_back(*d);
      else if (const auto *i = std::get_if<long long>(&c))
        jr.push_back(*i);
      else
        jr.push_back(std::get<std::string>(c));
    }
    rows.push_back(std::move(jr));
  }
  j["rows"] = std::move(rows);
  out << j.dump(2) << "\n";
}

inline void write_record(std::ostream &out, const Record &r, Format f) {
  if (f == Format::csv)
    write_csv(out, r);
  else
    write_json(out, r);
}

/// Resolves a relative path against the output directory from the environment, if set.
inline std::filesystem::path in_output_dir(const std::filesystem::path &p) {
  if (p.is_absolute())
    return p;
  if (const char *dir = std::getenv(output_dir_env); dir && *dir)
    return std::filesystem::path(dir) / p;
  return p;
}

/// Writes to `path` when given, else to <output dir>/<stem>.<ext> when the
/// environment names one, else to `fallback`.
inline void emit(const Record &r, Format f, const std::string &path, const std::string &stem,
                 std::ostream &fallback) {
  std::filesystem::path target;
  if (!path.empty())
    target = path;
  else if (const char *dir = std::getenv(output_dir_env); dir && *dir)
    target = std::filesystem::path(dir) / (stem + (f == Format::csv ? ".csv" : ".json"));
  if (target.empty()) {
    write_record(fallback, r, f);
    return;
  }
  if (target.has_parent_path())
    std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target);
  if (!out)
    throw parse_error("cannot write " + target.string());
  write_record(out, r, f);
}

} // namespace bose2d::cli
