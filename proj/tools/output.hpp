#pragma once

// Tabular results shared by the csv and json writers. Both writers format
// numbers from the same stored doubles, so the two formats always agree.

#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qimaging::cli {

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

struct Report {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<Table> tables;
  std::uint64_t seed = 0;
};

inline constexpr const char* kVersion = "0.1.0";

enum class Format { csv, json };

/// Shortest decimal string that parses back to `v`; "nan", "inf", "-inf" otherwise.
std::string format_number(double v);

/// `v` rounded to 15 significant digits, for matrix dumps.
double round_sig15(double v);

/// One header row per table. Tables are preceded by "# name" only when the
/// report holds more than one.
void write_csv(std::ostream& os, const Report& r);

/// {config, results: {name: [row objects]}, metadata: {version, seed}}.
/// Non-finite numbers become null.
void write_json(std::ostream& os, const Report& r);

/// Headerless grid, `width` values per line.
void write_grid(std::ostream& os, const std::vector<double>& values, std::size_t width);

}  // namespace qimaging::cli
