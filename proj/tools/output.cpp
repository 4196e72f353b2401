#include "output.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace qimaging::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: row width does not match header");
  rows.push_back(std::move(row));
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double round_sig15(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) return format_number(v);
        else if constexpr (std::is_same_v<T, std::int64_t>) return std::to_string(v);
        else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
        else return csv_field(v);
      },
      c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return nullptr;
          return v == 0.0 ? 0.0 : v;
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

void write_csv(std::ostream& os, const Report& r) {
  const bool sections = r.tables.size() > 1;
  for (std::size_t t = 0; t < r.tables.size(); ++t) {
    const auto& table = r.tables[t];
    if (sections) {
      if (t > 0) os << '\n';
      os << "# " << table.name << '\n';
    }
    for (std::size_t k = 0; k < table.columns.size(); ++k) os << (k ? "," : "") << table.columns[k];
    os << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << csv_cell(row[k]);
      os << '\n';
    }
  }
}

void write_json(std::ostream& os, const Report& r) {
  nlohmann::ordered_json doc;
  doc["config"] = r.config;
  auto& results = doc["results"] = nlohmann::ordered_json::object();
  for (const auto& table : r.tables) {
    auto& arr = results[table.name] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t k = 0; k < row.size(); ++k) obj[table.columns[k]] = json_cell(row[k]);
      arr.push_back(std::move(obj));
    }
  }
  doc["metadata"] = {{"version", kVersion}, {"seed", r.seed}};
  os << doc.dump(2) << '\n';
}

void write_grid(std::ostream& os, const std::vector<double>& values, std::size_t width) {
  for (std::size_t i = 0; i < values.size(); ++i) os << format_number(values[i]) << ((i + 1) % width ? "," : "\n");
}

}  // namespace qimaging::cli
