#pragma once

/// @file
/// CSV and JSON artifacts. Files are written to a temporary name and renamed
/// into place so a reader never sees a partial file.

#include "tlm/rate_fit.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <variant>

namespace tlm {

inline constexpr int kReportSchemaVersion = 1;

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

class CsvTable {
 public:
  using Cell = std::variant<std::string, double, long>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw InvalidInput("CsvTable: row width differs from header");
    rows_.push_back(std::move(row));
  }
  std::size_t rows() const { return rows_.size(); }

  std::string str() const {
    std::string out;
    const auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_quote(cells[i]);
      }
      out += "\r\n";
    };
    line(header_);
    for (const auto& r : rows_) {
      std::vector<std::string> cells;
      for (const auto& c : r) {
        if (const auto* s = std::get_if<std::string>(&c))
          cells.push_back(*s);
        else if (const auto* d = std::get_if<double>(&c))
          cells.push_back(format_double(*d));
        else
          cells.push_back(std::to_string(std::get<long>(c)));
      }
      line(cells);
    }
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// JSON numbers cannot hold nan/inf; those become strings.
inline nlohmann::json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

inline nlohmann::json fit_json(const RateFitReport& f) {
  return {{"slope", json_number(f.slope)},
          {"intercept", json_number(f.intercept)},
          {"r2", json_number(f.r2)},
          {"n_range", {json_number(f.x_min), json_number(f.x_max)}},
          {"points", f.points},
          {"filtered", f.filtered},
          {"degenerate", f.degenerate},
          {"note", f.note}};
}

}  // namespace tlm
