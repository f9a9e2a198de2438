#pragma once

/// @file
/// JSON symbol files:
///   { "q": 2, "d": 0.25,
///     "g": [[{"num": [1], "den": [1, -0.4]}, {"num": [0]}], ...],
///     "g_sharp": optional, same shape }
/// Coefficients are numbers or [re, im] pairs, in increasing powers of z.
/// A missing "den" means 1.

#include "tlm/rational_symbol.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace tlm {

using json = nlohmann::json;

namespace detail {

inline cd parse_coefficient(const json& v, const std::string& where) {
  if (v.is_number()) return cd{v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return cd{v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(where + ": coefficient must be a number or an [re, im] pair");
}

inline Poly parse_poly(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a non-empty coefficient array");
  Poly p;
  for (std::size_t i = 0; i < v.size(); ++i) p.push_back(parse_coefficient(v[i], where + "[" + std::to_string(i) + "]"));
  return p;
}

inline RationalMatrixFn parse_matrix_fn(const json& v, int q, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != q) throw ConfigError(where + ": expected " + std::to_string(q) + " rows");
  std::vector<RationalEntry> entries;
  for (int i = 0; i < q; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<int>(row.size()) != q)
      throw ConfigError(where + ": row " + std::to_string(i) + " must have " + std::to_string(q) + " entries");
    for (int j = 0; j < q; ++j) {
      const json& e = row[static_cast<std::size_t>(j)];
      const std::string at = where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!e.is_object() || !e.contains("num")) throw ConfigError(at + ": entry needs a \"num\" array");
      entries.push_back({parse_poly(e["num"], at + ".num"), e.contains("den") ? parse_poly(e["den"], at + ".den") : Poly{1.0}});
    }
  }
  return RationalMatrixFn(q, std::move(entries));
}

inline json coefficient_json(cd c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

inline json matrix_fn_json(const RationalMatrixFn& f) {
  json rows = json::array();
  for (int i = 0; i < f.q(); ++i) {
    json row = json::array();
    for (int j = 0; j < f.q(); ++j) {
      json num = json::array(), den = json::array();
      for (cd c : f.entry(i, j).num) num.push_back(coefficient_json(c));
      for (cd c : f.entry(i, j).den) den.push_back(coefficient_json(c));
      row.push_back({{"num", num}, {"den", den}});
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace detail

/// Builds and validates a symbol from its JSON description. Structural
/// problems raise ConfigError; mathematical ones propagate from make().
inline ArfimaSymbol symbol_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("symbol: expected a JSON object");
  if (!j.contains("q") || !j["q"].is_number_integer()) throw ConfigError("symbol: \"q\" must be an integer");
  if (!j.contains("d") || !j["d"].is_number()) throw ConfigError("symbol: \"d\" must be a number");
  const int q = j["q"].get<int>();
  if (q < 1) throw ConfigError("symbol: q must be >= 1");
  if (!j.contains("g")) throw ConfigError("symbol: missing \"g\"");
  RationalMatrixFn g = detail::parse_matrix_fn(j["g"], q, "g");
  std::optional<RationalMatrixFn> gs;
  if (j.contains("g_sharp") && !j["g_sharp"].is_null()) gs = detail::parse_matrix_fn(j["g_sharp"], q, "g_sharp");
  return ArfimaSymbol::make(j["d"].get<double>(), std::move(g), std::move(gs));
}

inline json symbol_to_json(const ArfimaSymbol& s) {
  json j;
  j["q"] = s.q();
  j["d"] = s.d();
  j["g"] = detail::matrix_fn_json(s.g());
  if (!s.g().is_diagonal()) j["g_sharp"] = detail::matrix_fn_json(s.g_sharp());
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

inline ArfimaSymbol load_symbol(const std::string& path) {
  try {
    return symbol_from_json(read_json_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace tlm
