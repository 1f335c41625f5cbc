// Copyright 2026 The modalhist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deterministic text serialization of result documents. Object keys come out
// sorted, floats are printed with 15 significant digits and negative zero is
// printed as zero, so two runs of the same scenario diff clean.

#include <cmath>
#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

#include "modalhist/error.hpp"

namespace modalhist::scenario {

enum class OutputFormat { kJson, kCsv };

namespace detail {

inline std::string format_double(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;  // drops the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

inline std::string quote(const std::string& s) {
  // dump() escapes strings the same way on every platform
  return nlohmann::json(s).dump();
}

inline void write_json(const nlohmann::json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        out += inner + quote(it.key()) + ": ";
        write_json(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // scalar arrays stay on one line
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write_json(j[i], out, indent + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += inner;
        write_json(j[i], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

inline std::string csv_cell(const nlohmann::json& j) {
  if (j.is_number_float()) return format_double(j.get<double>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return j.dump();
}

}  // namespace detail

/// Serializes a result document. CSV emits the probability table only: one
/// header line, then one line per row.
inline std::string emit(const nlohmann::json& result, OutputFormat format) {
  std::string out;
  if (format == OutputFormat::kJson) {
    detail::write_json(result, out, 0);
    out += "\n";
    return out;
  }
  require(result.contains("table"), ErrorKind::kSchema, "result has no table to write as csv");
  const auto& table = result["table"];
  const auto& cols = table["columns"];
  for (std::size_t c = 0; c < cols.size(); ++c) out += (c ? "," : "") + detail::csv_cell(cols[c]);
  out += "\n";
  for (const auto& row : table["rows"]) {
    for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + detail::csv_cell(row[c]);
    out += "\n";
  }
  return out;
}

}  // namespace modalhist::scenario
