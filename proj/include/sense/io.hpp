#pragma once

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sense/errors.hpp"
#include "sense/version.hpp"

namespace sense {

/// Column-oriented result table. Cells are doubles except the optional
/// trailing flag column, which carries per-row error strings.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> flags;           // empty, or one entry per row
  std::map<std::string, std::string> meta;  // resolved config, preset, notes

  std::size_t rows_ok() const {
    if (flags.empty()) return rows.size();
    std::size_t n = 0;
    for (const auto& f : flags) n += f.empty();
    return n;
  }
  std::size_t rows_flagged() const { return rows.size() - rows_ok(); }
};

/// 17-significant-digit scientific notation; fixed width, bit-faithful for
/// round-tripping doubles.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.16e", x);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  if (!t.flags.empty()) out += ",flag";
  out += '\n';
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.rows[r].size(); ++c) {
      if (c) out += ',';
      out += format_number(t.rows[r][c]);
    }
    if (!t.flags.empty()) {
      out += ',';
      out += t.flags[r];
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const Table& t) {
  nlohmann::ordered_json j;
  j["metadata"] = nlohmann::ordered_json::object();
  j["metadata"]["version"] = version;
  for (const auto& [k, v] : t.meta) j["metadata"][k] = v;
  j["metadata"]["rows_total"] = t.rows.size();
  j["metadata"]["rows_ok"] = t.rows_ok();
  j["metadata"]["rows_flagged"] = t.rows_flagged();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) arr.push_back(row[c]);
    j["columns"][t.columns[c]] = std::move(arr);
  }
  if (!t.flags.empty()) j["columns"]["flag"] = t.flags;
  return j.dump(2) + "\n";
}

/// Write to a file, or to stdout when path is empty or "-".
inline void write_artifact(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    if (!std::cout) fail(errc::io_error, "failed writing to stdout");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(errc::io_error, "cannot open output file '" + path + "'");
  f << content;
  if (!f) fail(errc::io_error, "failed writing '" + path + "'");
}

}  // namespace sense
