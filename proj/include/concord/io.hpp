#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "concord/errors.hpp"
#include "concord/matrix.hpp"
#include "concord/partition.hpp"

namespace concord {

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline bool parse_int(const std::string& s, std::int64_t& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stoll(s, &pos);
  } catch (const std::logic_error&) {
    return false;
  }
  return pos == s.size();
}

inline bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (const std::logic_error&) {
    return false;
  }
  return pos == s.size();
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

// Basic-partition file: n rows x r integer columns, 0 = missing, 1..K_i are
// labels. An optional non-numeric header row is skipped on read.
inline partition_set read_bp_csv(const std::string& path) {
  std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty()) throw io_error("'" + path + "' is empty");
  std::size_t first = 0;
  {
    std::int64_t v;
    const auto fields = detail::split_csv_line(lines[0]);
    if (!fields.empty() && !detail::parse_int(fields[0], v)) first = 1;
  }
  if (first >= lines.size()) throw io_error("'" + path + "' has no data rows");
  const std::size_t n = lines.size() - first;
  std::vector<std::vector<std::int32_t>> columns;
  for (std::size_t row = 0; row < n; ++row) {
    const auto fields = detail::split_csv_line(lines[first + row]);
    if (row == 0) columns.assign(fields.size(), std::vector<std::int32_t>(n));
    if (fields.size() != columns.size())
      throw io_error("'" + path + "': ragged row " + std::to_string(row + 1));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      std::int64_t v;
      if (!detail::parse_int(fields[c], v) || v < 0)
        throw io_error("'" + path + "': bad label '" + fields[c] + "'");
      columns[c][row] = static_cast<std::int32_t>(v) - 1;  // 0 -> missing
    }
  }
  std::vector<partition> parts;
  parts.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::int32_t k = 1;
    for (const std::int32_t v : columns[c]) k = std::max(k, v + 1);
    try {
      parts.emplace_back(std::move(columns[c]), k);
    } catch (const error& e) {
      throw io_error("'" + path + "' column " + std::to_string(c + 1) + ": " +
                     e.what());
    }
  }
  return partition_set(std::move(parts));
}

inline void write_bp_csv(const std::string& path, const partition_set& bps) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  for (std::size_t l = 0; l < bps.n(); ++l) {
    for (std::size_t i = 0; i < bps.count(); ++i) {
      if (i) out << ',';
      out << (bps[i].covers(l) ? bps[i].label(l) + 1 : 0);
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

// Partition file: one label per row, 0 = outlier/missing.
inline partition read_partition_csv(const std::string& path) {
  std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty()) throw io_error("'" + path + "' is empty");
  std::size_t first = 0;
  {
    std::int64_t v;
    if (!detail::parse_int(detail::trim(lines[0]), v)) first = 1;
  }
  std::vector<std::int32_t> labels;
  for (std::size_t i = first; i < lines.size(); ++i) {
    std::int64_t v;
    if (!detail::parse_int(detail::trim(lines[i]), v) || v < 0)
      throw io_error("'" + path + "': bad label '" + lines[i] + "'");
    labels.push_back(static_cast<std::int32_t>(v) - 1);
  }
  std::int32_t k = 1;
  for (const std::int32_t v : labels) k = std::max(k, v + 1);
  try {
    return partition(std::move(labels), k);
  } catch (const error& e) {
    throw io_error("'" + path + "': " + std::string(e.what()));
  }
}

inline void write_partition_csv(const std::string& path, const partition& p) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  for (std::size_t l = 0; l < p.size(); ++l)
    out << (p.covers(l) ? p.label(l) + 1 : 0) << '\n';
  if (!out) throw io_error("write failed for '" + path + "'");
}

struct labeled_matrix {
  matrix x;
  std::optional<partition> truth;
};

// Feature matrix CSV; a non-negative label_col designates an integer truth
// column (0-based) excluded from the features. An optional non-numeric
// header row is skipped.
inline labeled_matrix read_matrix_csv(const std::string& path,
                                      int label_col = -1) {
  std::vector<std::string> lines = detail::read_lines(path);
  if (lines.empty()) throw io_error("'" + path + "' is empty");
  std::size_t first = 0;
  {
    double v;
    const auto fields = detail::split_csv_line(lines[0]);
    if (!fields.empty() && !detail::parse_double(fields[0], v)) first = 1;
  }
  if (first >= lines.size()) throw io_error("'" + path + "' has no data rows");
  const std::size_t n = lines.size() - first;
  std::size_t total_cols = detail::split_csv_line(lines[first]).size();
  const bool has_label = label_col >= 0;
  if (has_label && static_cast<std::size_t>(label_col) >= total_cols)
    throw config_error("label column out of range");
  const std::size_t feat_cols = total_cols - (has_label ? 1 : 0);
  if (feat_cols == 0) throw io_error("'" + path + "': no feature columns");
  labeled_matrix out;
  out.x = matrix(n, feat_cols);
  std::vector<std::int32_t> labels(has_label ? n : 0);
  for (std::size_t row = 0; row < n; ++row) {
    const auto fields = detail::split_csv_line(lines[first + row]);
    if (fields.size() != total_cols)
      throw io_error("'" + path + "': ragged row " + std::to_string(row + 1));
    std::size_t j = 0;
    for (std::size_t c = 0; c < total_cols; ++c) {
      if (has_label && c == static_cast<std::size_t>(label_col)) {
        std::int64_t v;
        if (!detail::parse_int(fields[c], v))
          throw io_error("'" + path + "': bad label '" + fields[c] + "'");
        labels[row] = static_cast<std::int32_t>(v);
        continue;
      }
      double v;
      if (!detail::parse_double(fields[c], v))
        throw io_error("'" + path + "': bad value '" + fields[c] + "'");
      if (!std::isfinite(v))
        throw io_error("'" + path + "': non-finite value");
      out.x(row, j++) = v;
    }
  }
  if (has_label) {
    // Truth labels may be arbitrary non-negative integers; 0 stays missing.
    std::int32_t k = 1;
    for (std::int32_t& v : labels) {
      v -= 1;
      k = std::max(k, v + 1);
    }
    out.truth = partition(std::move(labels), k);
  }
  return out;
}

// Flat key=value configuration with '#' comments; later keys win.
inline std::map<std::string, std::string> read_config(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw config_error("'" + path + "' line " + std::to_string(lineno) +
                         ": expected key=value");
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty())
      throw config_error("'" + path + "' line " + std::to_string(lineno) +
                         ": empty key");
    out[key] = value;
  }
  return out;
}

inline void write_matrix_csv(const std::string& path, const matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace concord
