#pragma once

#include <charconv>
#include <system_error>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vpfp/core.hpp"

namespace vpfp {

inline constexpr int kCsvVersion = 1;

/// Shortest round-trip text for a double.
inline std::string format_double(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

/**
 * Comma-separated table with a versioned comment line and a '#'-prefixed
 * column header:
 *   # vpfp <schema> v1
 *   #col_a,col_b
 */
class CsvTable {
 public:
  CsvTable(std::string schema, std::vector<std::string> columns)
      : schema_(std::move(schema)), columns_(std::move(columns)) {}

  template <class... Cells>
  void add(const Cells&... cells) {
    static_assert(sizeof...(Cells) > 0);
    std::vector<std::string> row;
    (row.push_back(cell(cells)), ...);
    if (row.size() != columns_.size()) throw Error("csv: row width does not match header");
    rows_.push_back(std::move(row));
  }

  const std::string& schema() const { return schema_; }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& os) const {
    os << "# vpfp " << schema_ << " v" << kCsvVersion << '\n' << '#';
    for (std::size_t c = 0; c < columns_.size(); ++c) os << (c ? "," : "") << columns_[c];
    os << '\n';
    for (const auto& row : rows_) {
      for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
      os << '\n';
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  std::string schema_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

/**
 * Snapshot format: two comment lines (schema, then key=value grid data and
 * time) followed by one row of N_v^d values per spatial node.
 */
inline void write_snapshot(std::ostream& os, const DistributionField& f, double t) {
  const auto& g = f.grid();
  os << "# vpfp snapshot v" << kCsvVersion << '\n';
  os << "# nx=" << g.nx << ",nv=" << g.nv << ",dim=" << g.dim
     << ",x_center=" << format_double(g.x_center) << ",half_width_x=" << format_double(g.half_width_x)
     << ",half_width_v=" << format_double(g.half_width_v) << ",dx=" << format_double(g.dx())
     << ",dv=" << format_double(g.dv()) << ",t=" << format_double(t) << '\n';
  for (std::size_t i = 0; i < f.nx(); ++i) {
    auto row = f.node(i);
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? "," : "") << format_double(row[j]);
    os << '\n';
  }
}

inline double parse_double(const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw Error("cannot parse number '" + text + "'");
  return x;
}

struct LoadedSnapshot {
  DistributionField f;
  double time = 0.0;
};

inline LoadedSnapshot read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# vpfp snapshot v", 0) != 0)
    throw Error("snapshot: missing schema line");
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw Error("snapshot: missing grid line");
  std::map<std::string, std::string> kv;
  std::stringstream ss(line.substr(2));
  for (std::string item; std::getline(ss, item, ',');) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error("snapshot: malformed header entry '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(std::string("snapshot: header lacks ") + key);
    return it->second;
  };
  const PhaseGrid g = PhaseGrid::make(parse_double(need("x_center")), parse_double(need("half_width_x")),
                                      std::stoi(need("nx")), parse_double(need("half_width_v")),
                                      std::stoi(need("nv")), std::stoi(need("dim")));
  LoadedSnapshot out{DistributionField(g), parse_double(need("t"))};
  for (std::size_t i = 0; i < out.f.nx(); ++i) {
    if (!std::getline(is, line)) throw Error("snapshot: truncated data");
    std::stringstream rs(line);
    auto row = out.f.node(i);
    std::size_t j = 0;
    for (std::string cell; std::getline(rs, cell, ','); ++j) {
      if (j >= row.size()) throw Error("snapshot: row " + std::to_string(i) + " too long");
      row[j] = parse_double(cell);
    }
    if (j != row.size()) throw Error("snapshot: row " + std::to_string(i) + " too short");
  }
  return out;
}

}  // namespace vpfp
