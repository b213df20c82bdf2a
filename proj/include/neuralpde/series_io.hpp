#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "neuralpde/grid.hpp"

namespace neuralpde {

inline constexpr const char* kSeriesMagic = "NEURALPDE/1";

namespace detail {

inline std::vector<std::string> split_string(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::map<std::string, std::string> parse_kv_line(const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("series header: malformed token '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

inline double kv_double(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw DataError("series header: missing key '" + key + "'");
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw DataError("series header: bad value for '" + key + "': " + it->second);
  }
}

inline long long kv_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw DataError("series header: missing key '" + key + "'");
  try {
    return std::stoll(it->second);
  } catch (const std::exception&) {
    throw DataError("series header: bad value for '" + key + "': " + it->second);
  }
}

}  // namespace detail

// Header is two text lines (magic, then key=value metadata); payload is raw
// little-endian float64, row-major over the (V*K) x N matrix.
inline void write_series(const FieldSeries& series, const std::string& path) {
  series.validate();
  const GridSpec& g = series.grid;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << kSeriesMagic << "\n";
  std::string vars;
  for (std::size_t i = 0; i < series.variables.size(); ++i) {
    if (i) vars += ",";
    vars += series.variables[i];
  }
  out << "vars=" << vars << " nx=" << g.nx << " ny=" << g.ny << " n_steps=" << g.n_steps
      << " dt=" << format_double(g.dt) << " dx=" << format_double(g.dx())
      << " dy=" << format_double(g.is_2d() ? g.dy() : 0.0) << " x_min=" << format_double(g.x_min)
      << " x_max=" << format_double(g.x_max) << " y_min=" << format_double(g.y_min)
      << " y_max=" << format_double(g.y_max) << "\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(series.data.cols()) * 8);
  for (Index r = 0; r < series.data.rows(); ++r) {
    for (Index c = 0; c < series.data.cols(); ++c)
      write_f64_le(series.data(r, c), &buf[static_cast<std::size_t>(c) * 8]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw DataError("short write: " + path);
}

inline FieldSeries read_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path);
  std::string magic;
  if (!std::getline(in, magic)) throw DataError("empty series file: " + path);
  if (magic == std::string(kSeriesMagic) + "\r") magic.pop_back();
  if (magic != kSeriesMagic)
    throw DataError("bad magic in " + path + ": expected " + kSeriesMagic + ", got '" + magic +
                    "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError("missing metadata line: " + path);
  auto kv = detail::parse_kv_line(header);

  FieldSeries series;
  auto vit = kv.find("vars");
  if (vit == kv.end()) throw DataError("series header: missing key 'vars'");
  series.variables = detail::split_string(vit->second, ',');
  if (series.variables.empty() || series.variables[0].empty())
    throw DataError("series header: empty variable list");

  GridSpec& g = series.grid;
  g.nx = static_cast<Index>(detail::kv_int(kv, "nx"));
  g.ny = static_cast<Index>(detail::kv_int(kv, "ny"));
  g.n_steps = static_cast<Index>(detail::kv_int(kv, "n_steps"));
  g.dt = detail::kv_double(kv, "dt");
  g.x_min = detail::kv_double(kv, "x_min");
  g.x_max = detail::kv_double(kv, "x_max");
  g.y_min = detail::kv_double(kv, "y_min");
  g.y_max = detail::kv_double(kv, "y_max");
  g.validate();

  const Index rows = static_cast<Index>(series.variables.size()) * g.points();
  const Index cols = g.n_steps;
  series.data.resize(rows, cols);
  std::vector<unsigned char> buf(static_cast<std::size_t>(cols) * 8);
  for (Index r = 0; r < rows; ++r) {
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw DataError("series payload truncated in " + path + ": header declares " +
                      std::to_string(rows) + " rows of " + std::to_string(cols) +
                      " values; data ends inside row " + std::to_string(r));
    for (Index c = 0; c < cols; ++c) {
      const double v = read_f64_le(&buf[static_cast<std::size_t>(c) * 8]);
      if (!std::isfinite(v))
        throw DataError("non-finite value in " + path + " at row " + std::to_string(r) +
                        ", column " + std::to_string(c));
      series.data(r, c) = v;
    }
  }
  char extra;
  if (in.read(&extra, 1))
    throw DataError("trailing bytes after payload in " + path);
  return series;
}

// CSV is export-only: one row per (variable, grid point), header of timestep
// indices.
inline void export_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "row";
  for (Index c = 0; c < m.cols(); ++c) out << "," << c;
  out << "\n";
  for (Index r = 0; r < m.rows(); ++r) {
    out << r;
    for (Index c = 0; c < m.cols(); ++c) out << "," << format_double(m(r, c));
    out << "\n";
  }
  if (!out) throw DataError("short write: " + path);
}

inline void export_series_csv(const FieldSeries& series, const std::string& path) {
  series.validate();
  export_matrix_csv(series.data, path);
}

}  // namespace neuralpde
