#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "neuralpde/model.hpp"

namespace neuralpde {

inline constexpr const char* kModelMagic = "NEURALPDE-MODEL/1";

// Two text lines (magic; then `d= n_in= m_out= peephole= count=`), then all
// tensors in visit_params order as little-endian float64, column-major within
// each tensor.
inline void save_model(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  const ModelHyper& h = params.hyper;
  out << kModelMagic << "\n";
  out << "d=" << h.d << " n_in=" << h.n_in << " m_out=" << h.m_out
      << " peephole=" << (h.dense_peephole ? "dense" : "diag") << " count=" << param_count(h)
      << "\n";
  unsigned char buf[8];
  visit_params(const_cast<ModelParams&>(params), [&](Matrix& m) {
    for (Index c = 0; c < m.cols(); ++c)
      for (Index r = 0; r < m.rows(); ++r) {
        write_f64_le(m(r, c), buf);
        out.write(reinterpret_cast<const char*>(buf), 8);
      }
  });
  if (!out) throw DataError("short write: " + path);
}

inline ModelParams load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open for reading: " + path);
  std::string magic;
  if (!std::getline(in, magic)) throw DataError("empty model file: " + path);
  if (magic == std::string(kModelMagic) + "\r") magic.pop_back();
  if (magic != kModelMagic)
    throw DataError("bad magic in " + path + ": expected " + kModelMagic + ", got '" + magic +
                    "'");
  std::string header;
  if (!std::getline(in, header)) throw DataError("missing model header line: " + path);

  ModelHyper h;
  long long declared_count = -1;
  std::istringstream ss(header);
  std::string tok;
  bool have_d = false, have_n = false, have_m = false, have_p = false;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw DataError("model header: malformed token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "d") { h.d = std::stoll(val); have_d = true; }
      else if (key == "n_in") { h.n_in = std::stoll(val); have_n = true; }
      else if (key == "m_out") { h.m_out = std::stoll(val); have_m = true; }
      else if (key == "count") { declared_count = std::stoll(val); }
      else if (key == "peephole") {
        if (val == "diag") h.dense_peephole = false;
        else if (val == "dense") h.dense_peephole = true;
        else throw DataError("model header: peephole must be diag or dense, got '" + val + "'");
        have_p = true;
      } else {
        throw DataError("model header: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw DataError("model header: bad value for '" + key + "': " + val);
    } catch (const std::out_of_range&) {
      throw DataError("model header: bad value for '" + key + "': " + val);
    }
  }
  if (!have_d || !have_n || !have_m || !have_p || declared_count < 0)
    throw DataError("model header: missing keys in " + path);
  h.validate();
  if (declared_count != param_count(h))
    throw DataError("model header: count=" + std::to_string(declared_count) +
                    " disagrees with hyperparameters (expect " +
                    std::to_string(param_count(h)) + ")");

  ModelParams params = ModelParams::zeros(h);
  unsigned char buf[8];
  long long read_count = 0;
  visit_params(params, [&](Matrix& m) {
    for (Index c = 0; c < m.cols(); ++c)
      for (Index r = 0; r < m.rows(); ++r) {
        in.read(reinterpret_cast<char*>(buf), 8);
        if (in.gcount() != 8)
          throw DataError("model payload truncated in " + path + " after " +
                          std::to_string(read_count) + " of " +
                          std::to_string(param_count(h)) + " values");
        m(r, c) = read_f64_le(buf);
        ++read_count;
      }
  });
  char extra;
  if (in.read(&extra, 1)) throw DataError("trailing bytes after payload in " + path);
  return params;
}

}  // namespace neuralpde
