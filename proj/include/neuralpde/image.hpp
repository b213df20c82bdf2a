#pragma once

#include <algorithm>
#include <fstream>
#include <string>

#include "neuralpde/core.hpp"

namespace neuralpde {

// Matrix row 0 is the top image row; width = columns. lo/hi define the value
// range mapped onto 0..255 (degenerate range -> all-zero image).

namespace detail {

inline unsigned char to_byte(double v, double lo, double hi) {
  if (!(hi > lo)) return 0;
  const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
  return static_cast<unsigned char>(std::lround(t * 255.0));
}

}  // namespace detail

inline void write_pgm(const Matrix& m, const std::string& path, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "P5\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      const unsigned char b = detail::to_byte(m(r, c), lo, hi);
      out.write(reinterpret_cast<const char*>(&b), 1);
    }
  if (!out) throw DataError("short write: " + path);
}

inline void write_pgm(const Matrix& m, const std::string& path) {
  write_pgm(m, path, m.minCoeff(), m.maxCoeff());
}

// 0 -> blue, mid -> white, 1 -> red (for signed data; pass symmetric lo/hi).
inline void diverging_rgb(double t, unsigned char rgb[3]) {
  t = std::clamp(t, 0.0, 1.0);
  double r, g, b;
  if (t < 0.5) {
    r = g = 2.0 * t;
    b = 1.0;
  } else {
    r = 1.0;
    g = b = 2.0 - 2.0 * t;
  }
  rgb[0] = static_cast<unsigned char>(std::lround(r * 255.0));
  rgb[1] = static_cast<unsigned char>(std::lround(g * 255.0));
  rgb[2] = static_cast<unsigned char>(std::lround(b * 255.0));
}

inline void write_ppm_diverging(const Matrix& m, const std::string& path, double lo, double hi) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "P6\n" << m.cols() << " " << m.rows() << "\n255\n";
  for (Index r = 0; r < m.rows(); ++r)
    for (Index c = 0; c < m.cols(); ++c) {
      unsigned char rgb[3] = {0, 0, 0};
      if (hi > lo) diverging_rgb((m(r, c) - lo) / (hi - lo), rgb);
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  if (!out) throw DataError("short write: " + path);
}

// Absolute error on a black-to-white ramp: identical fields give an all-zero
// payload.
inline void write_error_pgm(const Matrix& err, const std::string& path) {
  const Matrix a = err.cwiseAbs();
  write_pgm(a, path, 0.0, a.maxCoeff());
}

// Signed error on the diverging map, symmetric about zero.
inline void write_error_ppm(const Matrix& err, const std::string& path) {
  const double m = err.cwiseAbs().maxCoeff();
  write_ppm_diverging(err, path, -m, m);
}

}  // namespace neuralpde
