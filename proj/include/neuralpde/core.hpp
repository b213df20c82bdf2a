#pragma once

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

namespace neuralpde {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user-supplied configuration (grids, hyperparameters, CLI flags).
struct ConfigError : Error {
  using Error::Error;
};

// Malformed or inconsistent data: files, shapes, non-finite values.
struct DataError : Error {
  using Error::Error;
};

// Explicit-scheme stability bound violated.
struct StabilityError : Error {
  using Error::Error;
};

// Divergence during numeric computation (NaN/Inf mid-run).
struct NumericError : Error {
  using Error::Error;
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

// Locates the first non-finite entry; returns false if none.
inline bool find_non_finite(const Matrix& m, Index& row, Index& col) {
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r)
      if (!std::isfinite(m(r, c))) {
        row = r;
        col = c;
        return true;
      }
  return false;
}

// --- deterministic RNG helpers -------------------------------------------
//
// Distributions in <random> are implementation-defined; these mappings are
// pinned so seeded runs reproduce bit-for-bit.

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform_unit(rng) * (hi - lo);
}

// Box-Muller; draws two uniforms per call.
inline double gaussian(std::mt19937_64& rng) {
  double u1 = uniform_unit(rng);
  double u2 = uniform_unit(rng);
  while (u1 <= 0.0) u1 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// --- little-endian 64-bit float payload codec ----------------------------

inline void write_f64_le(double v, unsigned char* out) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  std::memcpy(out, &bits, sizeof bits);
}

inline double read_f64_le(const unsigned char* in) {
  std::uint64_t bits;
  std::memcpy(&bits, in, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  double v;
  std::memcpy(&v, &bits, sizeof bits);
  return v;
}

inline void write_f64_le(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  char buf[8];
  std::memcpy(buf, &bits, sizeof bits);
  os.write(buf, 8);
}

inline bool read_f64_le(std::istream& is, double& v) {
  char buf[8];
  if (!is.read(buf, 8)) return false;
  std::uint64_t bits;
  std::memcpy(&bits, buf, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
  std::memcpy(&v, &bits, sizeof bits);
  return true;
}

// FNV-1a over raw bytes; used for output manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace neuralpde
