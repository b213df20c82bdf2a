#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "neuralpde/grid.hpp"

namespace neuralpde {

// --- 2D <-> 1D mapping -----------------------------------------------------
//
// Row-major: grid point (i, j) lands at flat index i*ny + j. Any fixed
// bijection works for learning; this one is the project standard.

inline Vector flatten_2d(const FieldSnapshot& s, const GridSpec& g) {
  if (!s.matches(g)) throw DataError("flatten_2d: snapshot does not match grid");
  if (!g.is_2d()) return s.values.col(0);  // 1D state is already a vector
  Vector out(g.points());
  for (Index i = 0; i < g.nx; ++i)
    for (Index j = 0; j < g.ny; ++j) out(i * g.ny + j) = s.values(i, j);
  return out;
}

inline FieldSnapshot unflatten_2d(const Vector& v, const GridSpec& g, std::string name = {}) {
  if (v.size() != g.points())
    throw DataError("unflatten_2d: vector length " + std::to_string(v.size()) + " != K = " +
                    std::to_string(g.points()));
  FieldSnapshot s;
  s.variable_name = std::move(name);
  if (!g.is_2d()) {
    s.values = v;
    return s;
  }
  s.values.resize(g.nx, g.ny);
  for (Index i = 0; i < g.nx; ++i)
    for (Index j = 0; j < g.ny; ++j) s.values(i, j) = v(i * g.ny + j);
  return s;
}

// Row r of the result is the full time series of one (variable, grid point)
// pair; column n is the flattened state at t_n. Variable blocks are stacked,
// so a 2-variable series has the u block in rows [0, K) and v in [K, 2K).
inline Matrix assemble_matrix(const FieldSeries& series) {
  series.validate();
  return series.data;
}

// --- windowing --------------------------------------------------------------

struct Sample {
  Matrix input;    // (V*K) x n_in
  Matrix target;   // (V*K) x m_out
  Index origin_step = 0;
};

enum class SplitTag { Train, Test };

struct SampleSet {
  std::vector<Sample> samples;
  std::vector<SplitTag> split_assignment;  // empty until split() is applied
  std::uint64_t rng_seed = 0;
  Index n_vars = 1;

  bool is_split() const { return split_assignment.size() == samples.size(); }

  std::vector<Index> indices_with(SplitTag tag) const {
    std::vector<Index> out;
    for (Index i = 0; i < static_cast<Index>(samples.size()); ++i)
      if (is_split() ? split_assignment[i] == tag : tag == SplitTag::Train) out.push_back(i);
    return out;
  }
};

inline Index window_count(Index n_cols, Index n_in, Index m_out, Index stride) {
  return (n_cols - n_in - m_out) / stride + 1;
}

// Cuts the matrix into (input, target) column windows. Sample s covers input
// columns [s*stride, s*stride + n_in) and the m_out columns after them.
inline SampleSet window(const Matrix& matrix, Index n_in = 30, Index m_out = 10, Index stride = 0,
                        Index n_vars = 1) {
  if (stride == 0) stride = n_in + m_out;
  if (n_in < 1 || m_out < 1) throw ConfigError("window: n_in and m_out must be positive");
  if (stride < 1) throw ConfigError("window: stride must be >= 1");
  if (n_vars < 1 || matrix.rows() % n_vars != 0)
    throw DataError("window: row count not divisible by variable count");
  if (matrix.cols() < n_in + m_out)
    throw DataError("window: need at least " + std::to_string(n_in + m_out) + " columns, got " +
                    std::to_string(matrix.cols()));
  SampleSet set;
  set.n_vars = n_vars;
  const Index count = window_count(matrix.cols(), n_in, m_out, stride);
  set.samples.reserve(count);
  for (Index s = 0; s < count; ++s) {
    Sample smp;
    smp.origin_step = s * stride;
    smp.input = matrix.middleCols(smp.origin_step, n_in);
    smp.target = matrix.middleCols(smp.origin_step + n_in, m_out);
    set.samples.push_back(std::move(smp));
  }
  return set;
}

// --- train/test split --------------------------------------------------------

// Deterministic Fisher-Yates; never delegate to std::shuffle, whose draw
// sequence is implementation-defined.
inline void shuffle_indices(std::vector<Index>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

inline SampleSet split(SampleSet set, double train_fraction, std::uint64_t seed) {
  if (set.samples.empty()) throw DataError("split: empty sample set");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split: train_fraction must lie in (0, 1)");
  const Index n = static_cast<Index>(set.samples.size());
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  shuffle_indices(order, rng);
  const Index n_train = static_cast<Index>(
      std::floor(static_cast<double>(n) * train_fraction + 1e-9));
  set.split_assignment.assign(n, SplitTag::Test);
  for (Index i = 0; i < n_train; ++i) set.split_assignment[order[i]] = SplitTag::Train;
  set.rng_seed = seed;
  return set;
}

// --- normalization ------------------------------------------------------------

enum class NormKind { Identity, Sigmoid, MinMax };

inline NormKind norm_kind_from_string(const std::string& s) {
  if (s == "identity") return NormKind::Identity;
  if (s == "sigmoid") return NormKind::Sigmoid;
  if (s == "minmax") return NormKind::MinMax;
  throw ConfigError("unknown normalizer: " + s);
}

inline std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::Identity: return "identity";
    case NormKind::Sigmoid: return "sigmoid";
    case NormKind::MinMax: return "minmax";
  }
  return "?";
}

// Elementwise map with an exact inverse on its output range. MinMax keeps
// per-variable (min, max) and expects matrices whose rows split evenly into
// that many variable blocks.
struct Normalizer {
  NormKind kind = NormKind::Identity;
  std::vector<double> var_min;
  std::vector<double> var_max;

  Index n_vars() const { return static_cast<Index>(var_min.size()); }

  static Normalizer identity() { return {}; }
  static Normalizer sigmoid() { return {NormKind::Sigmoid, {}, {}}; }

  static Normalizer fit_minmax(const std::vector<const Matrix*>& blocks, Index n_vars) {
    Normalizer norm;
    norm.kind = NormKind::MinMax;
    norm.var_min.assign(n_vars, std::numeric_limits<double>::infinity());
    norm.var_max.assign(n_vars, -std::numeric_limits<double>::infinity());
    for (const Matrix* m : blocks) {
      if (m->rows() % n_vars != 0) throw DataError("normalizer: rows not divisible by variables");
      const Index per = m->rows() / n_vars;
      for (Index v = 0; v < n_vars; ++v) {
        auto block = m->middleRows(v * per, per);
        norm.var_min[v] = std::min(norm.var_min[v], block.minCoeff());
        norm.var_max[v] = std::max(norm.var_max[v], block.maxCoeff());
      }
    }
    for (Index v = 0; v < n_vars; ++v)
      if (!(norm.var_max[v] > norm.var_min[v]))
        throw DataError("normalizer: variable " + std::to_string(v) + " has max <= min");
    return norm;
  }
};

inline double sigmoid_scalar(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double logit_scalar(double p) { return std::log(p) - std::log1p(-p); }

inline Matrix normalize(const Matrix& m, const Normalizer& norm) {
  switch (norm.kind) {
    case NormKind::Identity: return m;
    case NormKind::Sigmoid: return m.unaryExpr([](double x) { return sigmoid_scalar(x); });
    case NormKind::MinMax: {
      if (m.rows() % norm.n_vars() != 0)
        throw DataError("normalize: rows not divisible by variable count");
      const Index per = m.rows() / norm.n_vars();
      Matrix out(m.rows(), m.cols());
      for (Index v = 0; v < norm.n_vars(); ++v) {
        const double lo = norm.var_min[v], span = norm.var_max[v] - norm.var_min[v];
        out.middleRows(v * per, per) = (m.middleRows(v * per, per).array() - lo) / span;
      }
      return out;
    }
  }
  throw ConfigError("normalize: bad kind");
}

inline Matrix denormalize(const Matrix& m, const Normalizer& norm) {
  switch (norm.kind) {
    case NormKind::Identity: return m;
    case NormKind::Sigmoid: {
      Index r, c;
      for (c = 0; c < m.cols(); ++c)
        for (r = 0; r < m.rows(); ++r)
          if (!(m(r, c) > 0.0 && m(r, c) < 1.0))
            throw DataError("denormalize: sigmoid value outside (0,1) at row " +
                            std::to_string(r) + ", column " + std::to_string(c));
      return m.unaryExpr([](double p) { return logit_scalar(p); });
    }
    case NormKind::MinMax: {
      if (m.rows() % norm.n_vars() != 0)
        throw DataError("denormalize: rows not divisible by variable count");
      const Index per = m.rows() / norm.n_vars();
      Matrix out(m.rows(), m.cols());
      for (Index v = 0; v < norm.n_vars(); ++v) {
        const double lo = norm.var_min[v], span = norm.var_max[v] - norm.var_min[v];
        out.middleRows(v * per, per) = m.middleRows(v * per, per).array() * span + lo;
      }
      return out;
    }
  }
  throw ConfigError("denormalize: bad kind");
}

// Fits the chosen normalizer on training data only (inputs and targets
// pooled); identity and sigmoid have no parameters to fit.
inline Normalizer fit_normalizer(NormKind kind, const SampleSet& set) {
  if (kind != NormKind::MinMax) return Normalizer{kind, {}, {}};
  std::vector<const Matrix*> blocks;
  for (Index i : set.indices_with(SplitTag::Train)) {
    blocks.push_back(&set.samples[i].input);
    blocks.push_back(&set.samples[i].target);
  }
  if (blocks.empty()) throw DataError("fit_normalizer: no training samples");
  return Normalizer::fit_minmax(blocks, set.n_vars);
}

// --- noise ---------------------------------------------------------------------

// i.i.d. N(0, sigma^2) on every entry, deterministic under seed. Column-major
// fill order is part of the contract.
inline Matrix add_gaussian_noise(const Matrix& m, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ConfigError("add_gaussian_noise: sigma must be >= 0");
  if (sigma == 0.0) return m;
  std::mt19937_64 rng(seed);
  Matrix out = m;
  for (Index c = 0; c < out.cols(); ++c)
    for (Index r = 0; r < out.rows(); ++r) out(r, c) += sigma * gaussian(rng);
  return out;
}

// Noise goes on inputs only, never targets.
inline void add_input_noise(SampleSet& set, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return;
  for (std::size_t i = 0; i < set.samples.size(); ++i)
    set.samples[i].input =
        add_gaussian_noise(set.samples[i].input, sigma, seed ^ (0x9e3779b97f4a7c15ull * (i + 1)));
}

}  // namespace neuralpde
