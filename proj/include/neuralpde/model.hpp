#pragma once

#include <functional>
#include <string>
#include <vector>

#include "neuralpde/lstm.hpp"

namespace neuralpde {

struct ModelHyper {
  Index d = 48;
  Index n_in = 30;
  Index m_out = 10;
  bool dense_peephole = false;

  void validate() const {
    if (d < 1 || n_in < 1 || m_out < 1)
      throw ConfigError("model hyper: d, n_in, m_out must be positive");
  }
};

inline bool operator==(const ModelHyper& a, const ModelHyper& b) {
  return a.d == b.d && a.n_in == b.n_in && a.m_out == b.m_out &&
         a.dense_peephole == b.dense_peephole;
}

// Encoder bi-LSTM (reads the n_in-wide rows), decoder bi-LSTM (reads the 2d
// latents), linear head. Also serves as its own gradient container.
struct ModelParams {
  ModelHyper hyper;
  LstmCellParams layer1_fwd, layer1_bwd, layer2_fwd, layer2_bwd;
  Matrix dense_w;  // 2d x m_out
  Matrix dense_b;  // m_out x 1

  static ModelParams zeros(const ModelHyper& h) {
    h.validate();
    ModelParams p;
    p.hyper = h;
    p.layer1_fwd = LstmCellParams::zeros(h.d, h.n_in, h.dense_peephole);
    p.layer1_bwd = LstmCellParams::zeros(h.d, h.n_in, h.dense_peephole);
    p.layer2_fwd = LstmCellParams::zeros(h.d, 2 * h.d, h.dense_peephole);
    p.layer2_bwd = LstmCellParams::zeros(h.d, 2 * h.d, h.dense_peephole);
    p.dense_w = Matrix::Zero(2 * h.d, h.m_out);
    p.dense_b = Matrix::Zero(h.m_out, 1);
    return p;
  }
};

// Serialization order of one cell's tensors: gates i, f, c, o; per gate input
// weights, recurrent weights, peephole (i/f/o only), bias.
template <typename Fn>
void visit_cell(LstmCellParams& c, Fn&& fn) {
  fn(c.w_xi); fn(c.w_hi); fn(c.p_i); fn(c.b_i);
  fn(c.w_xf); fn(c.w_hf); fn(c.p_f); fn(c.b_f);
  fn(c.w_xc); fn(c.w_hc); fn(c.b_c);
  fn(c.w_xo); fn(c.w_ho); fn(c.p_o); fn(c.b_o);
}

// Whole-model order: layer1_fwd, layer1_bwd, layer2_fwd, layer2_bwd, dense.
template <typename Fn>
void visit_params(ModelParams& p, Fn&& fn) {
  visit_cell(p.layer1_fwd, fn);
  visit_cell(p.layer1_bwd, fn);
  visit_cell(p.layer2_fwd, fn);
  visit_cell(p.layer2_bwd, fn);
  fn(p.dense_w);
  fn(p.dense_b);
}

inline std::vector<Matrix*> collect_tensors(ModelParams& p) {
  std::vector<Matrix*> out;
  visit_params(p, [&](Matrix& m) { out.push_back(&m); });
  return out;
}

inline Index param_count(const ModelHyper& h) {
  h.validate();
  const Index d = h.d;
  const Index peep = h.dense_peephole ? 3 * d * d : 3 * d;
  const Index cell1 = 4 * d * h.n_in + 4 * d * d + peep + 4 * d;
  const Index cell2 = 4 * d * (2 * d) + 4 * d * d + peep + 4 * d;
  return 2 * cell1 + 2 * cell2 + (2 * d * h.m_out + h.m_out);
}

namespace detail {

inline void xavier_fill(Matrix& m, Index fan_in, Index fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index c = 0; c < m.cols(); ++c)
    for (Index r = 0; r < m.rows(); ++r) m(r, c) = uniform_in(rng, -limit, limit);
}

inline void init_cell(LstmCellParams& c, std::mt19937_64& rng) {
  const Index d = c.d, n = c.n_x;
  for (Matrix* m : {&c.w_xi, &c.w_xf, &c.w_xc, &c.w_xo}) xavier_fill(*m, n, d, rng);
  for (Matrix* m : {&c.w_hi, &c.w_hf, &c.w_hc, &c.w_ho}) xavier_fill(*m, d, d, rng);
  for (Matrix* m : {&c.p_i, &c.p_f, &c.p_o}) xavier_fill(*m, d, d, rng);
  c.b_f.setOnes();  // start remembering; the other biases stay zero
}

}  // namespace detail

inline ModelParams init_params(const ModelHyper& h, std::uint64_t seed) {
  ModelParams p = ModelParams::zeros(h);
  std::mt19937_64 rng(seed);
  detail::init_cell(p.layer1_fwd, rng);
  detail::init_cell(p.layer1_bwd, rng);
  detail::init_cell(p.layer2_fwd, rng);
  detail::init_cell(p.layer2_bwd, rng);
  detail::xavier_fill(p.dense_w, 2 * h.d, h.m_out, rng);
  return p;
}

// Full forward cache for BPTT (per-direction caches plus layer activations).
struct ForwardCache {
  Matrix x1;                        // n_in x K (the transposed input)
  DirectionCache l1f, l1b, l2f, l2b;
  Matrix h1;                        // 2d x K, layer-1 output = layer-2 input
  Matrix h2;                        // 2d x K
  Matrix pred;                      // K x m_out
};

// X rows are the sequence elements (one grid point each, n_in time values).
inline Matrix model_forward(const Matrix& x, const ModelParams& p, ForwardCache* cache = nullptr) {
  const ModelHyper& h = p.hyper;
  if (x.cols() != h.n_in)
    throw DataError("model_forward: input has " + std::to_string(x.cols()) +
                    " columns, expected n_in = " + std::to_string(h.n_in));
  if (x.rows() < 1) throw DataError("model_forward: empty input");
  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc.x1 = x.transpose();
  cc.l1f = run_direction(cc.x1, p.layer1_fwd, false);
  cc.l1b = run_direction(cc.x1, p.layer1_bwd, true);
  cc.h1.resize(2 * h.d, cc.x1.cols());
  cc.h1.topRows(h.d) = cc.l1f.h;
  cc.h1.bottomRows(h.d) = cc.l1b.h;
  cc.l2f = run_direction(cc.h1, p.layer2_fwd, false);
  cc.l2b = run_direction(cc.h1, p.layer2_bwd, true);
  cc.h2.resize(2 * h.d, cc.x1.cols());
  cc.h2.topRows(h.d) = cc.l2f.h;
  cc.h2.bottomRows(h.d) = cc.l2b.h;
  cc.pred = cc.h2.transpose() * p.dense_w;
  cc.pred.rowwise() += p.dense_b.col(0).transpose();
  if (!all_finite(cc.pred)) throw NumericError("model_forward: non-finite output (dense head)");
  return cc.pred;
}

// Mean (not sum) of squared entrywise differences.
inline double mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw DataError("mse_loss: shape mismatch " + std::to_string(pred.rows()) + "x" +
                    std::to_string(pred.cols()) + " vs " + std::to_string(target.rows()) + "x" +
                    std::to_string(target.cols()));
  const double n = static_cast<double>(pred.rows()) * static_cast<double>(pred.cols());
  return (pred - target).squaredNorm() / n;
}

struct BackwardResult {
  ModelParams grads;
  double loss = 0.0;
};

inline BackwardResult backward(const Matrix& x, const Matrix& y, const ModelParams& p) {
  const ModelHyper& h = p.hyper;
  ForwardCache cc;
  Matrix pred = model_forward(x, p, &cc);
  BackwardResult res;
  res.loss = mse_loss(pred, y);
  res.grads = ModelParams::zeros(h);

  const double n = static_cast<double>(pred.rows()) * static_cast<double>(pred.cols());
  Matrix dpred = (2.0 / n) * (pred - y);  // K x m_out

  res.grads.dense_w = cc.h2 * dpred;
  res.grads.dense_b = dpred.colwise().sum().transpose();
  Matrix dh2 = p.dense_w * dpred.transpose();  // 2d x K

  Matrix dh1 = Matrix::Zero(2 * h.d, cc.x1.cols());
  dh1 += backward_direction(cc.h1, p.layer2_fwd, cc.l2f, dh2.topRows(h.d), res.grads.layer2_fwd);
  dh1 +=
      backward_direction(cc.h1, p.layer2_bwd, cc.l2b, dh2.bottomRows(h.d), res.grads.layer2_bwd);
  if (!all_finite(dh1)) throw NumericError("backward: non-finite gradient (layer 2)");

  backward_direction(cc.x1, p.layer1_fwd, cc.l1f, dh1.topRows(h.d), res.grads.layer1_fwd);
  backward_direction(cc.x1, p.layer1_bwd, cc.l1b, dh1.bottomRows(h.d), res.grads.layer1_bwd);
  for (Matrix* g : collect_tensors(res.grads))
    if (!all_finite(*g)) throw NumericError("backward: non-finite gradient (layer 1)");
  return res;
}

}  // namespace neuralpde
