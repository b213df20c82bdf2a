#pragma once

#include <string>
#include <utility>

#include "neuralpde/core.hpp"

namespace neuralpde {

// One LSTM direction. Gates i, f, o carry peephole connections to the cell
// state (c_{t-1} for i and f, the current c_t for o); the candidate gate has
// none. Peepholes are elementwise by default (p_* stored d x 1); dense mode
// stores full d x d matrices.
struct LstmCellParams {
  Index d = 0;    // hidden size
  Index n_x = 0;  // input size per sequence element
  bool dense_peephole = false;

  Matrix w_xi, w_hi, p_i, b_i;
  Matrix w_xf, w_hf, p_f, b_f;
  Matrix w_xc, w_hc, b_c;
  Matrix w_xo, w_ho, p_o, b_o;

  static LstmCellParams zeros(Index d, Index n_x, bool dense_peephole = false) {
    LstmCellParams p;
    p.d = d;
    p.n_x = n_x;
    p.dense_peephole = dense_peephole;
    const Index pc = dense_peephole ? d : 1;
    auto z = [](Index r, Index c) { return Matrix::Zero(r, c); };
    p.w_xi = z(d, n_x); p.w_hi = z(d, d); p.p_i = z(d, pc); p.b_i = z(d, 1);
    p.w_xf = z(d, n_x); p.w_hf = z(d, d); p.p_f = z(d, pc); p.b_f = z(d, 1);
    p.w_xc = z(d, n_x); p.w_hc = z(d, d); p.b_c = z(d, 1);
    p.w_xo = z(d, n_x); p.w_ho = z(d, d); p.p_o = z(d, pc); p.b_o = z(d, 1);
    return p;
  }
};

inline Matrix sigmoid(const Matrix& x) {
  return x.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

namespace detail {

// Peephole contribution to a gate pre-activation.
inline Matrix peep(const Matrix& p, const Matrix& c, bool dense) {
  return dense ? Matrix(p * c) : Matrix(p.cwiseProduct(c));
}

// Gradient routed back through a peephole to the cell state it reads.
inline Matrix peep_back(const Matrix& p, const Matrix& da, bool dense) {
  return dense ? Matrix(p.transpose() * da) : Matrix(p.cwiseProduct(da));
}

}  // namespace detail

// Single step. x is n_x x 1, h_prev/c_prev are d x 1.
inline std::pair<Matrix, Matrix> lstm_cell_forward(const Matrix& x, const Matrix& h_prev,
                                                   const Matrix& c_prev,
                                                   const LstmCellParams& p) {
  if (x.rows() != p.n_x || x.cols() != 1 || h_prev.rows() != p.d || c_prev.rows() != p.d)
    throw DataError("lstm_cell_forward: shape mismatch");
  const bool dp = p.dense_peephole;
  Matrix i = sigmoid(p.w_xi * x + p.w_hi * h_prev + detail::peep(p.p_i, c_prev, dp) + p.b_i);
  Matrix f = sigmoid(p.w_xf * x + p.w_hf * h_prev + detail::peep(p.p_f, c_prev, dp) + p.b_f);
  Matrix g = (p.w_xc * x + p.w_hc * h_prev + p.b_c).array().tanh().matrix();
  Matrix c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  Matrix o = sigmoid(p.w_xo * x + p.w_ho * h_prev + detail::peep(p.p_o, c, dp) + p.b_o);
  Matrix h = o.cwiseProduct(c.array().tanh().matrix());
  return {std::move(h), std::move(c)};
}

// Everything the backward pass needs, stored in sequence order regardless of
// the direction of traversal: column t always refers to sequence position t.
struct DirectionCache {
  Matrix i, f, g, o, c, tanh_c, h;  // each d x K
  bool reverse = false;
};

// Runs one direction over a sequence laid out as columns (x_seq is n_x x K).
// reverse=true processes columns K-1..0; the previous state of position t is
// then at position t+1.
inline DirectionCache run_direction(const Matrix& x_seq, const LstmCellParams& p, bool reverse) {
  if (x_seq.rows() != p.n_x) throw DataError("run_direction: input row count != n_x");
  if (x_seq.cols() < 1) throw DataError("run_direction: empty sequence");
  const Index k = x_seq.cols(), d = p.d;
  const bool dp = p.dense_peephole;
  DirectionCache cc;
  cc.reverse = reverse;
  for (Matrix* m : {&cc.i, &cc.f, &cc.g, &cc.o, &cc.c, &cc.tanh_c, &cc.h}) m->resize(d, k);
  Matrix h_prev = Matrix::Zero(d, 1), c_prev = Matrix::Zero(d, 1);
  for (Index s = 0; s < k; ++s) {
    const Index t = reverse ? k - 1 - s : s;
    const auto x = x_seq.col(t);
    Matrix ai = p.w_xi * x + p.w_hi * h_prev + detail::peep(p.p_i, c_prev, dp) + p.b_i;
    Matrix af = p.w_xf * x + p.w_hf * h_prev + detail::peep(p.p_f, c_prev, dp) + p.b_f;
    Matrix ag = p.w_xc * x + p.w_hc * h_prev + p.b_c;
    cc.i.col(t) = sigmoid(ai);
    cc.f.col(t) = sigmoid(af);
    cc.g.col(t) = ag.array().tanh();
    cc.c.col(t) = cc.f.col(t).cwiseProduct(c_prev) + cc.i.col(t).cwiseProduct(cc.g.col(t));
    Matrix ao = p.w_xo * x + p.w_ho * h_prev + detail::peep(p.p_o, cc.c.col(t), dp) + p.b_o;
    cc.o.col(t) = sigmoid(ao);
    cc.tanh_c.col(t) = cc.c.col(t).array().tanh();
    cc.h.col(t) = cc.o.col(t).cwiseProduct(cc.tanh_c.col(t));
    h_prev = cc.h.col(t);
    c_prev = cc.c.col(t);
  }
  return cc;
}

// Output element t = fwd state at t stacked on bwd state at t (2d x K).
inline Matrix bilstm_forward(const Matrix& x_seq, const LstmCellParams& fwd,
                             const LstmCellParams& bwd) {
  DirectionCache cf = run_direction(x_seq, fwd, false);
  DirectionCache cb = run_direction(x_seq, bwd, true);
  Matrix out(2 * fwd.d, x_seq.cols());
  out.topRows(fwd.d) = cf.h;
  out.bottomRows(bwd.d) = cb.h;
  return out;
}

// Exact BPTT for one direction. dh_out is the loss gradient wrt this
// direction's h at every position (d x K); returns the gradient wrt the input
// sequence and accumulates parameter gradients into `grad`.
inline Matrix backward_direction(const Matrix& x_seq, const LstmCellParams& p,
                                 const DirectionCache& cc, const Matrix& dh_out,
                                 LstmCellParams& grad) {
  const Index k = x_seq.cols(), d = p.d;
  const bool dp = p.dense_peephole;
  if (dh_out.rows() != d || dh_out.cols() != k)
    throw DataError("backward_direction: gradient shape mismatch");
  Matrix dx_seq = Matrix::Zero(p.n_x, k);
  Matrix dh_next = Matrix::Zero(d, 1);  // recurrent carry toward earlier steps
  Matrix dc_next = Matrix::Zero(d, 1);
  const Matrix zero = Matrix::Zero(d, 1);
  for (Index s = k; s-- > 0;) {
    // Walk opposite to the forward traversal.
    const Index t = cc.reverse ? k - 1 - s : s;
    const bool first = (s == 0);
    const Index t_prev = cc.reverse ? t + 1 : t - 1;
    Matrix c_prev_m = first ? zero : Matrix(cc.c.col(t_prev));
    Matrix h_prev_m = first ? zero : Matrix(cc.h.col(t_prev));

    Matrix dh = dh_out.col(t) + dh_next;
    Matrix o = cc.o.col(t), i = cc.i.col(t), f = cc.f.col(t), g = cc.g.col(t);
    Matrix tc = cc.tanh_c.col(t);

    Matrix da_o = dh.cwiseProduct(tc).cwiseProduct(o).cwiseProduct((1.0 - o.array()).matrix());
    Matrix dc = dc_next + dh.cwiseProduct(o).cwiseProduct((1.0 - tc.array().square()).matrix()) +
                detail::peep_back(p.p_o, da_o, dp);
    Matrix da_i = dc.cwiseProduct(g).cwiseProduct(i).cwiseProduct((1.0 - i.array()).matrix());
    Matrix da_f =
        dc.cwiseProduct(c_prev_m).cwiseProduct(f).cwiseProduct((1.0 - f.array()).matrix());
    Matrix da_g = dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());

    dc_next = dc.cwiseProduct(f) + detail::peep_back(p.p_i, da_i, dp) +
              detail::peep_back(p.p_f, da_f, dp);
    dh_next = p.w_hi.transpose() * da_i + p.w_hf.transpose() * da_f +
              p.w_hc.transpose() * da_g + p.w_ho.transpose() * da_o;
    dx_seq.col(t) = p.w_xi.transpose() * da_i + p.w_xf.transpose() * da_f +
                    p.w_xc.transpose() * da_g + p.w_xo.transpose() * da_o;

    const auto xt = x_seq.col(t).transpose();
    grad.w_xi += da_i * xt;
    grad.w_xf += da_f * xt;
    grad.w_xc += da_g * xt;
    grad.w_xo += da_o * xt;
    grad.w_hi += da_i * h_prev_m.transpose();
    grad.w_hf += da_f * h_prev_m.transpose();
    grad.w_hc += da_g * h_prev_m.transpose();
    grad.w_ho += da_o * h_prev_m.transpose();
    if (dp) {
      grad.p_i += da_i * c_prev_m.transpose();
      grad.p_f += da_f * c_prev_m.transpose();
      grad.p_o += da_o * cc.c.col(t).transpose();
    } else {
      grad.p_i += da_i.cwiseProduct(c_prev_m);
      grad.p_f += da_f.cwiseProduct(c_prev_m);
      grad.p_o += da_o.cwiseProduct(cc.c.col(t));
    }
    grad.b_i += da_i;
    grad.b_f += da_f;
    grad.b_c += da_g;
    grad.b_o += da_o;
  }
  return dx_seq;
}

}  // namespace neuralpde
