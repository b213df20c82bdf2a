#pragma once

#include "neuralpde/model.hpp"

namespace neuralpde {

struct AdamState {
  ModelParams m, v;  // first/second moment accumulators, param-shaped
  long long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState create(const ModelHyper& h, double lr = 1e-3) {
    AdamState s;
    s.m = ModelParams::zeros(h);
    s.v = ModelParams::zeros(h);
    s.lr = lr;
    return s;
  }
};

// Standard Adam with bias correction, applied in place.
inline void adam_step(ModelParams& params, ModelParams& grads, AdamState& state) {
  if (!(params.hyper == grads.hyper) || !(params.hyper == state.m.hyper))
    throw DataError("adam_step: hyperparameter mismatch between params, grads, and state");
  state.t += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  auto ps = collect_tensors(params);
  auto gs = collect_tensors(grads);
  auto ms = collect_tensors(state.m);
  auto vs = collect_tensors(state.v);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    Matrix& p = *ps[k];
    const Matrix& g = *gs[k];
    Matrix& m = *ms[k];
    Matrix& v = *vs[k];
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    p.array() -= state.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + state.epsilon);
  }
}

}  // namespace neuralpde
