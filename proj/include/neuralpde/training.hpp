#pragma once

#include <chrono>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "neuralpde/adam.hpp"
#include "neuralpde/mesh_pipeline.hpp"
#include "neuralpde/model.hpp"

namespace neuralpde {

struct TrainConfig {
  Index epochs = 20;
  Index batch_size = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double validation_fraction = 0.2;  // carved out of the training split
  NormKind normalizer = NormKind::Identity;
  double noise_sigma = 0.0;          // applied to training/validation inputs only
  double clip_grad = 0.0;            // global-norm clip; 0 disables

  void validate() const {
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(lr >= 0.0)) throw ConfigError("train: lr must be >= 0");
    if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
      throw ConfigError("train: validation_fraction must lie in [0, 1)");
    if (noise_sigma < 0.0) throw ConfigError("train: noise_sigma must be >= 0");
  }
};

struct TrainHistory {
  std::vector<double> train_mse;
  std::vector<double> val_mse;
  std::vector<double> seconds;
  double final_test_mse = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
  ModelParams params;      // best-validation checkpoint
  TrainHistory history;
  Normalizer normalizer;   // fitted on the training split
};

namespace detail {

inline void accumulate(ModelParams& acc, ModelParams& grads) {
  auto a = collect_tensors(acc), g = collect_tensors(grads);
  for (std::size_t k = 0; k < a.size(); ++k) *a[k] += *g[k];
}

inline void scale(ModelParams& p, double s) {
  for (Matrix* m : collect_tensors(p)) *m *= s;
}

inline double global_norm(ModelParams& p) {
  double sq = 0.0;
  for (Matrix* m : collect_tensors(p)) sq += m->squaredNorm();
  return std::sqrt(sq);
}

}  // namespace detail

using EpochCallback = std::function<void(Index epoch, const TrainHistory&)>;

// Runs shuffled mini-batch Adam over the train-tagged samples, holding out a
// validation slice, and returns the best-validation checkpoint. Noise (if
// any) perturbs the inputs the optimizer sees; targets stay clean.
inline TrainResult train(const ModelParams& initial, const SampleSet& data,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  cfg.validate();
  const std::vector<Index> train_tagged = data.indices_with(SplitTag::Train);
  if (train_tagged.empty()) throw DataError("train: no training samples");

  TrainResult res;
  res.params = initial;
  res.normalizer = fit_normalizer(cfg.normalizer, data);

  // Hold out validation samples deterministically.
  std::vector<Index> order = train_tagged;
  std::mt19937_64 carve_rng(cfg.seed ^ 0x76616c69646174ull);  // distinct stream per purpose
  shuffle_indices(order, carve_rng);
  const Index n_val = static_cast<Index>(
      std::floor(static_cast<double>(order.size()) * cfg.validation_fraction + 1e-9));
  std::vector<Index> val_idx(order.begin(), order.begin() + n_val);
  std::vector<Index> core_idx(order.begin() + n_val, order.end());
  if (core_idx.empty()) throw DataError("train: validation fraction leaves no training samples");

  // Materialize normalized (input, target) pairs once.
  auto prep = [&](const std::vector<Index>& idx, std::vector<Matrix>& xs,
                  std::vector<Matrix>& ys) {
    xs.reserve(idx.size());
    ys.reserve(idx.size());
    for (Index i : idx) {
      Matrix in = data.samples[i].input;
      if (cfg.noise_sigma > 0.0)
        in = add_gaussian_noise(in, cfg.noise_sigma,
                                cfg.seed ^ (0x9e3779b97f4a7c15ull * (static_cast<std::uint64_t>(i) + 1)));
      xs.push_back(normalize(in, res.normalizer));
      ys.push_back(normalize(data.samples[i].target, res.normalizer));
    }
  };
  std::vector<Matrix> core_x, core_y, val_x, val_y;
  prep(core_idx, core_x, core_y);
  prep(val_idx, val_x, val_y);

  AdamState adam = AdamState::create(initial.hyper, cfg.lr);
  std::mt19937_64 batch_rng(cfg.seed ^ 0x62617463686573ull);
  std::vector<Index> epoch_order(core_idx.size());
  std::iota(epoch_order.begin(), epoch_order.end(), Index{0});

  double best_val = std::numeric_limits<double>::infinity();
  ModelParams best_params = res.params;
  const auto t0 = std::chrono::steady_clock::now();
  double prev_elapsed = 0.0;

  for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_indices(epoch_order, batch_rng);
    double loss_sum = 0.0;
    Index batch_no = 0;
    for (std::size_t start = 0; start < epoch_order.size(); start += cfg.batch_size, ++batch_no) {
      const std::size_t stop = std::min(start + cfg.batch_size, epoch_order.size());
      ModelParams grads = ModelParams::zeros(initial.hyper);
      for (std::size_t k = start; k < stop; ++k) {
        const Index s = epoch_order[k];
        BackwardResult br;
        try {
          br = backward(core_x[s], core_y[s], res.params);
        } catch (const NumericError& e) {
          throw NumericError("train: diverged at epoch " + std::to_string(epoch + 1) +
                             ", batch " + std::to_string(batch_no + 1) + " (" + e.what() + ")");
        }
        if (!std::isfinite(br.loss))
          throw NumericError("train: diverged at epoch " + std::to_string(epoch + 1) +
                             ", batch " + std::to_string(batch_no + 1));
        loss_sum += br.loss;
        detail::accumulate(grads, br.grads);
      }
      detail::scale(grads, 1.0 / static_cast<double>(stop - start));
      if (cfg.clip_grad > 0.0) {
        const double nrm = detail::global_norm(grads);
        if (nrm > cfg.clip_grad) detail::scale(grads, cfg.clip_grad / nrm);
      }
      adam_step(res.params, grads, adam);
    }
    const double train_mse = loss_sum / static_cast<double>(core_idx.size());

    double val_mse = train_mse;  // degenerate case: no validation holdout
    if (!val_idx.empty()) {
      double v = 0.0;
      for (std::size_t k = 0; k < val_x.size(); ++k)
        v += mse_loss(model_forward(val_x[k], res.params), val_y[k]);
      val_mse = v / static_cast<double>(val_x.size());
    }
    if (!std::isfinite(val_mse))
      throw NumericError("train: diverged at epoch " + std::to_string(epoch + 1) +
                         " (validation loss not finite)");
    if (val_mse < best_val) {
      best_val = val_mse;
      best_params = res.params;
    }
    const double elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    res.history.train_mse.push_back(train_mse);
    res.history.val_mse.push_back(val_mse);
    res.history.seconds.push_back(elapsed - prev_elapsed);
    prev_elapsed = elapsed;
    if (on_epoch) on_epoch(epoch, res.history);
  }
  res.params = best_params;
  return res;
}

// normalize -> model -> denormalize.
inline Matrix predict(const ModelParams& params, const Matrix& x, const Normalizer& norm) {
  return denormalize(model_forward(normalize(x, norm), params), norm);
}

// Mean per-sample MSE on the denormalized (physical) scale.
inline double evaluate(const ModelParams& params, const SampleSet& data, const Normalizer& norm,
                       SplitTag tag = SplitTag::Test) {
  const std::vector<Index> idx = data.indices_with(tag);
  if (idx.empty()) throw DataError("evaluate: no samples with the requested tag");
  double sum = 0.0;
  for (Index i : idx)
    sum += mse_loss(predict(params, data.samples[i].input, norm), data.samples[i].target);
  return sum / static_cast<double>(idx.size());
}

struct EvalReport {
  double mse = 0.0;
  Index n_samples = 0;
  std::vector<double> per_var_mse;
  std::vector<double> per_var_max_abs;
  std::vector<double> per_step_mse;  // one entry per predicted timestep
};

inline EvalReport evaluate_report(const ModelParams& params, const SampleSet& data,
                                  const Normalizer& norm, SplitTag tag = SplitTag::Test) {
  const std::vector<Index> idx = data.indices_with(tag);
  if (idx.empty()) throw DataError("evaluate: no samples with the requested tag");
  EvalReport rep;
  rep.n_samples = static_cast<Index>(idx.size());
  const Index n_vars = data.n_vars;
  rep.per_var_mse.assign(n_vars, 0.0);
  rep.per_var_max_abs.assign(n_vars, 0.0);
  const Index m_out = params.hyper.m_out;
  rep.per_step_mse.assign(m_out, 0.0);
  for (Index i : idx) {
    const Matrix err = predict(params, data.samples[i].input, norm) - data.samples[i].target;
    const Index per = err.rows() / n_vars;
    rep.mse += err.squaredNorm() / static_cast<double>(err.size());
    for (Index v = 0; v < n_vars; ++v) {
      auto block = err.middleRows(v * per, per);
      rep.per_var_mse[v] += block.squaredNorm() / static_cast<double>(block.size());
      rep.per_var_max_abs[v] = std::max(rep.per_var_max_abs[v], block.cwiseAbs().maxCoeff());
    }
    for (Index c = 0; c < m_out; ++c)
      rep.per_step_mse[c] += err.col(c).squaredNorm() / static_cast<double>(err.rows());
  }
  const double n = static_cast<double>(idx.size());
  rep.mse /= n;
  for (double& v : rep.per_var_mse) v /= n;
  for (double& v : rep.per_step_mse) v /= n;
  return rep;
}

// Autoregressive extension: repeatedly predicts m_out steps and slides the
// window over its own output. Experimental; quality beyond one window is not
// a trained property.
inline Matrix rollout(const ModelParams& params, const Matrix& x_seed, Index horizon,
                      const Normalizer& norm) {
  const Index n_in = params.hyper.n_in, m_out = params.hyper.m_out;
  if (horizon < m_out)
    throw ConfigError("rollout: horizon must be >= m_out = " + std::to_string(m_out));
  if (x_seed.cols() != n_in)
    throw DataError("rollout: seed has " + std::to_string(x_seed.cols()) +
                    " columns, expected n_in = " + std::to_string(n_in));
  Matrix window = x_seed;
  Matrix out(x_seed.rows(), horizon);
  Index produced = 0;
  while (produced < horizon) {
    const Matrix block = predict(params, window, norm);
    const Index take = std::min(m_out, horizon - produced);
    out.middleCols(produced, take) = block.leftCols(take);
    produced += take;
    if (produced >= horizon) break;
    if (m_out >= n_in) {
      window = block.rightCols(n_in);
    } else {
      Matrix next(window.rows(), n_in);
      next.leftCols(n_in - m_out) = window.rightCols(n_in - m_out);
      next.rightCols(m_out) = block;
      window = next;
    }
  }
  return out;
}

// --- history CSV -----------------------------------------------------------

inline void write_history_csv(const TrainHistory& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "epoch,train_mse,val_mse,seconds\n";
  for (std::size_t e = 0; e < h.train_mse.size(); ++e)
    out << (e + 1) << "," << format_double(h.train_mse[e]) << "," << format_double(h.val_mse[e])
        << "," << format_double(h.seconds[e]) << "\n";
  if (!out) throw DataError("short write: " + path);
}

}  // namespace neuralpde
