// Command-line front end: generate benchmark datasets, train, evaluate,
// predict, roll out, and plot. Exit codes: 0 ok, 2 config, 3 data, 4 numeric.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "neuralpde/neuralpde.hpp"

namespace fs = std::filesystem;
namespace np = neuralpde;
using nlohmann::json;

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw np::DataError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw np::DataError("short write: " + path);
}

json grid_to_json(const np::GridSpec& g) {
  json j{{"x_min", g.x_min}, {"x_max", g.x_max}, {"nx", g.nx},
         {"dt", g.dt},       {"n_steps", g.n_steps}};
  if (g.is_2d()) {
    j["y_min"] = g.y_min;
    j["y_max"] = g.y_max;
    j["ny"] = g.ny;
  }
  return j;
}

json config_to_json(const np::ExperimentConfig& cfg) {
  json j;
  j["benchmark"] = np::to_string(cfg.benchmark);
  if (cfg.benchmark == np::Benchmark::External) j["external_path"] = cfg.external_path;
  j["grid"] = grid_to_json(cfg.grid);
  if (cfg.benchmark == np::Benchmark::Heat2d) j["alpha"] = cfg.alpha;
  if (cfg.benchmark == np::Benchmark::Burgers2d) j["burgers_as_written"] = cfg.burgers_as_written;
  j["pipeline"] = {{"n_in", cfg.n_in},
                   {"m_out", cfg.m_out},
                   {"stride", cfg.stride},
                   {"train_fraction", cfg.train_fraction},
                   {"seed", cfg.seed},
                   {"normalizer", np::to_string(cfg.train.normalizer)},
                   {"noise_sigma", cfg.train.noise_sigma}};
  j["model"] = {{"d", cfg.hyper.d},
                {"dense_peephole", cfg.hyper.dense_peephole},
                {"param_count", np::param_count(cfg.hyper)}};
  j["train"] = {{"epochs", cfg.train.epochs},
                {"batch_size", cfg.train.batch_size},
                {"lr", cfg.train.lr},
                {"validation_fraction", cfg.train.validation_fraction},
                {"clip_grad", cfg.train.clip_grad}};
  return j;
}

std::uint64_t config_hash(const np::ExperimentConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  return np::fnv1a64(s.data(), s.size());
}

json base_manifest(const char* command, const np::ExperimentConfig& cfg) {
  json j;
  j["format"] = "neuralpde/1";
  j["command"] = command;
  j["config"] = config_to_json(cfg);
  j["config_fnv1a64"] = hex64(config_hash(cfg));
  return j;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

// The normalizer evaluate/predict need is the one fitted during training;
// it is reproduced here from the same seed, split, and normalizer kind.
np::Normalizer resolve_normalizer(const np::ExperimentConfig& cfg, const np::FieldSeries& series) {
  if (cfg.train.normalizer != np::NormKind::MinMax)
    return np::Normalizer{cfg.train.normalizer, {}, {}};
  return np::fit_normalizer(np::NormKind::MinMax, np::make_sample_set(series, cfg));
}

// Adopt the model's window sizes unless the user pinned different ones.
void reconcile_window(np::ExperimentConfig& cfg, const np::ModelHyper& mh, bool n_in_set,
                      bool m_out_set) {
  if ((n_in_set && cfg.n_in != mh.n_in) || (m_out_set && cfg.m_out != mh.m_out))
    throw np::ConfigError("requested windows (n_in=" + std::to_string(cfg.n_in) + ", m_out=" +
                          std::to_string(cfg.m_out) + ") do not match the model (n_in=" +
                          std::to_string(mh.n_in) + ", m_out=" + std::to_string(mh.m_out) + ")");
  cfg.n_in = mh.n_in;
  cfg.m_out = mh.m_out;
  cfg.hyper = mh;
}

int cmd_generate(const np::ExperimentConfig& cfg, std::string out_path,
                 const std::string& out_dir) {
  if (cfg.benchmark == np::Benchmark::External)
    throw np::ConfigError("generate needs a solver benchmark (wave|heat2d|burgers2d)");
  cfg.validate();
  if (out_path.empty()) out_path = join(out_dir, np::to_string(cfg.benchmark) + ".nps");
  std::printf("solving %s on %lld", np::to_string(cfg.benchmark).c_str(),
              static_cast<long long>(cfg.grid.nx));
  if (cfg.grid.is_2d()) std::printf("x%lld", static_cast<long long>(cfg.grid.ny));
  std::printf(" points, %lld steps of dt=%s ...\n", static_cast<long long>(cfg.grid.n_steps),
              np::format_double(cfg.grid.dt).c_str());
  std::fflush(stdout);
  const np::FieldSeries series = np::generate_series(cfg);
  np::write_series(series, out_path);
  const std::uint64_t sum = np::checksum_file(out_path);

  json manifest = base_manifest("generate", cfg);
  manifest["output"] = {{"path", out_path},
                        {"rows", series.data.rows()},
                        {"cols", series.data.cols()},
                        {"vars", series.variables},
                        {"fnv1a64", hex64(sum)}};
  write_json_file(manifest, out_path + ".json");
  std::printf("wrote %s: %lld rows x %lld cols (fnv1a64 %s)\n", out_path.c_str(),
              static_cast<long long>(series.data.rows()),
              static_cast<long long>(series.data.cols()), hex64(sum).c_str());
  return 0;
}

int cmd_train(np::ExperimentConfig cfg, const std::string& data_path, std::string model_out,
              std::string history_out, std::string summary_out, const std::string& out_dir) {
  cfg.validate();
  if (model_out.empty()) model_out = join(out_dir, "model.npm");
  if (history_out.empty()) history_out = join(out_dir, "history.csv");
  if (summary_out.empty()) summary_out = join(out_dir, "summary.json");

  const np::FieldSeries series = np::read_series(data_path);
  const np::SampleSet set = np::make_sample_set(series, cfg);
  const auto train_idx = set.indices_with(np::SplitTag::Train);
  const auto test_idx = set.indices_with(np::SplitTag::Test);
  std::printf("dataset %s: %lld rows x %lld cols -> %zu samples (%zu train / %zu test)\n",
              data_path.c_str(), static_cast<long long>(series.data.rows()),
              static_cast<long long>(series.data.cols()), set.samples.size(), train_idx.size(),
              test_idx.size());
  std::printf("model: d=%lld, n_in=%lld, m_out=%lld, %lld parameters\n",
              static_cast<long long>(cfg.hyper.d), static_cast<long long>(cfg.hyper.n_in),
              static_cast<long long>(cfg.hyper.m_out),
              static_cast<long long>(np::param_count(cfg.hyper)));
  std::fflush(stdout);

  const np::ModelParams initial = np::init_params(cfg.hyper, cfg.seed);
  const np::TrainResult result =
      np::train(initial, set, cfg.train, [&](np::Index epoch, const np::TrainHistory& h) {
        std::printf("epoch %3lld/%lld  train %.6e  val %.6e  (%.1fs)\n",
                    static_cast<long long>(epoch + 1), static_cast<long long>(cfg.train.epochs),
                    h.train_mse.back(), h.val_mse.back(), h.seconds.back());
        std::fflush(stdout);
      });
  const double test_mse = np::evaluate(result.params, set, result.normalizer);

  np::save_model(result.params, model_out);
  np::TrainHistory history = result.history;
  history.final_test_mse = test_mse;
  np::write_history_csv(history, history_out);

  double best_val = history.val_mse.empty() ? 0.0 : history.val_mse[0];
  for (double v : history.val_mse) best_val = std::min(best_val, v);

  json summary = base_manifest("train", cfg);
  summary["data"] = {{"path", data_path}, {"fnv1a64", hex64(np::checksum_file(data_path))}};
  summary["samples"] = {{"total", set.samples.size()},
                        {"train", train_idx.size()},
                        {"test", test_idx.size()}};
  summary["param_count"] = np::param_count(cfg.hyper);
  summary["best_val_mse"] = best_val;
  summary["final_test_mse"] = test_mse;
  summary["model"] = {{"path", model_out}, {"fnv1a64", hex64(np::checksum_file(model_out))}};
  summary["history_path"] = history_out;
  write_json_file(summary, summary_out);

  std::printf("final test MSE %.6e\n", test_mse);
  std::printf("wrote %s, %s, %s\n", model_out.c_str(), history_out.c_str(), summary_out.c_str());
  return 0;
}

int cmd_evaluate(np::ExperimentConfig cfg, const std::string& data_path,
                 const std::string& model_path, std::string report_out,
                 const std::string& out_dir, bool n_in_set, bool m_out_set) {
  if (report_out.empty()) report_out = join(out_dir, "eval.json");
  const np::ModelParams params = np::load_model(model_path);
  reconcile_window(cfg, params.hyper, n_in_set, m_out_set);
  cfg.validate();
  const np::FieldSeries series = np::read_series(data_path);
  const np::SampleSet set = np::make_sample_set(series, cfg);
  const np::Normalizer norm = resolve_normalizer(cfg, series);
  const np::EvalReport rep = np::evaluate_report(params, set, norm);

  std::printf("test MSE %.6e over %lld samples\n", rep.mse,
              static_cast<long long>(rep.n_samples));
  for (std::size_t v = 0; v < rep.per_var_mse.size(); ++v) {
    const std::string name =
        v < series.variables.size() ? series.variables[v] : "var" + std::to_string(v);
    std::printf("  %-8s MSE %.6e  max |err| %.6e\n", name.c_str(), rep.per_var_mse[v],
                rep.per_var_max_abs[v]);
  }
  std::printf("  per-step MSE:");
  for (double v : rep.per_step_mse) std::printf(" %.3e", v);
  std::printf("\n");

  json report = base_manifest("evaluate", cfg);
  report["data"] = {{"path", data_path}, {"fnv1a64", hex64(np::checksum_file(data_path))}};
  report["model"] = {{"path", model_path}, {"fnv1a64", hex64(np::checksum_file(model_path))}};
  report["n_samples"] = rep.n_samples;
  report["mse"] = rep.mse;
  report["per_var"] = json::array();
  for (std::size_t v = 0; v < rep.per_var_mse.size(); ++v)
    report["per_var"].push_back(
        {{"name", v < series.variables.size() ? series.variables[v] : "var" + std::to_string(v)},
         {"mse", rep.per_var_mse[v]},
         {"max_abs_err", rep.per_var_max_abs[v]}});
  report["per_step_mse"] = rep.per_step_mse;
  write_json_file(report, report_out);
  std::printf("wrote %s\n", report_out.c_str());
  return 0;
}

int cmd_predict(np::ExperimentConfig cfg, const std::string& data_path,
                const std::string& model_path, long long start, std::string out_path,
                const std::string& out_dir, bool n_in_set, bool m_out_set) {
  if (out_path.empty()) out_path = join(out_dir, "prediction.csv");
  const np::ModelParams params = np::load_model(model_path);
  reconcile_window(cfg, params.hyper, n_in_set, m_out_set);
  const np::FieldSeries series = np::read_series(data_path);
  const np::Matrix matrix = np::assemble_matrix(series);
  if (start < 0) start = matrix.cols() - cfg.n_in - cfg.m_out;  // last full window
  if (start < 0 || start + cfg.n_in > matrix.cols())
    throw np::DataError("predict: window start " + std::to_string(start) +
                        " does not fit a series with " + std::to_string(matrix.cols()) +
                        " columns (n_in=" + std::to_string(cfg.n_in) + ")");
  const np::Normalizer norm = resolve_normalizer(cfg, series);
  const np::Matrix pred =
      np::predict(params, matrix.middleCols(start, cfg.n_in), norm);
  np::export_matrix_csv(pred, out_path);
  std::printf("predicted %lld x %lld block from t-index %lld; wrote %s\n",
              static_cast<long long>(pred.rows()), static_cast<long long>(pred.cols()),
              start, out_path.c_str());
  if (start + cfg.n_in + cfg.m_out <= matrix.cols()) {
    const np::Matrix target = matrix.middleCols(start + cfg.n_in, cfg.m_out);
    std::printf("window MSE vs ground truth: %.6e\n", np::mse_loss(pred, target));
  }
  return 0;
}

int cmd_rollout(np::ExperimentConfig cfg, const std::string& data_path,
                const std::string& model_path, long long start, long long horizon,
                std::string out_path, const std::string& out_dir, bool n_in_set, bool m_out_set) {
  if (out_path.empty()) out_path = join(out_dir, "rollout.csv");
  const np::ModelParams params = np::load_model(model_path);
  reconcile_window(cfg, params.hyper, n_in_set, m_out_set);
  const np::FieldSeries series = np::read_series(data_path);
  const np::Matrix matrix = np::assemble_matrix(series);
  if (start < 0 || start + cfg.n_in > matrix.cols())
    throw np::DataError("rollout: seed window start " + std::to_string(start) +
                        " does not fit a series with " + std::to_string(matrix.cols()) +
                        " columns (n_in=" + std::to_string(cfg.n_in) + ")");
  const np::Normalizer norm = resolve_normalizer(cfg, series);
  const np::Matrix out =
      np::rollout(params, matrix.middleCols(start, cfg.n_in), horizon, norm);
  np::export_matrix_csv(out, out_path);

  json meta = base_manifest("rollout", cfg);
  meta["experimental"] = true;  // autoregressive chaining is untrained behavior
  meta["start"] = start;
  meta["horizon"] = horizon;
  meta["output"] = {{"path", out_path}, {"fnv1a64", hex64(np::checksum_file(out_path))}};
  const long long avail = matrix.cols() - start - cfg.n_in;
  if (avail > 0) {
    const long long cmp = std::min(horizon, avail);
    const np::Matrix truth = matrix.middleCols(start + cfg.n_in, cmp);
    const double mse = np::mse_loss(out.leftCols(cmp), truth);
    meta["mse_vs_truth"] = {{"steps", cmp}, {"mse", mse}};
    std::printf("rollout MSE vs ground truth over %lld steps: %.6e\n", cmp, mse);
  }
  write_json_file(meta, out_path + ".json");
  std::printf("wrote %s (experimental; see %s.json)\n", out_path.c_str(), out_path.c_str());
  return 0;
}

int cmd_plot(np::ExperimentConfig cfg, const std::string& data_path,
             const std::string& model_path, const std::string& history_path, long long start,
             const std::string& out_dir, bool n_in_set, bool m_out_set) {
  bool wrote_any = false;
  if (!data_path.empty()) {
    const np::FieldSeries series = np::read_series(data_path);
    const np::Matrix matrix = np::assemble_matrix(series);
    if (model_path.empty()) {
      const std::string p = join(out_dir, "series.pgm");
      np::write_pgm(matrix, p);
      std::printf("wrote %s (%lld x %lld overview)\n", p.c_str(),
                  static_cast<long long>(matrix.cols()), static_cast<long long>(matrix.rows()));
    } else {
      const np::ModelParams params = np::load_model(model_path);
      reconcile_window(cfg, params.hyper, n_in_set, m_out_set);
      if (start < 0) start = matrix.cols() - cfg.n_in - cfg.m_out;
      if (start < 0 || start + cfg.n_in + cfg.m_out > matrix.cols())
        throw np::DataError("plot: window start " + std::to_string(start) +
                            " does not fit the series");
      const np::Normalizer norm = resolve_normalizer(cfg, series);
      const np::Matrix exact = matrix.middleCols(start + cfg.n_in, cfg.m_out);
      const np::Matrix pred =
          np::predict(params, matrix.middleCols(start, cfg.n_in), norm);
      const double lo = std::min(exact.minCoeff(), pred.minCoeff());
      const double hi = std::max(exact.maxCoeff(), pred.maxCoeff());
      np::write_pgm(exact, join(out_dir, "exact.pgm"), lo, hi);
      np::write_pgm(pred, join(out_dir, "predicted.pgm"), lo, hi);
      np::write_ppm_diverging(exact, join(out_dir, "exact.ppm"), lo, hi);
      np::write_ppm_diverging(pred, join(out_dir, "predicted.ppm"), lo, hi);
      np::write_error_pgm(pred - exact, join(out_dir, "error.pgm"));
      np::write_error_ppm(pred - exact, join(out_dir, "error.ppm"));
      std::printf("wrote exact/predicted/error images (%lld x %lld) to %s\n",
                  static_cast<long long>(cfg.m_out), static_cast<long long>(exact.rows()),
                  out_dir.c_str());
    }
    wrote_any = true;
  }
  if (!history_path.empty()) {
    std::ifstream in(history_path);
    if (!in) throw np::DataError("cannot open for reading: " + history_path);
    const std::string out_csv = join(out_dir, "loss_curve.csv");
    std::ofstream out(out_csv);
    if (!out) throw np::DataError("cannot open for writing: " + out_csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("epoch,train_mse,val_mse", 0) != 0)
      throw np::DataError("history file lacks the expected header: " + history_path);
    out << "epoch,train_mse,val_mse\n";
    std::size_t rows = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      // epoch,train,val,seconds -> drop the timing column
      const auto a = line.find(','), b = line.find(',', a + 1), c = line.find(',', b + 1);
      if (a == std::string::npos || b == std::string::npos || c == std::string::npos)
        throw np::DataError("malformed history row: " + line);
      out << line.substr(0, c) << "\n";
      ++rows;
    }
    if (!out) throw np::DataError("short write: " + out_csv);
    std::printf("wrote %s (%zu epochs)\n", out_csv.c_str(), rows);
    wrote_any = true;
  }
  if (!wrote_any) throw np::ConfigError("plot: pass --data and/or --history");
  return 0;
}

int run(int argc, char** argv) {
  // Pass 1: resolve the benchmark so its preset becomes the defaults the real
  // parse starts from.
  np::Benchmark bench = np::Benchmark::Wave;
  {
    CLI::App pre;
    pre.allow_extras();
    pre.set_config("--config");
    std::string bm = "wave";
    pre.add_option("--benchmark", bm);
    try {
      pre.parse(argc, argv);
      bench = np::benchmark_from_string(bm);
    } catch (...) {
      // the real parse below reports problems
    }
  }

  np::ExperimentConfig cfg = np::preset_config(bench);
  std::string benchmark_str = np::to_string(cfg.benchmark);
  std::string normalizer_str = np::to_string(cfg.train.normalizer);
  std::string out_dir = ".";
  std::uint64_t seed = 0;

  CLI::App app{"Benchmark PDE data generation and sequence-model training"};
  app.set_config("--config", "", "flat key=value config file; flags override it");
  app.require_subcommand(1);

  app.add_option("--benchmark", benchmark_str, "wave|heat2d|burgers2d|external")
      ->check(CLI::IsMember({"wave", "heat2d", "burgers2d", "external"}))
      ->capture_default_str();
  app.add_option("--external-path", cfg.external_path, "dataset path for --benchmark external");
  app.add_option("--nx", cfg.grid.nx)->capture_default_str();
  app.add_option("--ny", cfg.grid.ny, "0 for 1D")->capture_default_str();
  app.add_option("--x-min", cfg.grid.x_min)->capture_default_str();
  app.add_option("--x-max", cfg.grid.x_max)->capture_default_str();
  app.add_option("--y-min", cfg.grid.y_min)->capture_default_str();
  app.add_option("--y-max", cfg.grid.y_max)->capture_default_str();
  app.add_option("--dt", cfg.grid.dt)->capture_default_str();
  app.add_option("--steps", cfg.grid.n_steps, "number of recorded timesteps")
      ->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "heat diffusivity")->capture_default_str();
  app.add_flag("--burgers-as-written", cfg.burgers_as_written,
               "duplicate the u fluxes in the v equation");
  auto* opt_n_in = app.add_option("--n-in", cfg.n_in, "input window length")
                       ->capture_default_str();
  auto* opt_m_out = app.add_option("--m-out", cfg.m_out, "predicted window length")
                        ->capture_default_str();
  app.add_option("--stride", cfg.stride, "window stride")->capture_default_str();
  app.add_option("--train-fraction", cfg.train_fraction)->capture_default_str();
  app.add_option("--seed", seed, "global RNG seed")
      ->envname("NEURALPDE_SEED")
      ->capture_default_str();
  app.add_option("--normalizer", normalizer_str, "identity|sigmoid|minmax")
      ->check(CLI::IsMember({"identity", "sigmoid", "minmax"}))
      ->capture_default_str();
  app.add_option("--noise-sigma", cfg.train.noise_sigma, "stddev of input noise during training")
      ->capture_default_str();
  app.add_option("--d", cfg.hyper.d, "LSTM hidden size")->capture_default_str();
  app.add_flag("--dense-peephole", cfg.hyper.dense_peephole, "full-matrix peepholes");
  app.add_option("--epochs", cfg.train.epochs)->capture_default_str();
  app.add_option("--batch-size", cfg.train.batch_size)->capture_default_str();
  app.add_option("--lr", cfg.train.lr)->capture_default_str();
  app.add_option("--validation-fraction", cfg.train.validation_fraction)->capture_default_str();
  app.add_option("--clip-grad", cfg.train.clip_grad, "global-norm gradient clip; 0 = off")
      ->capture_default_str();
  app.add_option("--out-dir", out_dir)->capture_default_str();

  std::string data_path, model_path, history_path;
  std::string gen_out, model_out, history_out, summary_out, report_out, pred_out, rollout_out;
  long long start = -1, rollout_start = 0, horizon = 50;

  CLI::App* c_gen = app.add_subcommand("generate", "solve a benchmark PDE and write .nps");
  c_gen->add_option("--out", gen_out, "output .nps path (default <out-dir>/<benchmark>.nps)");

  CLI::App* c_train = app.add_subcommand("train", "train on a .nps dataset");
  c_train->add_option("--data", data_path, ".nps dataset")->required();
  c_train->add_option("--model-out", model_out, "default <out-dir>/model.npm");
  c_train->add_option("--history-out", history_out, "default <out-dir>/history.csv");
  c_train->add_option("--summary-out", summary_out, "default <out-dir>/summary.json");

  CLI::App* c_eval = app.add_subcommand("evaluate", "test-set metrics for a trained model");
  c_eval->add_option("--data", data_path, ".nps dataset")->required();
  c_eval->add_option("--model", model_path, ".npm model")->required();
  c_eval->add_option("--report-out", report_out, "default <out-dir>/eval.json");

  CLI::App* c_pred = app.add_subcommand("predict", "one-window prediction to CSV");
  c_pred->add_option("--data", data_path, ".nps dataset")->required();
  c_pred->add_option("--model", model_path, ".npm model")->required();
  c_pred->add_option("--start", start, "window start column (default: last full window)");
  c_pred->add_option("--out", pred_out, "default <out-dir>/prediction.csv");

  CLI::App* c_roll = app.add_subcommand("rollout", "autoregressive multi-window prediction");
  c_roll->add_option("--data", data_path, ".nps dataset")->required();
  c_roll->add_option("--model", model_path, ".npm model")->required();
  c_roll->add_option("--start", rollout_start, "seed window start column")->capture_default_str();
  c_roll->add_option("--horizon", horizon, "steps to generate")->capture_default_str();
  c_roll->add_option("--out", rollout_out, "default <out-dir>/rollout.csv");

  CLI::App* c_plot = app.add_subcommand("plot", "PGM/PPM heatmaps and loss-curve CSV");
  c_plot->add_option("--data", data_path, ".nps dataset");
  c_plot->add_option("--model", model_path, ".npm model (enables predicted/error maps)");
  c_plot->add_option("--history", history_path, "history.csv from train");
  c_plot->add_option("--start", start, "window start column (default: last full window)");

  for (CLI::App* sub : {c_gen, c_train, c_eval, c_pred, c_roll, c_plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // parse problems are config errors
  }

  cfg.benchmark = np::benchmark_from_string(benchmark_str);
  if (cfg.benchmark != bench)
    throw np::ConfigError("benchmark could not be resolved consistently; pass --benchmark "
                          "before other flags or via --config");
  cfg.train.normalizer = np::norm_kind_from_string(normalizer_str);
  cfg.seed = seed;
  cfg.train.seed = seed;
  cfg.hyper.n_in = cfg.n_in;
  cfg.hyper.m_out = cfg.m_out;

  fs::create_directories(out_dir);
  const bool n_in_set = opt_n_in->count() > 0, m_out_set = opt_m_out->count() > 0;

  if (c_gen->parsed()) return cmd_generate(cfg, gen_out, out_dir);
  if (c_train->parsed())
    return cmd_train(cfg, data_path, model_out, history_out, summary_out, out_dir);
  if (c_eval->parsed())
    return cmd_evaluate(cfg, data_path, model_path, report_out, out_dir, n_in_set, m_out_set);
  if (c_pred->parsed())
    return cmd_predict(cfg, data_path, model_path, start, pred_out, out_dir, n_in_set, m_out_set);
  if (c_roll->parsed())
    return cmd_rollout(cfg, data_path, model_path, rollout_start, horizon, rollout_out, out_dir,
                       n_in_set, m_out_set);
  if (c_plot->parsed())
    return cmd_plot(cfg, data_path, model_path, history_path, start, out_dir, n_in_set,
                    m_out_set);
  throw np::ConfigError("no command given");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const np::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const np::StabilityError& e) {
    std::fprintf(stderr, "stability error: %s\n", e.what());
    return 2;
  } catch (const np::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const np::NumericError& e) {
    std::fprintf(stderr, "numeric error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
