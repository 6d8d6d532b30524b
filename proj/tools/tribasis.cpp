// tribasis: fit, predict, evaluate and benchmark function-to-function
// regressors from the command line.
//
// Exit status: 0 success, 1 user error (bad flags, unreadable or invalid
// input), 2 internal error.

#include <chrono>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tribasis/tribasis.hpp"

namespace {

using namespace tribasis;
using nlohmann::json;

struct UserError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::filesystem::path existing(const std::string& path, const char* what) {
  if (path.empty()) throw UserError(std::string("missing ") + what + " path");
  if (!std::filesystem::is_regular_file(path)) throw UserError(std::string(what) + " not found: " + path);
  return path;
}

std::ofstream create(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UserError("cannot write " + path);
  return out;
}

void emit(const json& doc, const std::string& path) {
  if (path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    create(path) << doc.dump(2) << '\n';
  }
}

std::vector<double> radius_grid(int max_radius) {
  std::vector<double> g;
  for (int t = 1; t <= max_radius; ++t) g.push_back(t);
  return g;
}

struct ModelFlags {
  std::optional<double> sigma;
  std::optional<double> lambda;
  std::optional<int> features;
  std::optional<double> radius_in;
  std::optional<double> radius_out;
  std::optional<double> bandwidth;
  int folds = 5;
  int max_radius = 12;
  std::uint64_t seed = 0;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--seed", f.seed, "Seed for features and CV splits");
  cmd->add_option("--sigma", f.sigma, "RBF bandwidth (default: CV over a median-distance grid)");
  cmd->add_option("--lambda", f.lambda, "Ridge penalty, 0 for OLS (default: CV)");
  cmd->add_option("--features", f.features, "Number of random features D (default ceil(n ln n))");
  cmd->add_option("--radius-in", f.radius_in, "Input index-set radius (default: CV)");
  cmd->add_option("--radius-out", f.radius_out, "Output index-set radius (default: CV)");
  cmd->add_option("--folds", f.folds, "Folds for truncation CV")->check(CLI::Range(2, 1000));
  cmd->add_option("--max-radius", f.max_radius, "Largest radius tried by truncation CV")->check(CLI::Range(1, 1000));
}

int run_fit(const std::string& data_path, const std::string& model_path, const std::string& method,
            const ModelFlags& f) {
  const auto pairs = read_dataset(existing(data_path, "dataset"));
  double t_in = 0, t_out = 0;
  if (f.radius_in && f.radius_out) {
    t_in = *f.radius_in;
    t_out = *f.radius_out;
  } else {
    const auto sel = select_index_sets(pairs, radius_grid(f.max_radius), f.folds);
    t_in = f.radius_in.value_or(sel.input_radius);
    t_out = f.radius_out.value_or(sel.output_radius);
  }
  const auto u = enumerate_ball(pairs.front().input.dimension(), t_in);
  const auto v = enumerate_ball(pairs.front().output.dimension(), t_out);
  const ProjectedDataset data = project_dataset(pairs, u, v);
  const std::uint64_t cv_seed = derive_seed(f.seed, 3);

  json summary{{"method", method}, {"N", pairs.size()}, {"s", u->size()}, {"r", v->size()},
               {"radius_in", t_in}, {"radius_out", t_out}, {"seed", f.seed}};
  if (method == "3be") {
    double points = 0;
    for (const auto& p : pairs) points += static_cast<double>(p.input.size());
    const int d = f.features.value_or(default_feature_count(points / static_cast<double>(pairs.size())));
    double sigma = f.sigma.value_or(0.0), lambda = f.lambda.value_or(0.0);
    if (!f.sigma || !f.lambda) {
      RidgeSearch search{{}, {}, d, cv_seed, 0.2};
      if (f.sigma) search.sigmas = {*f.sigma};
      if (f.lambda) search.lambdas = {*f.lambda};
      const auto best = tune_ridge(data, search);
      sigma = best.sigma;
      lambda = best.lambda;
    }
    const Model3BE model = fit_projected(data, sample_feature_map(static_cast<int>(u->size()), d, sigma, cv_seed), lambda);
    save_model(model, std::filesystem::path(model_path));
    summary.update({{"D", d}, {"sigma", sigma}, {"lambda", lambda}});
  } else if (method == "lse") {
    std::vector<double> grid;
    if (f.bandwidth) grid = {*f.bandwidth};
    const auto best = tune_bandwidth(data, grid, cv_seed);
    save_model(lse_fit_projected(data, best.bandwidth), std::filesystem::path(model_path));
    summary["bandwidth"] = best.bandwidth;
  } else {
    throw UserError("unknown method '" + method + "' (known: 3be, lse)");
  }
  std::cerr << summary.dump() << '\n';
  return 0;
}

CoefficientVector predict_any(const AnyModel& model, const FunctionObservation& x) {
  if (const auto* m = std::get_if<Model3BE>(&model)) return predict_coeffs(*m, x);
  return lse_predict(std::get<LseModel>(model), x);
}

const IndexSetPtr& output_set(const AnyModel& model) {
  if (const auto* m = std::get_if<Model3BE>(&model)) return m->output_index_set;
  return std::get<LseModel>(model).output_index_set;
}

int run_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path, int grid) {
  const AnyModel model = load_any_model(existing(model_path, "model"));
  std::ifstream in(existing(data_path, "input file"));
  const auto inputs = read_inputs(in);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file = create(out_path);
    out = &file;
  }
  const PointMatrix points = grid > 0 ? window_grid(grid) : PointMatrix();
  for (const auto& x : inputs) {
    const CoefficientVector c = predict_any(model, x);
    json line{{"coefficients", std::vector<double>(c.coefficients().data(), c.coefficients().data() + c.size())}};
    if (grid > 0) {
      if (c.dimension() != 1) throw UserError("--grid is only available for one-dimensional outputs");
      const Eigen::VectorXd v = evaluate_at(c, points);
      line["grid"] = std::vector<double>(points.data(), points.data() + points.size());
      line["values"] = std::vector<double>(v.data(), v.data() + v.size());
    }
    *out << line.dump() << '\n';
  }
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path, const std::string& report, int quad) {
  const AnyModel model = load_any_model(existing(model_path, "model"));
  const auto pairs = read_dataset(existing(data_path, "dataset"));
  std::vector<CoefficientVector> predictions, truth;
  std::vector<double> times;
  for (const auto& p : pairs) {
    const auto start = std::chrono::steady_clock::now();
    predictions.push_back(predict_any(model, p.input));
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    truth.push_back(project(p.output, output_set(model)));
  }
  std::sort(times.begin(), times.end());
  emit({{"method", std::holds_alternative<Model3BE>(model) ? "3be" : "lse"},
        {"count", pairs.size()},
        {"mse", function_mse(predictions, truth, quad)},
        {"mpt", times[times.size() / 2]}},
       report);
  return 0;
}

int run_synth(const std::string& data_path, const SyntheticConfig& cfg, int anchors, double sigma, double radius_out,
              const std::string& truth_path) {
  if (data_path.empty()) throw UserError("synth needs --data for the output file");
  const MappingSpec mapping = make_mapping(cfg, anchors, radius_out, sigma, derive_seed(cfg.seed, 1));
  SyntheticConfig data_cfg = cfg;
  data_cfg.seed = derive_seed(cfg.seed, 2);
  const SyntheticDataset data = generate_dataset(data_cfg, mapping);
  auto out = create(data_path);
  write_dataset(out, data.pairs);
  if (!truth_path.empty()) {
    auto t = create(truth_path);
    for (const auto& q : data.true_outputs)
      t << json{{"indices", q.index_set().indices()},
                {"coefficients", std::vector<double>(q.coefficients().data(), q.coefficients().data() + q.size())}}
               .dump()
        << '\n';
  }
  return 0;
}

int run_window(const std::string& data_path, const std::string& companion, const std::string& out_path,
               const SeriesWindowing& w) {
  if (out_path.empty()) throw UserError("window needs --out for the pair file");
  const auto series = read_series(existing(data_path, "series"));
  const WindowedSeries ws = w.mode == WindowMode::forward
                                ? window_series(series, w)
                                : window_series(series, read_series(existing(companion, "companion series")), w);
  auto out = create(out_path);
  write_dataset(out, ws.pairs);
  std::cout << json{{"pairs", ws.pairs.size()},
                    {"input_transform", {{"offset", ws.input_transform.offset}, {"scale", ws.input_transform.scale}}},
                    {"output_transform", {{"offset", ws.output_transform.offset}, {"scale", ws.output_transform.scale}}}}
                   .dump()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triple-basis estimator for function-to-function regression"};
  app.require_subcommand(1);

  std::string data, model, report, out, method = "3be", config, companion, task, mode = "forward";
  ModelFlags mf;
  int grid = 0, quad = 1024;

  auto* fit = app.add_subcommand("fit", "Fit a model to a JSON-lines pair dataset");
  fit->add_option("--data", data, "Training pairs (JSON lines)")->required();
  fit->add_option("--model", model, "Output model file")->required();
  fit->add_option("--method", method, "3be or lse")->check(CLI::IsMember({"3be", "lse"}));
  fit->add_option("--bandwidth", mf.bandwidth, "LSE bandwidth (default: CV)");
  add_model_flags(fit, mf);

  auto* predict = app.add_subcommand("predict", "Predict output coefficients for input observations");
  predict->add_option("--model", model, "Model file")->required();
  predict->add_option("--data", data, "Inputs (JSON lines with an 'input' field)")->required();
  predict->add_option("--out", out, "Output file (default stdout)");
  predict->add_option("--grid", grid, "Also evaluate each prediction on this many grid points (d = 1)");

  auto* eval = app.add_subcommand("eval", "Function-space MSE of a model on held-out pairs");
  eval->add_option("--model", model, "Model file")->required();
  eval->add_option("--data", data, "Held-out pairs (JSON lines)")->required();
  eval->add_option("--report", report, "Write the result here instead of stdout");
  eval->add_option("--quadrature", quad, "Midpoint nodes per axis")->check(CLI::PositiveNumber);

  BenchmarkConfig bc;
  std::vector<std::string> methods;
  std::optional<int> n_train, n_points, test_count, window, stride;
  std::optional<std::uint64_t> bench_seed;
  std::string series_path;
  auto* bench = app.add_subcommand("bench", "Run the benchmark harness and write a report");
  bench->add_option("--config", config, "JSON config (the 'config' block of a report)");
  bench->add_option("--task", task, "synthetic or series")->check(CLI::IsMember({"synthetic", "series"}));
  bench->add_option("--methods", methods, "Methods to run: 3be, lse, mean");
  bench->add_option("--seed", bench_seed, "Seed for data, features and CV");
  bench->add_option("--N", n_train, "Training instances (synthetic)");
  bench->add_option("--n", n_points, "Points per function (synthetic)");
  bench->add_option("--test-count", test_count, "Test instances (synthetic)");
  bench->add_option("--data", series_path, "Series file (series task)");
  bench->add_option("--companion", companion, "Output series for co-occurring mode");
  bench->add_option("--window", window, "Window length w (series task)");
  bench->add_option("--stride", stride, "Window stride (default w)");
  bench->add_option("--mode", mode, "forward or co-occurring")->check(CLI::IsMember({"forward", "co-occurring"}));
  bench->add_option("--sigma", mf.sigma, "Fix the RBF bandwidth");
  bench->add_option("--lambda", mf.lambda, "Fix the ridge penalty");
  bench->add_option("--features", mf.features, "Number of random features D");
  bench->add_option("--radius-in", mf.radius_in, "Input index-set radius");
  bench->add_option("--radius-out", mf.radius_out, "Output index-set radius");
  bench->add_option("--folds", mf.folds, "Folds for truncation CV")->check(CLI::Range(2, 1000));
  bench->add_option("--report", report, "Report file (default stdout)");

  SyntheticConfig sc;
  int anchors = 25;
  double map_sigma = 1.0, radius_out = 4.0;
  std::string truth;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic pair dataset");
  synth->add_option("--data", data, "Output file (JSON lines)")->required();
  synth->add_option("--seed", sc.seed, "Seed");
  synth->add_option("--N", sc.instance_count, "Number of pairs")->check(CLI::PositiveNumber);
  synth->add_option("--n", sc.points_per_function, "Points per function")->check(CLI::PositiveNumber);
  synth->add_option("--noise", sc.noise_sd, "Noise standard deviation")->check(CLI::NonNegativeNumber);
  synth->add_option("--anchors", anchors, "Anchor functions in the mapping")->check(CLI::PositiveNumber);
  synth->add_option("--sigma", map_sigma, "Mapping kernel bandwidth")->check(CLI::PositiveNumber);
  synth->add_option("--radius-out", radius_out, "Output support radius of the mapping");
  synth->add_option("--truth", truth, "Also write true output coefficients (JSON lines)");

  SeriesWindowing wopt;
  auto* win = app.add_subcommand("window", "Window a scalar series into observation pairs");
  win->add_option("--data", data, "Series file, one value per line")->required();
  win->add_option("--companion", companion, "Output series for co-occurring mode");
  win->add_option("--out", out, "Output pair file (JSON lines)")->required();
  win->add_option("--window", wopt.window_length, "Window length w")->check(CLI::Range(2, 1 << 30));
  win->add_option("--stride", stride, "Stride (default w)");
  win->add_option("--mode", mode, "forward or co-occurring")->check(CLI::IsMember({"forward", "co-occurring"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*fit) return run_fit(data, model, method, mf);
    if (*predict) return run_predict(model, data, out, grid);
    if (*eval) return run_eval(model, data, report, quad);
    if (*synth) return run_synth(data, sc, anchors, map_sigma, radius_out, truth);
    if (*win) {
      wopt.mode = window_mode_from_string(mode);
      wopt.stride = stride.value_or(wopt.window_length);
      return run_window(data, companion, out, wopt);
    }
    if (*bench) {
      if (!config.empty()) {
        std::ifstream in(existing(config, "config"));
        json j;
        try {
          j = json::parse(in);
        } catch (const json::exception& e) {
          throw UserError(std::string("config: ") + e.what());
        }
        bc = benchmark_config_from_json(j.contains("config") ? j.at("config") : j);
      }
      if (!task.empty()) bc.task = task;
      if (!methods.empty()) bc.methods = methods;
      if (bench_seed) bc.seed = *bench_seed;
      if (n_train) bc.synthetic.instance_count = *n_train;
      if (n_points) bc.synthetic.points_per_function = *n_points;
      if (test_count) bc.test_count = *test_count;
      if (!series_path.empty()) {
        bc.series_path = series_path;
        bc.series = read_series(existing(series_path, "series"));
        if (task.empty()) bc.task = "series";
      }
      if (!companion.empty()) {
        bc.companion_path = companion;
        bc.companion = read_series(existing(companion, "companion series"));
      }
      if (window) bc.windowing.window_length = *window;
      if (window || stride) bc.windowing.stride = stride.value_or(bc.windowing.window_length);
      if (bench->count("--mode")) bc.windowing.mode = window_mode_from_string(mode);
      if (mf.sigma) bc.sigmas = {*mf.sigma};
      if (mf.lambda) bc.lambdas = {*mf.lambda};
      if (mf.features) bc.feature_count = mf.features;
      if (mf.radius_in) bc.radius_in = mf.radius_in;
      if (mf.radius_out) bc.radius_out = mf.radius_out;
      if (bench->count("--folds")) bc.folds = mf.folds;
      emit(to_json(run_benchmark(bc).report), report);
      return 0;
    }
  } catch (const UserError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DatasetError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ModelFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const IllConditionedError& e) {
    std::cerr << "error: " << e.what() << " (try a positive --lambda)\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
