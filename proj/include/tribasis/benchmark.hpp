#pragma once

// Benchmark harness: fits the requested estimators, scores function-space
// MSE on held-out pairs and times predictions. The report layout is in
// docs/report_format.md.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "tribasis/basis.hpp"
#include "tribasis/dataset_io.hpp"
#include "tribasis/features.hpp"
#include "tribasis/lse.hpp"
#include "tribasis/regress.hpp"
#include "tribasis/synth.hpp"
#include "tribasis/windowing.hpp"

namespace tribasis {

inline constexpr const char* kReportSchema = "tribasis-benchmark-report";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kMaxDefaultFeatures = 20000;

inline const std::vector<std::string>& known_methods() {
  static const std::vector<std::string> names{"3be", "lse", "mean"};
  return names;
}

/// D = ceil(n ln n), at least 1 and at most kMaxDefaultFeatures.
inline int default_feature_count(double points_per_function) {
  const double n = std::max(points_per_function, 2.0);
  return static_cast<int>(std::clamp(std::ceil(n * std::log(n)), 1.0, static_cast<double>(kMaxDefaultFeatures)));
}

struct BenchmarkConfig {
  std::string task = "synthetic";  // or "series"
  std::vector<std::string> methods = known_methods();
  std::uint64_t seed = 0;

  // synthetic: synthetic.instance_count training pairs plus test_count test pairs
  SyntheticConfig synthetic;
  int test_count = 200;
  int anchor_count = 25;
  double mapping_sigma = 1.0;
  double mapping_output_radius = 4.0;

  // series: chronological split, the last test_fraction of windows for testing
  std::vector<double> series;
  std::vector<double> companion;  // co-occurring mode only
  std::string series_path;
  std::string companion_path;
  SeriesWindowing windowing;
  double test_fraction = 0.15;

  std::optional<int> feature_count;
  std::vector<double> sigmas;
  std::vector<double> lambdas;
  std::vector<double> bandwidths;
  std::optional<double> radius_in;
  std::optional<double> radius_out;
  std::vector<double> candidate_radii{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  int folds = 5;
  double holdout_fraction = 0.2;
  int quadrature_points = 1024;

  void validate() const {
    if (task != "synthetic" && task != "series")
      throw std::invalid_argument("unknown task '" + task + "' (known: synthetic, series)");
    if (methods.empty()) throw std::invalid_argument("no methods requested");
    for (const auto& m : methods) {
      if (std::find(known_methods().begin(), known_methods().end(), m) == known_methods().end()) {
        std::string list;
        for (const auto& k : known_methods()) list += (list.empty() ? "" : ", ") + k;
        throw std::invalid_argument("unknown method '" + m + "' (known: " + list + ")");
      }
    }
    if (task == "synthetic") {
      synthetic.validate();
      if (test_count < 1) throw std::invalid_argument("test_count must be >= 1");
      if (synthetic.instance_count < 2) throw std::invalid_argument("need at least 2 training instances");
    } else {
      windowing.validate();
      if (series.empty()) throw std::invalid_argument("series task without a series");
      if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("test_fraction must lie in (0, 1)");
    }
    if (feature_count && *feature_count < 1) throw std::invalid_argument("feature count must be >= 1");
    if (folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (quadrature_points < 1) throw std::invalid_argument("quadrature_points must be >= 1");
  }
};

struct MethodRecord {
  std::string method;
  double mse = 0.0;
  double mpt = 0.0;       // seconds, median over test predictions
  double fit_time = 0.0;  // seconds, including hyperparameter search
  std::int64_t N = 0;
  double n = 0.0;  // mean points per input function
  std::int64_t s = 0;
  std::int64_t r = 0;
  std::int64_t D = 0;
  std::uint64_t seed = 0;
  nlohmann::json hyperparameters = nlohmann::json::object();
};

struct BenchmarkReport {
  nlohmann::json config;
  std::vector<MethodRecord> records;

  const MethodRecord* find(const std::string& method) const {
    for (const auto& r : records)
      if (r.method == method) return &r;
    return nullptr;
  }
};

/// Report plus what is needed to recheck it.
struct BenchmarkRun {
  BenchmarkReport report;
  std::optional<Model3BE> model;
  std::optional<LseModel> lse_model;
  std::vector<FunctionObservation> test_inputs;
  std::vector<CoefficientVector> test_truth;
};

/// Squared L2 distance between two expansions: midpoint quadrature for
/// d <= 2, exact coefficient-space distance over the union of indices above.
inline double function_l2_squared(const CoefficientVector& a, const CoefficientVector& b, int points_per_axis) {
  if (a.dimension() <= 2) return quadrature_l2_squared(a, b, points_per_axis);
  std::map<MultiIndex, double> diff;
  for (std::size_t k = 0; k < a.index_set().size(); ++k) diff[a.index_set()[k]] += a[k];
  for (std::size_t k = 0; k < b.index_set().size(); ++k) diff[b.index_set()[k]] -= b[k];
  double sum = 0.0;
  for (const auto& [alpha, c] : diff) sum += c * c;
  return sum;
}

inline double function_mse(std::span<const CoefficientVector> predictions, std::span<const CoefficientVector> truth,
                           int points_per_axis) {
  if (predictions.size() != truth.size() || truth.empty())
    throw std::invalid_argument("function_mse: need equally many (>= 1) predictions and truths");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += function_l2_squared(predictions[i], truth[i], points_per_axis);
  return sum / static_cast<double>(truth.size());
}

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

/// One untimed warm-up pass, then a timed pass. Returns the predictions of
/// the timed pass and the median time per call.
template <class Predict>
std::pair<std::vector<CoefficientVector>, double> timed_predictions(std::span<const FunctionObservation> inputs,
                                                                    Predict&& predict) {
  for (const auto& x : inputs) {
    volatile double sink = predict(x)[0];
    (void)sink;
  }
  std::vector<CoefficientVector> out;
  out.reserve(inputs.size());
  std::vector<double> times;
  times.reserve(inputs.size());
  for (const auto& x : inputs) {
    const auto start = std::chrono::steady_clock::now();
    out.push_back(predict(x));
    times.push_back(seconds_since(start));
  }
  return {std::move(out), median(std::move(times))};
}

inline double mean_points(std::span<const ObservationPair> pairs) {
  double total = 0.0;
  for (const auto& p : pairs) total += static_cast<double>(p.input.size());
  return total / static_cast<double>(pairs.size());
}

inline nlohmann::json config_to_json(const BenchmarkConfig& c) {
  nlohmann::json j;
  j["task"] = c.task;
  j["methods"] = c.methods;
  j["seed"] = c.seed;
  if (c.task == "synthetic") {
    const auto spec_json = [](const SobolevSpec& s) {
      return nlohmann::json{{"nu", s.nu}, {"gamma", s.gamma}, {"amplitude", s.amplitude}};
    };
    j["synthetic"] = {{"input_spec", spec_json(c.synthetic.input_spec)},
                      {"output_spec", spec_json(c.synthetic.output_spec)},
                      {"noise_sd", c.synthetic.noise_sd},
                      {"points_per_function", c.synthetic.points_per_function},
                      {"train_count", c.synthetic.instance_count},
                      {"test_count", c.test_count},
                      {"anchor_count", c.anchor_count},
                      {"mapping_sigma", c.mapping_sigma},
                      {"mapping_output_radius", c.mapping_output_radius}};
  } else {
    j["series"] = {{"path", c.series_path},
                   {"length", c.series.size()},
                   {"window", c.windowing.window_length},
                   {"stride", c.windowing.stride},
                   {"mode", to_string(c.windowing.mode)},
                   {"test_fraction", c.test_fraction}};
    if (!c.companion_path.empty()) j["series"]["companion_path"] = c.companion_path;
  }
  if (c.feature_count) j["features"] = *c.feature_count;
  if (!c.sigmas.empty()) j["sigmas"] = c.sigmas;
  if (!c.lambdas.empty()) j["lambdas"] = c.lambdas;
  if (!c.bandwidths.empty()) j["bandwidths"] = c.bandwidths;
  if (c.radius_in) j["radius_in"] = *c.radius_in;
  if (c.radius_out) j["radius_out"] = *c.radius_out;
  j["candidate_radii"] = c.candidate_radii;
  j["folds"] = c.folds;
  j["holdout_fraction"] = c.holdout_fraction;
  j["quadrature_points"] = c.quadrature_points;
  return j;
}

}  // namespace detail

/// Inverse of the "config" block of a report. Series files named by path are
/// read here.
inline BenchmarkConfig benchmark_config_from_json(const nlohmann::json& j) {
  BenchmarkConfig c;
  c.task = j.value("task", c.task);
  if (j.contains("methods")) c.methods = j.at("methods").get<std::vector<std::string>>();
  c.seed = j.value("seed", c.seed);
  const auto spec_from = [](const nlohmann::json& s) {
    return SobolevSpec{s.at("nu").get<std::vector<double>>(), s.at("gamma").get<std::vector<double>>(),
                       s.at("amplitude").get<double>()};
  };
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (s.contains("input_spec")) c.synthetic.input_spec = spec_from(s.at("input_spec"));
    if (s.contains("output_spec")) c.synthetic.output_spec = spec_from(s.at("output_spec"));
    c.synthetic.noise_sd = s.value("noise_sd", c.synthetic.noise_sd);
    c.synthetic.points_per_function = s.value("points_per_function", c.synthetic.points_per_function);
    c.synthetic.instance_count = s.value("train_count", c.synthetic.instance_count);
    c.test_count = s.value("test_count", c.test_count);
    c.anchor_count = s.value("anchor_count", c.anchor_count);
    c.mapping_sigma = s.value("mapping_sigma", c.mapping_sigma);
    c.mapping_output_radius = s.value("mapping_output_radius", c.mapping_output_radius);
  }
  if (j.contains("series")) {
    const auto& s = j.at("series");
    c.series_path = s.value("path", std::string());
    c.companion_path = s.value("companion_path", std::string());
    c.windowing.window_length = s.value("window", c.windowing.window_length);
    c.windowing.stride = s.value("stride", c.windowing.window_length);
    c.windowing.mode = window_mode_from_string(s.value("mode", std::string("forward")));
    c.test_fraction = s.value("test_fraction", c.test_fraction);
    if (!c.series_path.empty()) c.series = read_series(std::filesystem::path(c.series_path));
    if (!c.companion_path.empty()) c.companion = read_series(std::filesystem::path(c.companion_path));
  }
  if (j.contains("features")) c.feature_count = j.at("features").get<int>();
  if (j.contains("sigmas")) c.sigmas = j.at("sigmas").get<std::vector<double>>();
  if (j.contains("lambdas")) c.lambdas = j.at("lambdas").get<std::vector<double>>();
  if (j.contains("bandwidths")) c.bandwidths = j.at("bandwidths").get<std::vector<double>>();
  if (j.contains("radius_in")) c.radius_in = j.at("radius_in").get<double>();
  if (j.contains("radius_out")) c.radius_out = j.at("radius_out").get<double>();
  if (j.contains("candidate_radii")) c.candidate_radii = j.at("candidate_radii").get<std::vector<double>>();
  c.folds = j.value("folds", c.folds);
  c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
  c.quadrature_points = j.value("quadrature_points", c.quadrature_points);
  return c;
}

inline BenchmarkRun run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  BenchmarkRun run;
  run.report.config = detail::config_to_json(config);

  // Training pairs, test inputs and test truths over the task's own basis.
  std::vector<ObservationPair> train;
  std::vector<ObservationPair> test;
  if (config.task == "synthetic") {
    const MappingSpec mapping = make_mapping(config.synthetic, config.anchor_count, config.mapping_output_radius,
                                             config.mapping_sigma, derive_seed(config.seed, 1));
    SyntheticConfig all = config.synthetic;
    all.instance_count = config.synthetic.instance_count + config.test_count;
    all.seed = derive_seed(config.seed, 2);
    SyntheticDataset data = generate_dataset(all, mapping);
    const auto n_train = static_cast<std::ptrdiff_t>(config.synthetic.instance_count);
    train.assign(std::make_move_iterator(data.pairs.begin()), std::make_move_iterator(data.pairs.begin() + n_train));
    test.assign(std::make_move_iterator(data.pairs.begin() + n_train), std::make_move_iterator(data.pairs.end()));
    run.test_truth.assign(data.true_outputs.begin() + n_train, data.true_outputs.end());
  } else {
    WindowedSeries windows = config.windowing.mode == WindowMode::forward
                                 ? window_series(config.series, config.windowing)
                                 : window_series(config.series, config.companion, config.windowing);
    const std::size_t total = windows.pairs.size();
    if (total < 3) throw std::invalid_argument("series yields too few windows to split");
    auto n_test = static_cast<std::size_t>(std::llround(config.test_fraction * static_cast<double>(total)));
    n_test = std::clamp<std::size_t>(n_test, 1, total - 2);
    train.assign(windows.pairs.begin(), windows.pairs.end() - static_cast<std::ptrdiff_t>(n_test));
    test.assign(windows.pairs.end() - static_cast<std::ptrdiff_t>(n_test), windows.pairs.end());
  }
  for (auto& p : test) run.test_inputs.push_back(p.input);

  const auto selection_start = std::chrono::steady_clock::now();
  IndexSetPtr u, v;
  double radius_in = 0.0, radius_out = 0.0;
  if (config.radius_in && config.radius_out) {
    radius_in = *config.radius_in;
    radius_out = *config.radius_out;
  } else {
    const IndexSelection sel = select_index_sets(train, config.candidate_radii, config.folds);
    radius_in = config.radius_in.value_or(sel.input_radius);
    radius_out = config.radius_out.value_or(sel.output_radius);
  }
  u = enumerate_ball(train.front().input.dimension(), radius_in);
  v = enumerate_ball(train.front().output.dimension(), radius_out);
  const ProjectedDataset data = project_dataset(train, u, v);
  const double shared_fit_time = detail::seconds_since(selection_start);

  if (config.task == "series")
    for (const auto& p : test) run.test_truth.push_back(project(p.output, v));

  const double n = detail::mean_points(train);
  const int feature_count = config.feature_count.value_or(default_feature_count(n));
  const std::uint64_t cv_seed = derive_seed(config.seed, 3);

  for (const auto& method : config.methods) {
    MethodRecord rec;
    rec.method = method;
    rec.N = static_cast<std::int64_t>(train.size());
    rec.n = n;
    rec.s = static_cast<std::int64_t>(u->size());
    rec.r = static_cast<std::int64_t>(v->size());
    rec.seed = config.seed;
    rec.hyperparameters = {{"radius_in", radius_in}, {"radius_out", radius_out}};
    std::vector<CoefficientVector> predictions;

    const auto fit_start = std::chrono::steady_clock::now();
    if (method == "3be") {
      const RidgeSearchResult best =
          tune_ridge(data, {config.sigmas, config.lambdas, feature_count, cv_seed, config.holdout_fraction});
      const RksFeatureMap map = sample_feature_map(static_cast<int>(u->size()), feature_count, best.sigma, cv_seed);
      run.model = fit_projected(data, map, best.lambda);
      rec.fit_time = shared_fit_time + detail::seconds_since(fit_start);
      rec.D = feature_count;
      rec.hyperparameters["sigma"] = best.sigma;
      rec.hyperparameters["lambda"] = best.lambda;
      rec.hyperparameters["feature_seed"] = cv_seed;
      const Model3BE& model = *run.model;
      std::tie(predictions, rec.mpt) = detail::timed_predictions(
          run.test_inputs, [&](const FunctionObservation& x) { return predict_coeffs(model, x); });
    } else if (method == "lse") {
      const BandwidthSearchResult best = tune_bandwidth(data, config.bandwidths, cv_seed, config.holdout_fraction);
      run.lse_model = lse_fit_projected(data, best.bandwidth);
      rec.fit_time = shared_fit_time + detail::seconds_since(fit_start);
      rec.hyperparameters["bandwidth"] = best.bandwidth;
      rec.hyperparameters["kernel"] = kEpanechnikovTag;
      const LseModel& model = *run.lse_model;
      std::tie(predictions, rec.mpt) = detail::timed_predictions(
          run.test_inputs, [&](const FunctionObservation& x) { return lse_predict(model, x); });
    } else {
      const CoefficientVector mean(v, data.outputs.colwise().mean().transpose());
      rec.fit_time = shared_fit_time + detail::seconds_since(fit_start);
      std::tie(predictions, rec.mpt) =
          detail::timed_predictions(run.test_inputs, [&](const FunctionObservation&) { return mean; });
    }
    rec.mse = function_mse(predictions, run.test_truth, config.quadrature_points);
    run.report.records.push_back(std::move(rec));
  }
  return run;
}

inline nlohmann::json to_json(const MethodRecord& r) {
  return {{"method", r.method}, {"mse", r.mse},   {"mpt", r.mpt}, {"fit_time", r.fit_time},
          {"N", r.N},           {"n", r.n},       {"s", r.s},     {"r", r.r},
          {"D", r.D},           {"seed", r.seed}, {"hyperparameters", r.hyperparameters}};
}

inline nlohmann::json to_json(const BenchmarkReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) records.push_back(to_json(r));
  return {{"schema", kReportSchema},
          {"schema_version", kReportSchemaVersion},
          {"config", report.config},
          {"records", std::move(records)}};
}

}  // namespace tribasis
