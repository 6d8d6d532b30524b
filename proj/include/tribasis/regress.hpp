#pragma once

// Triple-basis estimator: input coefficients -> RKS features -> linear map
// -> output coefficients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tribasis/basis.hpp"
#include "tribasis/errors.hpp"
#include "tribasis/features.hpp"
#include "tribasis/random.hpp"

namespace tribasis {

/// Running Z'Z and Z'A over the instances seen so far. Summaries built on
/// disjoint shards merge by addition.
struct TrainingSummary {
  Eigen::MatrixXd gram;   // D x D, kept fully symmetric
  Eigen::MatrixXd cross;  // D x r
  std::int64_t count = 0;

  static TrainingSummary zeros(int feature_count, int output_count) {
    return {Eigen::MatrixXd::Zero(feature_count, feature_count),
            Eigen::MatrixXd::Zero(feature_count, output_count), 0};
  }

  int feature_count() const { return static_cast<int>(gram.rows()); }
  int output_count() const { return static_cast<int>(cross.cols()); }

  TrainingSummary& operator+=(const TrainingSummary& other) {
    if (other.gram.rows() != gram.rows() || other.cross.cols() != cross.cols())
      throw std::invalid_argument("TrainingSummary: merging summaries of different shapes");
    gram += other.gram;
    cross += other.cross;
    count += other.count;
    return *this;
  }
};

inline TrainingSummary merge(TrainingSummary a, const TrainingSummary& b) {
  a += b;
  return a;
}

/// Adds (z z', z a', 1) for one instance, z = z(input coefficients).
inline void accumulate(TrainingSummary& summary, const CoefficientVector& input_coeffs,
                       const CoefficientVector& output_coeffs, const RksFeatureMap& map) {
  if (input_coeffs.size() != map.input_dim())
    throw std::invalid_argument("accumulate: input coefficients do not match the feature map");
  if (map.feature_count() != summary.feature_count())
    throw std::invalid_argument("accumulate: feature count does not match the summary");
  if (output_coeffs.size() != summary.output_count())
    throw std::invalid_argument("accumulate: output coefficients do not match the summary");
  const Eigen::VectorXd z = compute_features(map, input_coeffs.coefficients());
  summary.gram.noalias() += z * z.transpose();
  summary.cross.noalias() += z * output_coeffs.coefficients().transpose();
  ++summary.count;
}

/// Batched form: rows of `features` are z(a_U(P_i)), rows of `outputs` are a_V(Q_i).
inline void accumulate_features(TrainingSummary& summary,
                                const Eigen::Ref<const Eigen::MatrixXd>& features,
                                const Eigen::Ref<const Eigen::MatrixXd>& outputs) {
  if (features.cols() != summary.feature_count() || outputs.cols() != summary.output_count() ||
      features.rows() != outputs.rows())
    throw std::invalid_argument("accumulate_features: shape mismatch");
  summary.gram.selfadjointView<Eigen::Lower>().rankUpdate(features.transpose());
  for (Eigen::Index j = 1; j < summary.gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) summary.gram(i, j) = summary.gram(j, i);
  summary.cross.noalias() += features.transpose() * outputs;
  summary.count += features.rows();
}

/// Below this reciprocal condition estimate an unregularized solve is refused.
inline constexpr double kMinReciprocalCondition = 1e-13;
/// Below this (and above the minimum) the OLS solve switches to pivoted LDL'.
inline constexpr double kBorderlineReciprocalCondition = 1e-8;

/// psi = (gram + lambda I)^-1 cross via Cholesky; never forms an inverse.
inline Eigen::MatrixXd solve(const TrainingSummary& summary, double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("solve: lambda must be a finite non-negative number");
  Eigen::MatrixXd system = summary.gram;
  system.diagonal().array() += lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) {
    if (lambda > 0.0 || llt.rcond() >= kBorderlineReciprocalCondition) return llt.solve(summary.cross);
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
  const double rcond = ldlt.info() == Eigen::Success ? ldlt.rcond() : 0.0;
  if (lambda == 0.0 && !(rcond >= kMinReciprocalCondition)) {
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    std::ostringstream msg;
    msg << "solve: Gram matrix is numerically singular (condition estimate " << cond
        << "); use a positive ridge lambda";
    throw IllConditionedError(msg.str(), cond);
  }
  return ldlt.solve(summary.cross);
}

/// A fitted triple-basis estimator.
struct Model3BE {
  IndexSetPtr input_index_set;   // U, size s
  IndexSetPtr output_index_set;  // V, size r
  RksFeatureMap feature_map;
  Eigen::MatrixXd psi;           // D x r
  double ridge_lambda = 0.0;
  std::string basis_tag = kCosineBasisTag;
  std::int64_t training_count = 0;

  void validate() const {
    if (!input_index_set || !output_index_set) throw std::invalid_argument("Model3BE: missing index set");
    if (feature_map.input_dim() != static_cast<int>(input_index_set->size()))
      throw std::invalid_argument("Model3BE: feature map input dimension differs from |U|");
    if (psi.rows() != feature_map.feature_count() ||
        psi.cols() != static_cast<Eigen::Index>(output_index_set->size()))
      throw std::invalid_argument("Model3BE: psi shape must be D x |V|");
    if (!(ridge_lambda >= 0.0)) throw std::invalid_argument("Model3BE: negative ridge lambda");
    if (training_count < 0) throw std::invalid_argument("Model3BE: negative training count");
  }
};

/// Coefficients of a dataset over fixed U and V, one row per instance.
struct ProjectedDataset {
  IndexSetPtr input_index_set;
  IndexSetPtr output_index_set;
  Eigen::MatrixXd inputs;   // N x s
  Eigen::MatrixXd outputs;  // N x r

  Eigen::Index size() const { return inputs.rows(); }

  CoefficientVector input(Eigen::Index i) const {
    return CoefficientVector(input_index_set, inputs.row(i).transpose());
  }
  CoefficientVector output(Eigen::Index i) const {
    return CoefficientVector(output_index_set, outputs.row(i).transpose());
  }

  ProjectedDataset subset(std::span<const Eigen::Index> rows) const {
    ProjectedDataset out{input_index_set, output_index_set,
                         Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), inputs.cols()),
                         Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), outputs.cols())};
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out.inputs.row(k) = inputs.row(rows[k]);
      out.outputs.row(k) = outputs.row(rows[k]);
    }
    return out;
  }
};

inline ProjectedDataset project_dataset(std::span<const ObservationPair> dataset, const IndexSetPtr& u,
                                        const IndexSetPtr& v) {
  if (dataset.empty()) throw std::invalid_argument("project_dataset: empty dataset");
  const int l = dataset.front().input.dimension();
  const int k = dataset.front().output.dimension();
  ProjectedDataset out{u, v,
                       Eigen::MatrixXd(static_cast<Eigen::Index>(dataset.size()), static_cast<Eigen::Index>(u->size())),
                       Eigen::MatrixXd(static_cast<Eigen::Index>(dataset.size()), static_cast<Eigen::Index>(v->size()))};
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset[i].input.dimension() != l || dataset[i].output.dimension() != k)
      throw std::invalid_argument("project_dataset: instances disagree on input/output dimension");
    out.inputs.row(i) = project(dataset[i].input, u).coefficients().transpose();
    out.outputs.row(i) = project(dataset[i].output, v).coefficients().transpose();
  }
  return out;
}

namespace detail {
inline constexpr Eigen::Index kAccumulateChunk = 256;
}

inline TrainingSummary summarize(const ProjectedDataset& data, const RksFeatureMap& map) {
  if (data.inputs.cols() != map.input_dim())
    throw std::invalid_argument("summarize: feature map input dimension differs from |U|");
  auto summary = TrainingSummary::zeros(map.feature_count(), static_cast<int>(data.outputs.cols()));
  for (Eigen::Index start = 0; start < data.size(); start += detail::kAccumulateChunk) {
    const Eigen::Index rows = std::min(detail::kAccumulateChunk, data.size() - start);
    const Eigen::MatrixXd z = compute_features_batch(map, data.inputs.middleRows(start, rows));
    accumulate_features(summary, z, data.outputs.middleRows(start, rows));
  }
  return summary;
}

inline Model3BE fit_projected(const ProjectedDataset& data, const RksFeatureMap& map, double lambda) {
  if (data.size() == 0) throw std::invalid_argument("fit: empty dataset");
  const TrainingSummary summary = summarize(data, map);
  Model3BE model{data.input_index_set, data.output_index_set, map, solve(summary, lambda), lambda,
                 kCosineBasisTag, summary.count};
  model.validate();
  return model;
}

/// Projects every pair onto U and V, accumulates features and solves.
inline Model3BE fit(std::span<const ObservationPair> dataset, const IndexSetPtr& u, const IndexSetPtr& v,
                    const RksFeatureMap& map, double lambda) {
  if (dataset.empty()) throw std::invalid_argument("fit: empty dataset");
  if (!u || !v) throw std::invalid_argument("fit: missing index set");
  if (map.input_dim() != static_cast<int>(u->size()))
    throw std::invalid_argument("fit: feature map input dimension differs from |U|");
  return fit_projected(project_dataset(dataset, u, v), map, lambda);
}

/// psi' z(input coefficients)
inline CoefficientVector predict_from_coeffs(const Model3BE& model, const CoefficientVector& input_coeffs) {
  if (!same_index_set(input_coeffs.index_set_ptr(), model.input_index_set))
    throw std::invalid_argument("predict: input coefficients are not over the model's input set");
  const Eigen::VectorXd z = compute_features(model.feature_map, input_coeffs.coefficients());
  return CoefficientVector(model.output_index_set, model.psi.transpose() * z);
}

/// Output coefficients over V for a new input observation. O(sn + Ds + rD).
inline CoefficientVector predict_coeffs(const Model3BE& model, const FunctionObservation& input_obs) {
  if (input_obs.dimension() != model.input_index_set->dimension())
    throw std::invalid_argument("predict: input observation dimension differs from the model's");
  return predict_from_coeffs(model, project(input_obs, model.input_index_set));
}

inline double predict_function(const Model3BE& model, const FunctionObservation& input_obs,
                               std::span<const double> x) {
  return reconstruct(predict_coeffs(model, input_obs), x);
}

/// Chooses U = M_tbar and V = M_cbar by averaging per-instance
/// cross-validated radii over the first min(N, max_instances) instances.
struct IndexSelection {
  IndexSetPtr input_index_set;
  IndexSetPtr output_index_set;
  double input_radius = 0.0;
  double output_radius = 0.0;
};

inline IndexSelection select_index_sets(std::span<const ObservationPair> dataset,
                                        std::span<const double> candidate_radii, int folds,
                                        std::size_t max_instances = 50) {
  if (dataset.empty()) throw std::invalid_argument("select_index_sets: empty dataset");
  const std::size_t count = std::min(dataset.size(), max_instances);
  double t_sum = 0.0, c_sum = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    t_sum += select_truncation(dataset[j].input, candidate_radii, folds);
    c_sum += select_truncation(dataset[j].output, candidate_radii, folds);
  }
  IndexSelection out;
  out.input_radius = t_sum / static_cast<double>(count);
  out.output_radius = c_sum / static_cast<double>(count);
  out.input_index_set = enumerate_ball(dataset.front().input.dimension(), out.input_radius);
  out.output_index_set = enumerate_ball(dataset.front().output.dimension(), out.output_radius);
  return out;
}

/// Deterministic 80/20-style split: a seeded shuffle, the last
/// `holdout_fraction` of it held out. Both parts are non-empty when N >= 2.
inline std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> holdout_split(
    Eigen::Index n, double holdout_fraction, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("holdout_split: need at least 2 instances");
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[i], order[j]);
  }
  auto held = static_cast<Eigen::Index>(std::llround(holdout_fraction * n));
  held = std::clamp<Eigen::Index>(held, 1, n - 1);
  std::vector<Eigen::Index> train(order.begin(), order.end() - held);
  std::vector<Eigen::Index> test(order.end() - held, order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

/// Median pairwise Euclidean distance among (up to `max_rows`) rows.
inline double median_pairwise_distance(const Eigen::MatrixXd& rows, Eigen::Index max_rows = 200) {
  const Eigen::Index m = std::min(rows.rows(), max_rows);
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) d.push_back((rows.row(i) - rows.row(j)).norm());
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  return *mid > 0.0 ? *mid : 1.0;
}

struct RidgeSearch {
  std::vector<double> sigmas;   // empty: median heuristic times {0.25, 0.5, 1, 2, 4}
  std::vector<double> lambdas;  // empty: default grid
  int feature_count = 1000;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.2;
};

inline std::vector<double> default_lambda_grid() { return {1e-8, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0}; }

struct RidgeSearchResult {
  double sigma = 1.0;
  double lambda = 0.0;
  double validation_mse = 0.0;
};

/// Grid search over (sigma, lambda) on one held-out split, scored by
/// output-coefficient MSE. Ties go to the earlier grid entry.
inline RidgeSearchResult tune_ridge(const ProjectedDataset& data, const RidgeSearch& search) {
  std::vector<double> sigmas = search.sigmas;
  if (sigmas.empty()) {
    const double base = median_pairwise_distance(data.inputs);
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) sigmas.push_back(f * base);
  }
  const std::vector<double> lambdas = search.lambdas.empty() ? default_lambda_grid() : search.lambdas;
  const auto [train_rows, held_rows] = holdout_split(data.size(), search.holdout_fraction, search.seed);
  const ProjectedDataset train = data.subset(train_rows);
  const ProjectedDataset held = data.subset(held_rows);

  RidgeSearchResult best{sigmas.front(), lambdas.front(), std::numeric_limits<double>::infinity()};
  for (double sigma : sigmas) {
    const RksFeatureMap map = sample_feature_map(static_cast<int>(data.inputs.cols()), search.feature_count,
                                                 sigma, search.seed);
    const TrainingSummary summary = summarize(train, map);
    const Eigen::MatrixXd z_held = compute_features_batch(map, held.inputs);
    for (double lambda : lambdas) {
      Eigen::MatrixXd psi;
      try {
        psi = solve(summary, lambda);
      } catch (const IllConditionedError&) {
        continue;
      }
      const double mse = (z_held * psi - held.outputs).squaredNorm() / static_cast<double>(held.size());
      if (mse < best.validation_mse) best = {sigma, lambda, mse};
    }
  }
  if (!std::isfinite(best.validation_mse))
    throw std::runtime_error("tune_ridge: no (sigma, lambda) pair produced a solvable system");
  return best;
}

}  // namespace tribasis
