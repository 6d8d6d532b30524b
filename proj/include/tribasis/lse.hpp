#pragma once

// Linear smoother baseline: a kernel-weighted average of every training
// output, weights from input-function distances. Prediction is Omega(N).

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tribasis/basis.hpp"
#include "tribasis/regress.hpp"

namespace tribasis {

inline constexpr const char* kEpanechnikovTag = "epanechnikov";

/// K(u) = max(0, 1 - u^2)
inline double epanechnikov(double u) { return std::max(0.0, 1.0 - u * u); }

struct LseModel {
  IndexSetPtr input_index_set;
  IndexSetPtr output_index_set;
  std::vector<CoefficientVector> train_inputs;
  std::vector<CoefficientVector> train_outputs;
  double bandwidth = 1.0;
  std::string kernel_tag = kEpanechnikovTag;

  std::size_t size() const { return train_inputs.size(); }

  void validate() const {
    if (!input_index_set || !output_index_set) throw std::invalid_argument("LseModel: missing index set");
    if (train_inputs.empty() || train_inputs.size() != train_outputs.size())
      throw std::invalid_argument("LseModel: need equally many (>= 1) training inputs and outputs");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("LseModel: bandwidth must be positive");
    if (kernel_tag != kEpanechnikovTag) throw std::invalid_argument("LseModel: unknown kernel '" + kernel_tag + "'");
  }
};

inline LseModel lse_fit_projected(const ProjectedDataset& data, double bandwidth) {
  LseModel model{data.input_index_set, data.output_index_set, {}, {}, bandwidth, kEpanechnikovTag};
  model.train_inputs.reserve(static_cast<std::size_t>(data.size()));
  model.train_outputs.reserve(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    model.train_inputs.push_back(data.input(i));
    model.train_outputs.push_back(data.output(i));
  }
  model.validate();
  return model;
}

/// Stores the projected training pairs; nothing else is computed.
inline LseModel lse_fit(std::span<const ObservationPair> dataset, const IndexSetPtr& u, const IndexSetPtr& v,
                        double bandwidth) {
  if (dataset.empty()) throw std::invalid_argument("lse_fit: empty dataset");
  if (!u || !v) throw std::invalid_argument("lse_fit: missing index set");
  return lse_fit_projected(project_dataset(dataset, u, v), bandwidth);
}

/// Normalized smoother weights; all zero when no training input is within
/// the kernel support.
inline std::vector<double> lse_weights(const LseModel& model, const CoefficientVector& query) {
  std::vector<double> w(model.size());
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    w[i] = epanechnikov(coeff_l2_distance(query, model.train_inputs[i]) / model.bandwidth);
    total += w[i];
  }
  if (total > 0.0)
    for (double& x : w) x /= total;
  return w;
}

inline CoefficientVector lse_predict_from_coeffs(const LseModel& model, const CoefficientVector& query) {
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.output_index_set->size()));
  double total = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double k = epanechnikov(coeff_l2_distance(query, model.train_inputs[i]) / model.bandwidth);
    if (k == 0.0) continue;
    sum.noalias() += k * model.train_outputs[i].coefficients();
    total += k;
  }
  if (total > 0.0) sum /= total;
  return CoefficientVector(model.output_index_set, std::move(sum));
}

inline CoefficientVector lse_predict(const LseModel& model, const FunctionObservation& input_obs) {
  if (input_obs.dimension() != model.input_index_set->dimension())
    throw std::invalid_argument("lse_predict: input observation dimension differs from the model's");
  return lse_predict_from_coeffs(model, project(input_obs, model.input_index_set));
}

struct BandwidthSearchResult {
  double bandwidth = 1.0;
  double validation_mse = 0.0;
};

/// Same held-out protocol as tune_ridge. An empty grid means the median
/// input distance times {0.25, 0.5, 1, 2, 4}.
inline BandwidthSearchResult tune_bandwidth(const ProjectedDataset& data, std::vector<double> bandwidths,
                                            std::uint64_t seed, double holdout_fraction = 0.2) {
  if (bandwidths.empty()) {
    const double base = median_pairwise_distance(data.inputs);
    for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) bandwidths.push_back(f * base);
  }
  const auto [train_rows, held_rows] = holdout_split(data.size(), holdout_fraction, seed);
  const ProjectedDataset train = data.subset(train_rows);
  BandwidthSearchResult best{bandwidths.front(), std::numeric_limits<double>::infinity()};
  for (double h : bandwidths) {
    const LseModel model = lse_fit_projected(train, h);
    double sse = 0.0;
    for (Eigen::Index row : held_rows) {
      const CoefficientVector pred = lse_predict_from_coeffs(model, data.input(row));
      sse += (pred.coefficients() - data.outputs.row(row).transpose()).squaredNorm();
    }
    const double mse = sse / static_cast<double>(held_rows.size());
    if (mse < best.validation_mse) best = {h, mse};
  }
  return best;
}

}  // namespace tribasis
