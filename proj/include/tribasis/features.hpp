#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "tribasis/detail/vector_cos.hpp"
#include "tribasis/random.hpp"

namespace tribasis {

/// Random Kitchen Sink map z(x) = sqrt(2/D) cos(W x + b) with rows of W drawn
/// from N(0, sigma^-2 I) and b ~ Unif[0, 2 pi). z(x)'z(y) approximates
/// exp(-|x-y|^2 / (2 sigma^2)).
class RksFeatureMap {
public:
  /// Rebuild from stored parts (model files). Validates shapes.
  RksFeatureMap(double bandwidth, std::uint64_t seed, Eigen::MatrixXd frequencies,
                Eigen::VectorXd phases)
      : bandwidth_(bandwidth),
        seed_(seed),
        frequencies_(std::move(frequencies)),
        phases_(std::move(phases)) {
    if (!(bandwidth_ > 0.0)) throw std::invalid_argument("RksFeatureMap: bandwidth must be positive");
    if (frequencies_.rows() < 1 || frequencies_.cols() < 1)
      throw std::invalid_argument("RksFeatureMap: empty frequency matrix");
    if (phases_.size() != frequencies_.rows())
      throw std::invalid_argument("RksFeatureMap: phase count differs from feature count");
    scale_ = std::sqrt(2.0 / static_cast<double>(frequencies_.rows()));
  }

  int input_dim() const { return static_cast<int>(frequencies_.cols()); }
  int feature_count() const { return static_cast<int>(frequencies_.rows()); }
  double bandwidth() const { return bandwidth_; }
  std::uint64_t seed() const { return seed_; }
  /// D x s, row i is omega_i.
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }
  const Eigen::VectorXd& phases() const { return phases_; }
  double scale() const { return scale_; }

private:
  double bandwidth_;
  std::uint64_t seed_;
  Eigen::MatrixXd frequencies_;
  Eigen::VectorXd phases_;
  double scale_;
};

/// Draws frequencies row by row, then phases, from one Rng stream.
inline RksFeatureMap sample_feature_map(int input_dim, int feature_count, double bandwidth,
                                        std::uint64_t seed) {
  if (input_dim < 1) throw std::invalid_argument("sample_feature_map: input_dim must be >= 1");
  if (feature_count < 1) throw std::invalid_argument("sample_feature_map: feature_count must be >= 1");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("sample_feature_map: bandwidth must be positive");
  Rng rng(seed);
  Eigen::MatrixXd w(feature_count, input_dim);
  for (int i = 0; i < feature_count; ++i)
    for (int k = 0; k < input_dim; ++k) w(i, k) = rng.normal() / bandwidth;
  Eigen::VectorXd b(feature_count);
  for (int i = 0; i < feature_count; ++i) b[i] = 2.0 * std::numbers::pi * rng.uniform();
  return RksFeatureMap(bandwidth, seed, std::move(w), std::move(b));
}

inline Eigen::VectorXd compute_features(const RksFeatureMap& map,
                                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != map.input_dim())
    throw std::invalid_argument("compute_features: input length does not match the feature map");
  Eigen::VectorXd z = map.phases();
  z.noalias() += map.frequencies() * x;
  detail::scaled_cos(z.data(), z.data(), z.size(), map.scale());
  return z;
}

/// Row i of the result is z(row i of `inputs`); inputs is N x s.
inline Eigen::MatrixXd compute_features_batch(const RksFeatureMap& map,
                                              const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
  if (inputs.cols() != map.input_dim())
    throw std::invalid_argument("compute_features_batch: input width does not match the feature map");
  Eigen::MatrixXd z = inputs * map.frequencies().transpose();
  z.rowwise() += map.phases().transpose();
  detail::scaled_cos(z.data(), z.data(), z.size(), map.scale());
  return z;
}

/// exp(-r^2 / (2 sigma^2))
inline double rbf_kernel(double distance, double bandwidth) {
  const double u = distance / bandwidth;
  return std::exp(-0.5 * u * u);
}

}  // namespace tribasis
