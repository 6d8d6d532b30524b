#pragma once

// Synthetic function-to-function problems with known ground truth.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tribasis/basis.hpp"
#include "tribasis/features.hpp"
#include "tribasis/random.hpp"

namespace tribasis {

/// Input functions are expanded over kappa_alpha <= this radius.
inline constexpr double kInputSupportRadius = 16.0;

struct SyntheticConfig {
  SobolevSpec input_spec = SobolevSpec::isotropic(1, 1.0, 1.0, 4.0);
  SobolevSpec output_spec = SobolevSpec::isotropic(1, 1.0, 1.0, 1.0);
  double noise_sd = 0.1;
  int points_per_function = 100;
  int instance_count = 1000;
  std::uint64_t seed = 0;

  void validate() const {
    input_spec.validate();
    output_spec.validate();
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("SyntheticConfig: noise_sd must be >= 0");
    if (points_per_function < 1 || instance_count < 1)
      throw std::invalid_argument("SyntheticConfig: n and N must be >= 1");
  }
};

/// f_alpha(p) = sum_i theta_{alpha i} K_sigma(|a(g_i) - a(p)|) for alpha in V.
struct MappingSpec {
  std::vector<CoefficientVector> anchors;  // g_i, shared by every alpha
  IndexSetPtr output_index_set;            // V
  std::vector<Eigen::VectorXd> weights;    // theta_alpha, one per alpha in V
  std::vector<double> bounds;              // B_alpha
  double sigma = 1.0;
  SobolevSpec output_spec;

  void validate() const {
    if (anchors.empty()) throw std::invalid_argument("MappingSpec: no anchors");
    if (!output_index_set || weights.size() != output_index_set->size() || bounds.size() != weights.size())
      throw std::invalid_argument("MappingSpec: one weight vector and bound per output index required");
    if (!(sigma > 0.0)) throw std::invalid_argument("MappingSpec: sigma must be positive");
    double budget = 0.0;
    for (std::size_t a = 0; a < weights.size(); ++a) {
      if (weights[a].size() != static_cast<Eigen::Index>(anchors.size()))
        throw std::invalid_argument("MappingSpec: weight vector length differs from anchor count");
      if (weights[a].lpNorm<1>() > bounds[a] * (1.0 + 1e-12))
        throw std::invalid_argument("MappingSpec: |theta_alpha|_1 exceeds B_alpha");
      budget += bounds[a] * bounds[a] * output_spec.kappa_squared((*output_index_set)[a]);
    }
    if (budget > output_spec.amplitude * (1.0 + 1e-12))
      throw std::invalid_argument("MappingSpec: sum B_alpha^2 kappa_alpha^2 exceeds A_O");
  }
};

inline IndexSetPtr input_support(const SobolevSpec& spec) {
  return enumerate_kappa_ball(spec, kInputSupportRadius);
}

/// sum_alpha c_alpha^2 kappa_alpha^2
inline double ellipsoid_norm(const CoefficientVector& c, const SobolevSpec& spec) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k) sum += c[k] * c[k] * spec.kappa_squared(c.index_set()[k]);
  return sum;
}

/// c_alpha = xi_alpha / (1 + kappa_alpha^2), xi ~ N(0,1), shrunk onto the
/// ellipsoid when sum c^2 kappa^2 exceeds A.
inline CoefficientVector sample_input_function(const SobolevSpec& spec, std::uint64_t seed,
                                               const IndexSetPtr& support) {
  if (!support || support->dimension() != spec.dimension())
    throw std::invalid_argument("sample_input_function: support does not match the spec");
  Rng rng(seed);
  Eigen::VectorXd c(static_cast<Eigen::Index>(support->size()));
  double norm = 0.0;
  for (std::size_t k = 0; k < support->size(); ++k) {
    const double kappa2 = spec.kappa_squared((*support)[k]);
    c[k] = rng.normal() / (1.0 + kappa2);
    norm += c[k] * c[k] * kappa2;
  }
  if (norm > spec.amplitude) c *= std::sqrt(spec.amplitude / norm) * (1.0 - 1e-12);
  return CoefficientVector(support, std::move(c));
}

inline CoefficientVector sample_input_function(const SobolevSpec& spec, std::uint64_t seed) {
  spec.validate();
  return sample_input_function(spec, seed, input_support(spec));
}

/// Draws anchors from the input measure, B_alpha proportional to
/// 1/(1 + kappa_alpha^2) scaled onto the output budget, and theta_alpha as
/// Gaussian vectors rescaled to |theta_alpha|_1 = B_alpha.
inline MappingSpec make_mapping(const SyntheticConfig& config, int anchor_count, double output_radius,
                                double sigma, std::uint64_t seed) {
  config.validate();
  if (anchor_count < 1) throw std::invalid_argument("make_mapping: anchor_count must be >= 1");
  MappingSpec m;
  m.sigma = sigma;
  m.output_spec = config.output_spec;
  m.output_index_set = enumerate_kappa_ball(config.output_spec, output_radius);
  const auto support = input_support(config.input_spec);
  for (int i = 0; i < anchor_count; ++i)
    m.anchors.push_back(sample_input_function(config.input_spec, derive_seed(seed, 1000003ULL + i), support));

  const auto& v = *m.output_index_set;
  double budget = 0.0;
  for (const auto& alpha : v) {
    const double kappa2 = config.output_spec.kappa_squared(alpha);
    m.bounds.push_back(1.0 / (1.0 + kappa2));
    budget += m.bounds.back() * m.bounds.back() * kappa2;
  }
  if (budget > config.output_spec.amplitude) {
    const double shrink = std::sqrt(config.output_spec.amplitude / budget) * (1.0 - 1e-12);
    for (double& b : m.bounds) b *= shrink;
  }
  Rng rng(derive_seed(seed, 7));
  for (std::size_t a = 0; a < v.size(); ++a) {
    Eigen::VectorXd theta(anchor_count);
    for (int i = 0; i < anchor_count; ++i) theta[i] = rng.normal();
    theta *= m.bounds[a] / theta.lpNorm<1>();
    m.weights.push_back(std::move(theta));
  }
  m.validate();
  return m;
}

/// Exact f(p) over V with the true RBF kernel; no random features involved.
inline CoefficientVector apply_mapping(const MappingSpec& mapping, const CoefficientVector& input) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(mapping.anchors.size()));
  for (std::size_t i = 0; i < mapping.anchors.size(); ++i)
    k[i] = rbf_kernel(coeff_l2_distance(mapping.anchors[i], input), mapping.sigma);
  Eigen::VectorXd out(static_cast<Eigen::Index>(mapping.weights.size()));
  for (std::size_t a = 0; a < mapping.weights.size(); ++a) out[a] = mapping.weights[a].dot(k);
  return CoefficientVector(mapping.output_index_set, std::move(out));
}

/// n uniform points on [0,1]^d.
inline PointMatrix uniform_points(Rng& rng, int n, int dimension) {
  PointMatrix p(n, dimension);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  return p;
}

/// Noisy evaluations of `truth` at n fresh uniform points.
inline FunctionObservation observe(const CoefficientVector& truth, int n, double noise_sd, Rng& rng) {
  PointMatrix points = uniform_points(rng, n, truth.dimension());
  Eigen::VectorXd values = evaluate_at(truth, points);
  if (noise_sd > 0.0)
    for (Eigen::Index j = 0; j < values.size(); ++j) values[j] += noise_sd * rng.normal();
  return FunctionObservation::noisy(std::move(points), std::move(values));
}

struct SyntheticDataset {
  std::vector<ObservationPair> pairs;
  std::vector<CoefficientVector> true_inputs;
  std::vector<CoefficientVector> true_outputs;
};

/// Instance i draws everything from seeds derived from (config.seed, i), so
/// any subset can be regenerated independently.
inline SyntheticDataset generate_dataset(const SyntheticConfig& config, const MappingSpec& mapping) {
  config.validate();
  const auto support = mapping.anchors.front().index_set_ptr();
  SyntheticDataset out;
  out.pairs.reserve(config.instance_count);
  for (int i = 0; i < config.instance_count; ++i) {
    const std::uint64_t base = derive_seed(config.seed, static_cast<std::uint64_t>(i));
    CoefficientVector p = sample_input_function(config.input_spec, derive_seed(base, 0), support);
    CoefficientVector q = apply_mapping(mapping, p);
    Rng rng(derive_seed(base, 1));
    FunctionObservation in = observe(p, config.points_per_function, config.noise_sd, rng);
    FunctionObservation outp = observe(q, config.points_per_function, config.noise_sd, rng);
    out.pairs.push_back({std::move(in), std::move(outp)});
    out.true_inputs.push_back(std::move(p));
    out.true_outputs.push_back(std::move(q));
  }
  return out;
}

}  // namespace tribasis
