#pragma once

// Tensor-product cosine basis on [0,1]^d: index sets, projection estimates,
// reconstruction and cross-validated truncation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tribasis/detail/vector_cos.hpp"

namespace tribasis {

using MultiIndex = std::vector<int>;
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Identifier written to model files for the 1-D family used here.
inline constexpr const char* kCosineBasisTag = "cosine";

/// Smoothness class parameters (nu, gamma, A) of a Sobolev ellipsoid.
struct SobolevSpec {
  std::vector<double> nu;
  std::vector<double> gamma;
  double amplitude = 1.0;

  static SobolevSpec isotropic(int dimension, double nu = 1.0, double gamma = 1.0,
                               double amplitude = 1.0) {
    return SobolevSpec{std::vector<double>(dimension, nu),
                       std::vector<double>(dimension, gamma), amplitude};
  }

  int dimension() const { return static_cast<int>(nu.size()); }

  void validate() const {
    if (nu.empty() || nu.size() != gamma.size())
      throw std::invalid_argument("SobolevSpec: nu and gamma must be non-empty and equal length");
    for (std::size_t i = 0; i < nu.size(); ++i)
      if (!(nu[i] > 0.0) || !(gamma[i] > 0.0))
        throw std::invalid_argument("SobolevSpec: nu and gamma entries must be positive");
    if (!(amplitude > 0.0))
      throw std::invalid_argument("SobolevSpec: amplitude must be positive");
  }

  /// kappa_alpha^2 = sum_i (nu_i |alpha_i|)^(2 gamma_i)
  double kappa_squared(const MultiIndex& alpha) const {
    if (static_cast<int>(alpha.size()) != dimension())
      throw std::invalid_argument("kappa: multi-index length does not match spec dimension");
    double sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] == 0) continue;
      sum += std::pow(nu[i] * std::abs(alpha[i]), 2.0 * gamma[i]);
    }
    return sum;
  }

  double kappa(const MultiIndex& alpha) const { return std::sqrt(kappa_squared(alpha)); }

  friend bool operator==(const SobolevSpec&, const SobolevSpec&) = default;
};

enum class IndexRule { euclidean_ball, kappa_ball, explicit_list };

inline const char* to_string(IndexRule rule) {
  switch (rule) {
    case IndexRule::euclidean_ball: return "euclidean-ball";
    case IndexRule::kappa_ball: return "kappa-ball";
    case IndexRule::explicit_list: return "explicit";
  }
  return "explicit";
}

inline IndexRule index_rule_from_string(const std::string& s) {
  if (s == "euclidean-ball") return IndexRule::euclidean_ball;
  if (s == "kappa-ball") return IndexRule::kappa_ball;
  if (s == "explicit") return IndexRule::explicit_list;
  throw std::invalid_argument("unknown index rule '" + s + "'");
}

/// Finite, lexicographically ordered set of non-negative multi-indices.
/// Immutable once built.
class BasisIndexSet {
public:
  BasisIndexSet(int dimension, std::vector<MultiIndex> indices,
                IndexRule rule = IndexRule::explicit_list, double radius = 0.0,
                std::optional<SobolevSpec> spec = std::nullopt)
      : dimension_(dimension),
        indices_(std::move(indices)),
        rule_(rule),
        radius_(radius),
        spec_(std::move(spec)) {
    if (dimension_ < 1) throw std::invalid_argument("BasisIndexSet: dimension must be >= 1");
    for (const auto& alpha : indices_) {
      if (static_cast<int>(alpha.size()) != dimension_)
        throw std::invalid_argument("BasisIndexSet: multi-index length differs from dimension");
      for (int a : alpha)
        if (a < 0) throw std::invalid_argument("BasisIndexSet: negative multi-index entry");
    }
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());

    max_degree_.assign(dimension_, 0);
    flat_.reserve(indices_.size() * dimension_);
    for (const auto& alpha : indices_) {
      for (int i = 0; i < dimension_; ++i) {
        max_degree_[i] = std::max(max_degree_[i], alpha[i]);
        flat_.push_back(alpha[i]);
      }
    }
  }

  int dimension() const { return dimension_; }
  std::size_t size() const { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  IndexRule rule() const { return rule_; }
  double radius() const { return radius_; }
  const std::optional<SobolevSpec>& sobolev_spec() const { return spec_; }

  /// Largest 1-D degree used along `axis`.
  int max_degree(int axis) const { return max_degree_[axis]; }
  /// Entries of index i, contiguous.
  const int* entries(std::size_t i) const { return flat_.data() + i * dimension_; }

  /// Position of `alpha`, or nullopt.
  std::optional<std::size_t> find(const MultiIndex& alpha) const {
    auto it = std::lower_bound(indices_.begin(), indices_.end(), alpha);
    if (it == indices_.end() || *it != alpha) return std::nullopt;
    return static_cast<std::size_t>(it - indices_.begin());
  }

  /// Same indices in the same dimension; the construction tag is not compared.
  bool same_indices(const BasisIndexSet& other) const {
    return dimension_ == other.dimension_ && indices_ == other.indices_;
  }

private:
  int dimension_;
  std::vector<MultiIndex> indices_;
  IndexRule rule_;
  double radius_;
  std::optional<SobolevSpec> spec_;
  std::vector<int> max_degree_;
  std::vector<int> flat_;
};

using IndexSetPtr = std::shared_ptr<const BasisIndexSet>;

inline IndexSetPtr make_index_set(int dimension, std::vector<MultiIndex> indices) {
  return std::make_shared<const BasisIndexSet>(dimension, std::move(indices));
}

inline bool same_index_set(const IndexSetPtr& a, const IndexSetPtr& b) {
  return a == b || (a && b && a->same_indices(*b));
}

enum class ObservationKind { noisy_evaluations, density_sample };

inline const char* to_string(ObservationKind kind) {
  return kind == ObservationKind::noisy_evaluations ? "noisy-evaluations" : "density-sample";
}

/// Noisy point evaluations of a function, or an i.i.d. sample of a density,
/// on [0,1]^d. A default-constructed observation is empty.
class FunctionObservation {
public:
  FunctionObservation() = default;

  static FunctionObservation noisy(PointMatrix points, Eigen::VectorXd values) {
    if (points.rows() != values.size())
      throw std::invalid_argument("FunctionObservation: points and values differ in length");
    FunctionObservation obs(ObservationKind::noisy_evaluations, std::move(points));
    obs.values_ = std::move(values);
    return obs;
  }

  static FunctionObservation density_sample(PointMatrix points) {
    return FunctionObservation(ObservationKind::density_sample, std::move(points));
  }

  ObservationKind kind() const { return kind_; }
  int dimension() const { return static_cast<int>(points_.cols()); }
  Eigen::Index size() const { return points_.rows(); }
  bool empty() const { return points_.rows() == 0; }
  const PointMatrix& points() const { return points_; }
  /// Empty for density samples.
  const Eigen::VectorXd& values() const { return values_; }

  std::span<const double> point(Eigen::Index j) const {
    return {points_.data() + j * points_.cols(), static_cast<std::size_t>(points_.cols())};
  }

  /// Response at point j; identically 1 for a density sample.
  double value(Eigen::Index j) const {
    return kind_ == ObservationKind::noisy_evaluations ? values_[j] : 1.0;
  }

  friend bool operator==(const FunctionObservation& a, const FunctionObservation& b) {
    return a.kind_ == b.kind_ && a.points_.rows() == b.points_.rows() &&
           a.points_.cols() == b.points_.cols() && a.points_ == b.points_ &&
           a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

private:
  FunctionObservation(ObservationKind kind, PointMatrix points)
      : kind_(kind), points_(std::move(points)) {
    if (points_.rows() < 1) throw std::invalid_argument("FunctionObservation: need at least one point");
    if (points_.cols() < 1) throw std::invalid_argument("FunctionObservation: dimension must be >= 1");
    for (Eigen::Index j = 0; j < points_.size(); ++j) {
      const double v = points_.data()[j];
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("FunctionObservation: point coordinate outside [0,1]");
    }
  }

  ObservationKind kind_ = ObservationKind::noisy_evaluations;
  PointMatrix points_;
  Eigen::VectorXd values_;
};

struct ObservationPair {
  FunctionObservation input;
  FunctionObservation output;

  friend bool operator==(const ObservationPair&, const ObservationPair&) = default;
};

/// Coefficients of one function over an index set, in index-set order.
class CoefficientVector {
public:
  CoefficientVector(IndexSetPtr index_set, Eigen::VectorXd coefficients)
      : index_set_(std::move(index_set)), coefficients_(std::move(coefficients)) {
    if (!index_set_) throw std::invalid_argument("CoefficientVector: null index set");
    if (static_cast<std::size_t>(coefficients_.size()) != index_set_->size())
      throw std::invalid_argument("CoefficientVector: coefficient count does not match index set");
    if (!coefficients_.allFinite())
      throw std::invalid_argument("CoefficientVector: non-finite coefficient");
  }

  static CoefficientVector zeros(IndexSetPtr index_set) {
    const auto n = static_cast<Eigen::Index>(index_set->size());
    return CoefficientVector(std::move(index_set), Eigen::VectorXd::Zero(n));
  }

  const BasisIndexSet& index_set() const { return *index_set_; }
  const IndexSetPtr& index_set_ptr() const { return index_set_; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  Eigen::Index size() const { return coefficients_.size(); }
  int dimension() const { return index_set_->dimension(); }
  double operator[](Eigen::Index i) const { return coefficients_[i]; }

private:
  IndexSetPtr index_set_;
  Eigen::VectorXd coefficients_;
};

/// phi_0 = 1, phi_j(u) = sqrt(2) cos(pi j u)
inline double cosine_basis_1d(int j, double u) {
  if (j == 0) return 1.0;
  return std::numbers::sqrt2 * std::cos(std::numbers::pi * j * u);
}

/// phi_alpha(x) = prod_i phi_{alpha_i}(x_i), evaluated directly.
inline double eval_basis(const MultiIndex& alpha, std::span<const double> x) {
  if (alpha.size() != x.size())
    throw std::invalid_argument("eval_basis: multi-index and point differ in dimension");
  double value = 1.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] < 0) throw std::invalid_argument("eval_basis: negative index");
    value *= cosine_basis_1d(alpha[i], x[i]);
  }
  return value;
}

/// Basis values at many points at once.
///
/// Along each axis the 1-D values phi_0..phi_J come from the Chebyshev
/// recurrence cos(j t) = 2 cos(t) cos((j-1) t) - cos((j-2) t), applied to
/// whole columns so the work vectorizes across points.
namespace detail {

// table(j, m) = phi_m(u_j), m = 0..degree, u_j = coords[j * stride]
inline void cosine_columns(const double* coords, Eigen::Index stride, Eigen::Index n, int degree,
                           Eigen::MatrixXd& table) {
  table.resize(n, degree + 1);
  table.col(0).setOnes();
  if (degree == 0) return;
  double* c = table.col(1).data();
  for (Eigen::Index j = 0; j < n; ++j) c[j] = std::numbers::pi * coords[j * stride];
  scaled_cos(c, c, n, 1.0);
  for (int m = 2; m <= degree; ++m)
    table.col(m) = 2.0 * table.col(1).cwiseProduct(table.col(m - 1)) - table.col(m - 2);
  table.rightCols(degree) *= std::numbers::sqrt2;
}

inline constexpr Eigen::Index kPointChunk = 2048;

}  // namespace detail

/// phi(j, k) = phi_{alpha_k}(row j of `points`).
inline Eigen::MatrixXd basis_matrix(const Eigen::Ref<const PointMatrix>& points, const BasisIndexSet& set) {
  const int d = set.dimension();
  if (points.cols() != d)
    throw std::invalid_argument("basis evaluation: point dimension does not match index set");
  const Eigen::Index n = points.rows();
  const auto s = static_cast<Eigen::Index>(set.size());
  std::vector<Eigen::MatrixXd> tables(d);
  for (int i = 0; i < d; ++i)
    detail::cosine_columns(points.data() + i, points.outerStride(), n, set.max_degree(i), tables[i]);

  if (d == 1 && s == tables[0].cols()) return std::move(tables[0]);  // set is {0..J}
  Eigen::MatrixXd phi(n, s);
  for (Eigen::Index k = 0; k < s; ++k) {
    const int* alpha = set.entries(static_cast<std::size_t>(k));
    phi.col(k) = tables[0].col(alpha[0]);
    for (int i = 1; i < d; ++i) phi.col(k).array() *= tables[i].col(alpha[i]).array();
  }
  return phi;
}

namespace detail {

inline void enumerate_recursive(int axis, int dimension, const std::vector<int>& bounds,
                                MultiIndex& current, double partial, double budget,
                                const auto& term, std::vector<MultiIndex>& out) {
  if (axis == dimension) {
    out.push_back(current);
    return;
  }
  for (int a = 0; a <= bounds[axis]; ++a) {
    const double next = partial + term(axis, a);
    if (next > budget) break;  // terms are non-decreasing in a
    current[axis] = a;
    enumerate_recursive(axis + 1, dimension, bounds, current, next, budget, term, out);
  }
  current[axis] = 0;
}

// Relative slack so radii such as sqrt(2) include their boundary points.
inline constexpr double kRadiusSlack = 1e-12;

}  // namespace detail

/// All non-negative multi-indices with Euclidean norm <= t.
inline IndexSetPtr enumerate_ball(int dimension, double radius) {
  if (dimension < 1) throw std::invalid_argument("enumerate_ball: dimension must be >= 1");
  if (!(radius >= 0.0)) throw std::invalid_argument("enumerate_ball: radius must be >= 0");
  const double budget = radius * radius * (1.0 + detail::kRadiusSlack);
  const std::vector<int> bounds(dimension, static_cast<int>(std::floor(radius * (1.0 + detail::kRadiusSlack))));
  std::vector<MultiIndex> out;
  MultiIndex current(dimension, 0);
  auto term = [](int, int a) { return static_cast<double>(a) * a; };
  detail::enumerate_recursive(0, dimension, bounds, current, 0.0, budget, term, out);
  return std::make_shared<const BasisIndexSet>(dimension, std::move(out), IndexRule::euclidean_ball,
                                               radius);
}

/// All non-negative multi-indices with kappa_alpha(nu, gamma) <= t.
///
/// Enumeration is bounded per axis by |alpha_i| <= nu_l^(-gamma_l/gamma_i) t^(1/gamma_i),
/// where l minimizes nu_i^(2 gamma_i).
inline IndexSetPtr enumerate_kappa_ball(const SobolevSpec& spec, double radius) {
  spec.validate();
  if (!(radius >= 0.0)) throw std::invalid_argument("enumerate_kappa_ball: radius must be >= 0");
  const int d = spec.dimension();
  int lam = 0;
  for (int i = 1; i < d; ++i)
    if (std::pow(spec.nu[i], 2 * spec.gamma[i]) < std::pow(spec.nu[lam], 2 * spec.gamma[lam])) lam = i;

  std::vector<int> bounds(d);
  for (int i = 0; i < d; ++i) {
    const double b = std::pow(spec.nu[lam], -spec.gamma[lam] / spec.gamma[i]) *
                     std::pow(radius, 1.0 / spec.gamma[i]);
    bounds[i] = static_cast<int>(std::floor(b * (1.0 + detail::kRadiusSlack)));
  }
  const double budget = radius * radius * (1.0 + detail::kRadiusSlack);
  auto term = [&spec](int axis, int a) {
    return a == 0 ? 0.0 : std::pow(spec.nu[axis] * a, 2.0 * spec.gamma[axis]);
  };
  std::vector<MultiIndex> out;
  MultiIndex current(d, 0);
  detail::enumerate_recursive(0, d, bounds, current, 0.0, budget, term, out);
  return std::make_shared<const BasisIndexSet>(d, std::move(out), IndexRule::kappa_ball, radius, spec);
}

/// c_alpha = (1/n) sum_j y_j phi_alpha(u_j); y_j = 1 for density samples.
inline CoefficientVector project(const FunctionObservation& obs, const IndexSetPtr& index_set) {
  if (!index_set) throw std::invalid_argument("project: null index set");
  if (obs.empty()) throw std::invalid_argument("project: empty observation");
  if (obs.dimension() != index_set->dimension())
    throw std::invalid_argument("project: observation dimension does not match index set");
  const Eigen::Index n = obs.size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(index_set->size()));
  for (Eigen::Index start = 0; start < n; start += detail::kPointChunk) {
    const Eigen::Index rows = std::min(detail::kPointChunk, n - start);
    const Eigen::MatrixXd phi = basis_matrix(obs.points().middleRows(start, rows), *index_set);
    if (obs.kind() == ObservationKind::noisy_evaluations)
      sum.noalias() += phi.transpose() * obs.values().segment(start, rows);
    else
      sum += phi.colwise().sum().transpose();
  }
  sum /= static_cast<double>(n);
  return CoefficientVector(index_set, std::move(sum));
}

/// Reconstruction at every row of `points`.
inline Eigen::VectorXd evaluate_at(const CoefficientVector& coeffs, const Eigen::Ref<const PointMatrix>& points) {
  if (points.cols() != coeffs.dimension())
    throw std::invalid_argument("evaluate_at: point dimension does not match coefficients");
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index start = 0; start < points.rows(); start += detail::kPointChunk) {
    const Eigen::Index rows = std::min(detail::kPointChunk, points.rows() - start);
    out.segment(start, rows).noalias() =
        basis_matrix(points.middleRows(start, rows), coeffs.index_set()) * coeffs.coefficients();
  }
  return out;
}

/// sum_alpha c_alpha phi_alpha(x)
inline double reconstruct(const CoefficientVector& coeffs, std::span<const double> x) {
  if (static_cast<int>(x.size()) != coeffs.dimension())
    throw std::invalid_argument("reconstruct: point dimension does not match coefficients");
  const PointMatrix point = Eigen::Map<const PointMatrix>(x.data(), 1, static_cast<Eigen::Index>(x.size()));
  return evaluate_at(coeffs, point)[0];
}

/// Euclidean distance between coefficient sequences over the same index set;
/// equals the L2 distance of the reconstructed functions.
inline double coeff_l2_distance(const CoefficientVector& a, const CoefficientVector& b) {
  if (!same_index_set(a.index_set_ptr(), b.index_set_ptr()))
    throw std::invalid_argument("coeff_l2_distance: index sets differ");
  return (a.coefficients() - b.coefficients()).norm();
}

/// Picks the radius t whose set M_t minimizes K-fold held-out squared error.
/// Points are assigned to folds round-robin. Ties go to the smaller radius.
inline double select_truncation(const FunctionObservation& obs, std::span<const double> candidate_radii,
                                int folds) {
  if (candidate_radii.empty()) throw std::invalid_argument("select_truncation: no candidate radii");
  if (!std::is_sorted(candidate_radii.begin(), candidate_radii.end()))
    throw std::invalid_argument("select_truncation: candidate radii must be sorted ascending");
  if (candidate_radii.front() < 0.0) throw std::invalid_argument("select_truncation: negative radius");
  if (folds < 2) throw std::invalid_argument("select_truncation: need at least 2 folds");
  if (obs.kind() != ObservationKind::noisy_evaluations)
    throw std::invalid_argument("select_truncation: requires noisy-evaluation observations");
  if (obs.size() < folds)
    throw std::invalid_argument("select_truncation: fewer observation points than folds");

  const int d = obs.dimension();
  const auto largest = enumerate_ball(d, candidate_radii.back());
  const auto s = static_cast<Eigen::Index>(largest->size());
  const Eigen::Index n = obs.size();

  // Order indices by squared norm so every M_t is a prefix.
  std::vector<std::pair<long, Eigen::Index>> by_norm(s);
  for (Eigen::Index k = 0; k < s; ++k) {
    long sq = 0;
    for (int a : (*largest)[k]) sq += static_cast<long>(a) * a;
    by_norm[k] = {sq, k};
  }
  std::stable_sort(by_norm.begin(), by_norm.end());
  std::vector<Eigen::Index> prefix(candidate_radii.size());
  for (std::size_t c = 0; c < candidate_radii.size(); ++c) {
    const double budget = candidate_radii[c] * candidate_radii[c] * (1.0 + detail::kRadiusSlack);
    prefix[c] = std::count_if(by_norm.begin(), by_norm.end(),
                              [budget](const auto& p) { return static_cast<double>(p.first) <= budget; });
  }

  const Eigen::MatrixXd unordered = basis_matrix(obs.points(), *largest);
  Eigen::MatrixXd phi(n, s);
  for (Eigen::Index k = 0; k < s; ++k) phi.col(k) = unordered.col(by_norm[k].second);
  const Eigen::VectorXd& y = obs.values();

  std::vector<double> sse(candidate_radii.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    Eigen::VectorXd coef = Eigen::VectorXd::Zero(s);
    Eigen::Index train = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j % folds == f) continue;
      coef.noalias() += y[j] * phi.row(j).transpose();
      ++train;
    }
    coef /= static_cast<double>(train);
    for (Eigen::Index j = f; j < n; j += folds) {
      double partial = 0.0;
      Eigen::Index k = 0;
      for (std::size_t c = 0; c < candidate_radii.size(); ++c) {
        for (; k < prefix[c]; ++k) partial += coef[k] * phi(j, k);
        const double r = partial - y[j];
        sse[c] += r * r;
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < sse.size(); ++c)
    if (sse[c] < sse[best] * (1.0 - 1e-12)) best = c;
  return candidate_radii[best];
}

/// Squared L2([0,1]^d) distance between two expansions by the midpoint rule
/// with `points_per_axis` nodes per axis. The index sets may differ.
inline double quadrature_l2_squared(const CoefficientVector& a, const CoefficientVector& b,
                                    int points_per_axis = 1024) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("quadrature_l2_squared: dimensions differ");
  if (points_per_axis < 1) throw std::invalid_argument("quadrature_l2_squared: need >= 1 node");
  const int d = a.dimension();

  // Difference expressed over the union of both index sets.
  std::map<MultiIndex, double> diff;
  for (std::size_t k = 0; k < a.index_set().size(); ++k) diff[a.index_set()[k]] += a[k];
  for (std::size_t k = 0; k < b.index_set().size(); ++k) diff[b.index_set()[k]] -= b[k];
  std::vector<MultiIndex> indices;
  std::vector<double> coef;
  for (auto& [alpha, c] : diff) {
    indices.push_back(alpha);
    coef.push_back(c);
  }
  auto set = std::make_shared<const BasisIndexSet>(d, std::move(indices));
  CoefficientVector difference(set, Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size())));

  const int m = points_per_axis;
  long total = 1;
  for (int i = 0; i < d; ++i) total *= m;
  std::vector<int> grid(d, 0);
  double sum = 0.0;
  PointMatrix block(std::min<long>(total, detail::kPointChunk), d);
  for (long p = 0; p < total;) {
    const long rows = std::min<long>(total - p, detail::kPointChunk);
    for (long r = 0; r < rows; ++r, ++p) {
      for (int i = 0; i < d; ++i) block(r, i) = (grid[i] + 0.5) / m;
      for (int i = d - 1; i >= 0; --i) {
        if (++grid[i] < m) break;
        grid[i] = 0;
      }
    }
    sum += evaluate_at(difference, block.topRows(rows)).squaredNorm();
  }
  return sum / static_cast<double>(total);
}

}  // namespace tribasis
