#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tribasis/lse.hpp"

using namespace tribasis;

namespace {

IndexSetPtr line_set(int size) {
  std::vector<MultiIndex> v;
  for (int i = 0; i < size; ++i) v.push_back({i});
  return make_index_set(1, v);
}

ProjectedDataset make_data(oracle::Gen& g, long n, int s, int r, double scale = 1.0) {
  return {line_set(s), line_set(r), g.matrix(n, s) * scale, g.matrix(n, r)};
}

}  // namespace

TEST(Epanechnikov, Profile) {
  EXPECT_EQ(epanechnikov(0.0), 1.0);
  EXPECT_EQ(epanechnikov(0.5), 0.75);
  EXPECT_EQ(epanechnikov(-0.5), 0.75);
  EXPECT_EQ(epanechnikov(1.0), 0.0);
  EXPECT_EQ(epanechnikov(3.0), 0.0);
}

TEST(LseWeights, FormProbabilityVectorOrVanish) {
  oracle::Gen g(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = make_data(g, g.integer(1, 40), 3, 2);
    const auto model = lse_fit_projected(data, g.uniform(0.1, 4.0));
    const auto q = g.coefficients(data.input_index_set);
    const auto w = lse_weights(model, q);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (double x : w) EXPECT_GE(x, 0.0);
    if (total == 0.0) {
      EXPECT_EQ(lse_predict_from_coeffs(model, q).coefficients().norm(), 0.0);
    } else {
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(LsePredict, ZeroVectorWhenNothingInSupport) {
  const auto u = line_set(2), v = line_set(2);
  Eigen::MatrixXd in(2, 2), out(2, 2);
  in << 0, 0, 0.1, 0;
  out << 1, 2, 3, 4;
  const auto model = lse_fit_projected({u, v, in, out}, 0.5);
  const auto pred = lse_predict_from_coeffs(model, CoefficientVector(u, Eigen::Vector2d(10, 10)));
  EXPECT_EQ(pred.coefficients(), Eigen::Vector2d::Zero());
}

TEST(LsePredict, IsolatedExactMatchReturnsItsOutput) {
  const auto u = line_set(2), v = line_set(3);
  Eigen::MatrixXd in(3, 2), out(3, 3);
  in << 0, 0, 5, 0, 0, 5;
  out << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const auto model = lse_fit_projected({u, v, in, out}, 1.0);
  for (int i = 0; i < 3; ++i) {
    const auto pred = lse_predict_from_coeffs(model, CoefficientVector(u, in.row(i).transpose()));
    EXPECT_EQ(pred.coefficients(), out.row(i).transpose());
  }
}

TEST(LsePredict, EquidistantNeighboursAverage) {
  const auto u = line_set(1), v = line_set(1);
  Eigen::MatrixXd in(2, 1), out(2, 1);
  in << -1, 1;
  out << 2, 6;
  const auto model = lse_fit_projected({u, v, in, out}, 4.0);
  const auto pred = lse_predict_from_coeffs(model, CoefficientVector(u, Eigen::VectorXd::Zero(1)));
  EXPECT_DOUBLE_EQ(pred.coefficients()[0], 4.0);
}

TEST(LsePredict, KnownWeights) {
  // distances 0.5 and 1.5 with h = 2: K = 0.9375 and 0.4375
  const auto u = line_set(1), v = line_set(1);
  Eigen::MatrixXd in(2, 1), out(2, 1);
  in << 0.5, -1.5;
  out << 1, 0;
  const auto model = lse_fit_projected({u, v, in, out}, 2.0);
  const auto pred = lse_predict_from_coeffs(model, CoefficientVector(u, Eigen::VectorXd::Zero(1)));
  EXPECT_NEAR(pred.coefficients()[0], 0.9375 / (0.9375 + 0.4375), 1e-15);
}

TEST(LsePredict, PredictionInConvexHullOfOutputs) {
  oracle::Gen g(2);
  for (int trial = 0; trial < 50; ++trial) {
    const auto data = make_data(g, 30, 2, 3, 0.3);
    const auto model = lse_fit_projected(data, 2.0);
    const auto q = g.coefficients(data.input_index_set, 0.3);
    const auto w = lse_weights(model, q);
    const Eigen::VectorXd pred = lse_predict_from_coeffs(model, q).coefficients();
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(3);
    for (std::size_t i = 0; i < w.size(); ++i) combo += w[i] * data.outputs.row(static_cast<long>(i)).transpose();
    EXPECT_LT((pred - combo).cwiseAbs().maxCoeff(), 1e-12);
    for (int k = 0; k < 3; ++k) {
      EXPECT_LE(pred[k], data.outputs.col(k).maxCoeff() + 1e-12);
      EXPECT_GE(pred[k], data.outputs.col(k).minCoeff() - 1e-12);
    }
  }
}

TEST(LsePredict, PermutationInvariant) {
  oracle::Gen g(3);
  const auto data = make_data(g, 60, 3, 2, 0.4);
  std::vector<Eigen::Index> order(60);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 eng(5);
  std::shuffle(order.begin(), order.end(), eng);
  const auto a = lse_fit_projected(data, 1.5), b = lse_fit_projected(data.subset(order), 1.5);
  for (int t = 0; t < 20; ++t) {
    const auto q = g.coefficients(data.input_index_set, 0.4);
    EXPECT_LT((lse_predict_from_coeffs(a, q).coefficients() - lse_predict_from_coeffs(b, q).coefficients())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-12);
  }
}

TEST(LsePredict, SingleTrainingPair) {
  const auto u = line_set(1), v = line_set(2);
  Eigen::MatrixXd in(1, 1), out(1, 2);
  in << 0.0;
  out << 3, -1;
  const auto model = lse_fit_projected({u, v, in, out}, 1.0);
  EXPECT_EQ(lse_predict_from_coeffs(model, CoefficientVector(u, Eigen::VectorXd::Constant(1, 0.9))).coefficients(),
            out.row(0).transpose());
  EXPECT_EQ(lse_predict_from_coeffs(model, CoefficientVector(u, Eigen::VectorXd::Constant(1, 1.0))).coefficients(),
            Eigen::Vector2d::Zero());
}

TEST(LseFit, StoresEveryPairAndValidates) {
  oracle::Gen g(4);
  for (long n : {1L, 10L, 100L}) {
    const auto data = make_data(g, n, 2, 2);
    const auto model = lse_fit_projected(data, 1.0);
    EXPECT_EQ(model.size(), static_cast<std::size_t>(n));
    EXPECT_EQ(model.train_outputs.size(), static_cast<std::size_t>(n));
  }
  EXPECT_THROW(lse_fit_projected(make_data(g, 5, 2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(lse_fit({}, line_set(1), line_set(1), 1.0), std::invalid_argument);
  auto model = lse_fit_projected(make_data(g, 5, 2, 2), 1.0);
  model.kernel_tag = "gaussian";
  EXPECT_THROW(model.validate(), std::invalid_argument);
}

TEST(LsePredict, RejectsWrongDimension) {
  oracle::Gen g(5);
  const auto model = lse_fit_projected(make_data(g, 5, 2, 2), 1.0);
  PointMatrix p(3, 2);
  p.setConstant(0.5);
  EXPECT_THROW(lse_predict(model, FunctionObservation::noisy(p, Eigen::VectorXd::Zero(3))), std::invalid_argument);
}

TEST(TuneBandwidth, PicksTheBestGridPoint) {
  oracle::Gen g(6);
  auto data = make_data(g, 200, 2, 1, 0.5);
  for (long i = 0; i < data.size(); ++i) data.outputs(i, 0) = std::sin(3 * data.inputs(i, 0)) + data.inputs(i, 1);
  const std::vector<double> grid{0.05, 0.2, 0.5, 2.0};
  const auto best = tune_bandwidth(data, grid, 9);
  const auto [tr, ho] = holdout_split(data.size(), 0.2, 9);
  const auto model_data = data.subset(tr);
  for (double h : grid) {
    const auto model = lse_fit_projected(model_data, h);
    double sse = 0;
    for (auto row : ho)
      sse += (lse_predict_from_coeffs(model, data.input(row)).coefficients() - data.outputs.row(row).transpose())
                 .squaredNorm();
    EXPECT_GE(sse / double(ho.size()), best.validation_mse * (1 - 1e-12));
  }
  EXPECT_NE(std::find(grid.begin(), grid.end(), best.bandwidth), grid.end());
}

TEST(TuneBandwidth, DefaultGridScalesWithMedianDistance) {
  oracle::Gen g(7);
  const auto data = make_data(g, 60, 2, 1);
  const double base = median_pairwise_distance(data.inputs);
  const auto best = tune_bandwidth(data, {}, 1);
  bool on_grid = false;
  for (double f : {0.25, 0.5, 1.0, 2.0, 4.0}) on_grid |= std::abs(best.bandwidth - f * base) < 1e-12 * base;
  EXPECT_TRUE(on_grid);
}
