#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"
#include "tribasis/regress.hpp"
#include "tribasis/synth.hpp"

using namespace tribasis;

namespace {

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

TrainingSummary summary_from(const Eigen::MatrixXd& z, const Eigen::MatrixXd& a) {
  auto s = TrainingSummary::zeros(static_cast<int>(z.cols()), static_cast<int>(a.cols()));
  accumulate_features(s, z, a);
  return s;
}

// A dataset over fixed U, V with coefficients drawn directly.
ProjectedDataset random_projected(oracle::Gen& g, long n, int s_dim, int r_dim) {
  const auto u = make_index_set(1, [&] {
    std::vector<MultiIndex> v;
    for (int i = 0; i < s_dim; ++i) v.push_back({i});
    return v;
  }());
  const auto v = make_index_set(1, [&] {
    std::vector<MultiIndex> w;
    for (int i = 0; i < r_dim; ++i) w.push_back({i});
    return w;
  }());
  return {u, v, g.matrix(n, s_dim) * 0.5, g.matrix(n, r_dim)};
}

std::vector<ObservationPair> synthetic_pairs(int n_pairs, int n_points, std::uint64_t seed,
                                             std::vector<CoefficientVector>* truth = nullptr) {
  SyntheticConfig cfg;
  cfg.instance_count = n_pairs;
  cfg.points_per_function = n_points;
  cfg.seed = seed;
  const auto mapping = make_mapping(cfg, 25, 4.0, 1.0, seed + 1);
  auto data = generate_dataset(cfg, mapping);
  if (truth) *truth = data.true_outputs;
  return data.pairs;
}

}  // namespace

TEST(Accumulate, IntoZeroSummary) {
  oracle::Gen g(1);
  const auto map = sample_feature_map(3, 16, 1.0, 2);
  const auto u = enumerate_ball(1, 2), v = enumerate_ball(1, 1);
  const auto in = g.coefficients(u), out = g.coefficients(v);
  auto s = TrainingSummary::zeros(16, 2);
  accumulate(s, in, out, map);
  const Eigen::VectorXd z = compute_features(map, in.coefficients());
  EXPECT_TRUE(s.gram == z * z.transpose());
  EXPECT_TRUE(s.cross == z * out.coefficients().transpose());
  EXPECT_EQ(s.count, 1);
}

TEST(Accumulate, ZeroOutputLeavesCrossUnchanged) {
  oracle::Gen g(2);
  const auto map = sample_feature_map(3, 16, 1.0, 2);
  const auto u = enumerate_ball(1, 2), v = enumerate_ball(1, 1);
  auto s = TrainingSummary::zeros(16, 2);
  accumulate(s, g.coefficients(u), g.coefficients(v), map);
  const Eigen::MatrixXd before = s.cross;
  accumulate(s, g.coefficients(u), CoefficientVector::zeros(v), map);
  EXPECT_TRUE(s.cross == before);
  EXPECT_EQ(s.count, 2);
}

TEST(Accumulate, DimensionMismatchThrows) {
  oracle::Gen g(3);
  const auto map = sample_feature_map(3, 16, 1.0, 2);
  auto s = TrainingSummary::zeros(16, 2);
  EXPECT_THROW(accumulate(s, g.coefficients(enumerate_ball(1, 3)), g.coefficients(enumerate_ball(1, 1)), map),
               std::invalid_argument);
  EXPECT_THROW(accumulate(s, g.coefficients(enumerate_ball(1, 2)), g.coefficients(enumerate_ball(1, 2)), map),
               std::invalid_argument);
  auto wrong = TrainingSummary::zeros(8, 2);
  EXPECT_THROW(accumulate(wrong, g.coefficients(enumerate_ball(1, 2)), g.coefficients(enumerate_ball(1, 1)), map),
               std::invalid_argument);
  EXPECT_THROW(s += TrainingSummary::zeros(16, 3), std::invalid_argument);
}

TEST(Accumulate, BatchedEqualsSingleAndGramSymmetric) {
  oracle::Gen g(4);
  const auto data = random_projected(g, 100, 4, 3);
  const auto map = sample_feature_map(4, 32, 1.0, 5);
  auto one = TrainingSummary::zeros(32, 3);
  for (long i = 0; i < data.size(); ++i) accumulate(one, data.input(i), data.output(i), map);
  const auto batch = summarize(data, map);
  EXPECT_LT(rel_diff(batch.gram, one.gram), 1e-12);
  EXPECT_LT(rel_diff(batch.cross, one.cross), 1e-12);
  EXPECT_EQ(batch.count, 100);
  EXPECT_TRUE(batch.gram == batch.gram.transpose());
}

TEST(Accumulate, ShardMergeEqualsUnion) {
  oracle::Gen g(5);
  const auto data = random_projected(g, 100, 4, 3);
  const auto map = sample_feature_map(4, 32, 1.0, 6);
  std::vector<Eigen::Index> first(37), second(63);
  std::iota(first.begin(), first.end(), 0);
  std::iota(second.begin(), second.end(), 37);
  const auto merged = merge(summarize(data.subset(first), map), summarize(data.subset(second), map));
  const auto whole = summarize(data, map);
  EXPECT_LT(rel_diff(merged.gram, whole.gram), 1e-10);
  EXPECT_LT(rel_diff(merged.cross, whole.cross), 1e-10);
  EXPECT_EQ(merged.count, whole.count);
}

TEST(Solve, IdentityGram) {
  oracle::Gen g(6);
  const Eigen::MatrixXd c = g.matrix(10, 3);
  const TrainingSummary s{Eigen::MatrixXd::Identity(10, 10), c, 10};
  EXPECT_LT(rel_diff(solve(s, 0.0), c), 1e-15);
}

TEST(Solve, HugeRidgeShrinksToZero) {
  oracle::Gen g(7);
  const Eigen::MatrixXd z = g.matrix(40, 10);
  const auto s = summary_from(z, g.matrix(40, 2));
  EXPECT_LT(solve(s, 1e12).norm(), 1e-6 * s.cross.norm());
}

TEST(Solve, MatchesHouseholderOracle) {
  oracle::Gen g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = g.integer(2, 50), n = g.integer(d + 10, 200), r = g.integer(1, 4);
    const Eigen::MatrixXd z = g.matrix(n, d), a = g.matrix(n, r);
    const Eigen::MatrixXd expect = oracle::householder_lstsq(z, a);
    EXPECT_LT(rel_diff(solve(summary_from(z, a), 0.0), expect), 1e-8) << "trial " << trial;
  }
}

TEST(Solve, SpecSizedOracleProblem) {
  oracle::Gen g(9);
  const Eigen::MatrixXd z = g.matrix(50, 20), a = g.matrix(50, 3);
  EXPECT_LT(rel_diff(solve(summary_from(z, a), 0.0), oracle::householder_lstsq(z, a)), 1e-8);
}

TEST(Solve, SmallRidgeNearOls) {
  oracle::Gen g(10);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::MatrixXd z = g.matrix(150, 20), a = g.matrix(150, 3);
    const auto s = summary_from(z, a);
    EXPECT_LT((solve(s, 1e-6) - solve(s, 0.0)).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Solve, RidgeContinuityAndShrinkage) {
  oracle::Gen g(11);
  const Eigen::MatrixXd z = g.matrix(120, 15), a = g.matrix(120, 2);
  const auto s = summary_from(z, a);
  const Eigen::MatrixXd ols = solve(s, 0.0);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (double lambda : {1e-2, 1e-4, 1e-6}) {
    const double gap = (solve(s, lambda) - ols).cwiseAbs().maxCoeff();
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-6);
  double prev_norm = ols.norm() * (1 + 1e-12);
  for (double lambda : {1e-3, 1e-1, 1.0, 10.0, 1e3}) {
    const double nrm = solve(s, lambda).norm();
    EXPECT_LT(nrm, prev_norm);
    prev_norm = nrm;
  }
}

TEST(Solve, SingularGramRaisesWithConditionEstimate) {
  oracle::Gen g(12);
  // D = 30 features but only 10 instances: rank 10
  const auto s = summary_from(g.matrix(10, 30), g.matrix(10, 2));
  try {
    solve(s, 0.0);
    FAIL() << "expected IllConditionedError";
  } catch (const IllConditionedError& e) {
    EXPECT_GT(e.condition_estimate(), 1e12);
    EXPECT_NE(std::string(e.what()).find("condition estimate"), std::string::npos);
  }
  EXPECT_NO_THROW(solve(s, 1e-3));
}

TEST(Solve, BorderlineSystemUsesPivotedFallback) {
  // Condition ~1e10: between the borderline and refusal thresholds.
  oracle::Gen g(13);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(6, 6);
  for (int i = 0; i < 6; ++i) gram(i, i) = std::pow(10.0, -2.0 * i);
  const Eigen::MatrixXd c = g.matrix(6, 2);
  const Eigen::MatrixXd psi = solve(TrainingSummary{gram, c, 6}, 0.0);
  EXPECT_LT(rel_diff(gram * psi, c), 1e-12);
  EXPECT_THROW(solve(TrainingSummary{gram, c, 6}, -1.0), std::invalid_argument);
}

TEST(Fit, ZeroOutputsGiveZeroModel) {
  auto pairs = synthetic_pairs(30, 50, 3);
  for (auto& p : pairs) p.output = FunctionObservation::noisy(p.output.points(), Eigen::VectorXd::Zero(p.output.size()));
  const auto u = enumerate_ball(1, 3), v = enumerate_ball(1, 2);
  const auto model = fit(pairs, u, v, sample_feature_map(4, 20, 1.0, 1), 1e-3);
  EXPECT_EQ(model.psi.norm(), 0.0);
  EXPECT_EQ(predict_coeffs(model, pairs[0].input).coefficients().norm(), 0.0);
  const double x[] = {0.3};
  EXPECT_EQ(predict_function(model, pairs[0].input, x), 0.0);
}

TEST(Fit, DeterministicRefit) {
  const auto pairs = synthetic_pairs(200, 50, 4);
  const auto u = enumerate_ball(1, 3), v = enumerate_ball(1, 3);
  const auto a = fit(pairs, u, v, sample_feature_map(4, 100, 1.0, 9), 1e-4);
  const auto b = fit(pairs, u, v, sample_feature_map(4, 100, 1.0, 9), 1e-4);
  EXPECT_TRUE(a.psi == b.psi);
}

TEST(Fit, ShuffledAndShardedDataGiveSameModel) {
  const auto pairs = synthetic_pairs(300, 50, 5);
  const auto u = enumerate_ball(1, 3), v = enumerate_ball(1, 3);
  const auto map = sample_feature_map(4, 80, 1.0, 3);
  const auto base = fit(pairs, u, v, map, 1e-3);
  auto shuffled = pairs;
  std::mt19937_64 eng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), eng);
  EXPECT_LT(rel_diff(fit(shuffled, u, v, map, 1e-3).psi, base.psi), 1e-9);

  const std::span<const ObservationPair> all(shuffled);
  TrainingSummary merged = summarize(project_dataset(all.first(100), u, v), map);
  merged += summarize(project_dataset(all.subspan(100), u, v), map);
  EXPECT_LT(rel_diff(solve(merged, 1e-3), base.psi), 1e-9);
}

TEST(Fit, Errors) {
  const auto pairs = synthetic_pairs(10, 20, 6);
  const auto u = enumerate_ball(1, 3), v = enumerate_ball(1, 2);
  EXPECT_THROW(fit({}, u, v, sample_feature_map(4, 10, 1.0, 0), 1.0), std::invalid_argument);
  EXPECT_THROW(fit(pairs, u, v, sample_feature_map(3, 10, 1.0, 0), 1.0), std::invalid_argument);
  auto mixed = pairs;
  PointMatrix p2(3, 2);
  p2.setConstant(0.5);
  mixed[3].input = FunctionObservation::noisy(p2, Eigen::VectorXd::Zero(3));
  EXPECT_THROW(fit(mixed, u, v, sample_feature_map(4, 10, 1.0, 0), 1.0), std::invalid_argument);
  // 25 features from 10 instances cannot be solved without a ridge term
  EXPECT_THROW(fit(pairs, u, v, sample_feature_map(4, 25, 1.0, 0), 0.0), IllConditionedError);
}

TEST(Predict, MatchesManualComposition) {
  const auto pairs = synthetic_pairs(200, 80, 7);
  const auto u = enumerate_ball(1, 4), v = enumerate_ball(1, 3);
  const auto model = fit(pairs, u, v, sample_feature_map(5, 60, 1.0, 2), 1e-3);
  for (int i = 0; i < 10; ++i) {
    const auto a = project(pairs[i].input, u);
    const Eigen::VectorXd z = compute_features(model.feature_map, a.coefficients());
    const Eigen::VectorXd manual = model.psi.transpose() * z;
    const auto got = predict_coeffs(model, pairs[i].input);
    EXPECT_TRUE(got.coefficients() == manual);
    EXPECT_TRUE(same_index_set(got.index_set_ptr(), v));
    for (double x : {0.0, 0.21, 0.5, 0.99}) {
      const double pt[] = {x};
      EXPECT_EQ(predict_function(model, pairs[i].input, pt), reconstruct(got, pt));
    }
  }
}

TEST(Predict, DimensionMismatchThrows) {
  const auto pairs = synthetic_pairs(50, 30, 8);
  const auto model = fit(pairs, enumerate_ball(1, 2), enumerate_ball(1, 2), sample_feature_map(3, 10, 1.0, 2), 1e-3);
  PointMatrix p(4, 2);
  p.setConstant(0.25);
  EXPECT_THROW(predict_coeffs(model, FunctionObservation::noisy(p, Eigen::VectorXd::Zero(4))), std::invalid_argument);
  EXPECT_THROW(predict_from_coeffs(model, CoefficientVector::zeros(enumerate_ball(1, 5))), std::invalid_argument);
}

TEST(Fit, IdentityTaskBeatsOutputProjectionNoiseFloor) {
  // q = p, U = V. The noise floor is the error of projecting held-out
  // outputs directly; the fitted map sees only the (equally noisy) inputs.
  const SobolevSpec spec = SobolevSpec::isotropic(1, 1.0, 1.0, 4.0);
  const auto support = input_support(spec);
  const auto uv = enumerate_ball(1, 3);
  const int n_train = 2000, n_test = 300, n = 200;
  std::vector<ObservationPair> train;
  std::vector<ObservationPair> test;
  std::vector<Eigen::VectorXd> test_truth;
  for (int i = 0; i < n_train + n_test; ++i) {
    const auto p = sample_input_function(spec, derive_seed(77, i), support);
    Rng rng(derive_seed(78, i));
    ObservationPair pair{observe(p, n, 0.1, rng), observe(p, n, 0.1, rng)};
    if (i < n_train) {
      train.push_back(std::move(pair));
    } else {
      Eigen::VectorXd t(4);
      for (int k = 0; k < 4; ++k) t[k] = p[*support->find({k})];
      test_truth.push_back(t);
      test.push_back(std::move(pair));
    }
  }
  const auto data = project_dataset(train, uv, uv);
  const auto best = tune_ridge(data, {{}, {}, 1000, 5, 0.2});
  const auto model = fit_projected(data, sample_feature_map(4, 1000, best.sigma, 5), best.lambda);
  double model_err = 0, floor_err = 0;
  for (int i = 0; i < n_test; ++i) {
    model_err += (predict_coeffs(model, test[i].input).coefficients() - test_truth[i]).squaredNorm();
    floor_err += (project(test[i].output, uv).coefficients() - test_truth[i]).squaredNorm();
  }
  EXPECT_LT(model_err, floor_err);
}

TEST(SelectIndexSets, AveragesPerInstanceRadii) {
  const auto pairs = synthetic_pairs(80, 100, 9);
  const std::vector<double> radii{1, 2, 3, 4, 5, 6};
  const auto sel = select_index_sets(pairs, radii, 5);
  double t = 0, c = 0;
  for (int j = 0; j < 50; ++j) {
    t += select_truncation(pairs[j].input, radii, 5);
    c += select_truncation(pairs[j].output, radii, 5);
  }
  EXPECT_DOUBLE_EQ(sel.input_radius, t / 50);
  EXPECT_DOUBLE_EQ(sel.output_radius, c / 50);
  EXPECT_EQ(sel.input_index_set->indices(), enumerate_ball(1, t / 50)->indices());
  EXPECT_THROW(select_index_sets({}, radii, 5), std::invalid_argument);
}

TEST(HoldoutSplit, PartitionIsDeterministicAndSized) {
  for (long n : {2L, 5L, 100L, 1001L}) {
    const auto [train, held] = holdout_split(n, 0.2, 3);
    const auto [train2, held2] = holdout_split(n, 0.2, 3);
    EXPECT_EQ(train, train2);
    EXPECT_EQ(held, held2);
    EXPECT_FALSE(train.empty());
    EXPECT_FALSE(held.empty());
    std::vector<Eigen::Index> all(train);
    all.insert(all.end(), held.begin(), held.end());
    std::sort(all.begin(), all.end());
    std::vector<Eigen::Index> expect(n);
    std::iota(expect.begin(), expect.end(), 0);
    EXPECT_EQ(all, expect);
    if (n >= 100) {
      EXPECT_NEAR(double(held.size()) / n, 0.2, 0.01);
    }
  }
  EXPECT_THROW(holdout_split(1, 0.2, 0), std::invalid_argument);
}

TEST(TuneRidge, PicksTheBestGridPoint) {
  oracle::Gen g(14);
  auto data = random_projected(g, 300, 3, 2);
  // outputs a smooth function of inputs
  for (long i = 0; i < data.size(); ++i) {
    data.outputs(i, 0) = std::sin(2 * data.inputs(i, 0));
    data.outputs(i, 1) = data.inputs(i, 1) * data.inputs(i, 2);
  }
  const RidgeSearch search{{0.5, 1.0, 2.0}, {1e-6, 1e-3, 1.0}, 200, 4, 0.2};
  const auto best = tune_ridge(data, search);
  const auto [tr, ho] = holdout_split(data.size(), 0.2, 4);
  const auto train = data.subset(tr), held = data.subset(ho);
  for (double s : search.sigmas)
    for (double l : search.lambdas) {
      const auto m = fit_projected(train, sample_feature_map(3, 200, s, 4), l);
      const double mse = (compute_features_batch(m.feature_map, held.inputs) * m.psi - held.outputs).squaredNorm() /
                         double(held.size());
      EXPECT_GE(mse, best.validation_mse * (1 - 1e-12));
    }
}
