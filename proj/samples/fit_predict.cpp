// Fit a triple-basis estimator on synthetic data and compare it with the
// linear smoother on a few held-out functions.

#include <cstdio>

#include "tribasis/tribasis.hpp"

int main() {
  using namespace tribasis;

  SyntheticConfig cfg;
  cfg.instance_count = 1200;
  cfg.seed = 11;
  const MappingSpec mapping = make_mapping(cfg, 25, 4.0, 1.0, 5);
  const SyntheticDataset data = generate_dataset(cfg, mapping);
  const std::span<const ObservationPair> all(data.pairs);
  const auto train = all.first(1000);
  const auto test = all.subspan(1000);

  const IndexSelection sel = select_index_sets(train, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}, 5);
  const ProjectedDataset projected = project_dataset(train, sel.input_index_set, sel.output_index_set);

  RidgeSearch search;
  search.feature_count = 500;
  search.seed = 3;
  const RidgeSearchResult best = tune_ridge(projected, search);
  const Model3BE model =
      fit_projected(projected, sample_feature_map(static_cast<int>(sel.input_index_set->size()), 500, best.sigma, 3),
                    best.lambda);
  const LseModel lse = lse_fit_projected(projected, tune_bandwidth(projected, {}, 3).bandwidth);

  double err_3be = 0.0, err_lse = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const CoefficientVector& truth = data.true_outputs[1000 + i];
    err_3be += quadrature_l2_squared(predict_coeffs(model, test[i].input), truth);
    err_lse += quadrature_l2_squared(lse_predict(lse, test[i].input), truth);
  }
  std::printf("|U| = %zu, |V| = %zu, sigma = %.3g, lambda = %.3g\n", sel.input_index_set->size(),
              sel.output_index_set->size(), best.sigma, best.lambda);
  std::printf("held-out MSE  3BE %.5f  LSE %.5f\n", err_3be / test.size(), err_lse / test.size());
}
