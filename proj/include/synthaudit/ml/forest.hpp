#pragma once

// Bagged classification forest with per-split feature subsampling and
// normalized impurity-decrease importances. No tuning knobs are required
// beyond the tree count.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "synthaudit/errors.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/ml/tree.hpp"
#include "synthaudit/rng.hpp"

namespace synthaudit {

struct ForestConfig {
  int trees = 100;
  int max_depth = 64;
  std::size_t min_split = 2;
};

struct ForestModel {
  std::vector<TreeModel> trees;
  std::vector<double> feature_importances;
  Eigen::Index n_features = 0;
};

inline ForestModel train_forest(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                std::uint64_t seed, const ForestConfig& cfg = {}) {
  detail::check_training_input(X, y);
  detail::check_both_classes(y);

  const std::size_t n = y.size();
  const std::size_t p = static_cast<std::size_t>(X.cols());

  ForestModel model;
  model.n_features = X.cols();
  model.feature_importances.assign(p, 0.0);

  detail::CartParams prm;
  prm.max_depth = cfg.max_depth;
  prm.min_split = cfg.min_split;
  prm.mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));

  for (int t = 0; t < cfg.trees; ++t) {
    Rng rng(derive_seed(seed, {hash_tag("forest.tree"), static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = rng.below(n);  // bootstrap
    model.trees.push_back(detail::build_cart_tree(X, y, std::move(rows), prm, rng,
                                                  model.feature_importances));
  }

  double total = 0.0;
  for (double v : model.feature_importances) total += v;
  if (total > 0.0)
    for (double& v : model.feature_importances) v /= total;
  return model;
}

inline std::vector<double> predict_proba(const ForestModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.n_features)
    throw DimensionMismatch(static_cast<std::size_t>(m.n_features),
                            static_cast<std::size_t>(X.cols()));
  std::vector<double> out(static_cast<std::size_t>(X.rows()), 0.0);
  for (const auto& tree : m.trees)
    for (Eigen::Index r = 0; r < X.rows(); ++r)
      out[static_cast<std::size_t>(r)] += tree.predict_row(X, r);
  for (double& v : out) v /= static_cast<double>(m.trees.size());
  return out;
}

}  // namespace synthaudit
