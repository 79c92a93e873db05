#pragma once

// Gradient boosting with shallow trees (at most four internal splits each),
// logistic loss for binary targets and squared loss for numeric ones.
// Training is deterministic for a fixed seed.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "synthaudit/errors.hpp"
#include "synthaudit/ml/metrics.hpp"
#include "synthaudit/ml/tree.hpp"
#include "synthaudit/rng.hpp"

namespace synthaudit {

struct GbmConfig {
  int max_splits = 4;
  int rounds = 100;
  double learning_rate = 0.1;
  double lambda = 1.0;
  double validation_fraction = 0.1;
  int patience = 10;
};

struct GbmModel {
  std::vector<TreeModel> trees;
  double learning_rate = 0.1;
  double base_score = 0.0;  // prior in link space (log-odds / raw mean)
  bool logistic = true;
  Eigen::Index n_features = 0;

  Eigen::VectorXd raw_scores(const Eigen::MatrixXd& X) const {
    if (X.cols() != n_features)
      throw DimensionMismatch(static_cast<std::size_t>(n_features),
                              static_cast<std::size_t>(X.cols()));
    Eigen::VectorXd s = Eigen::VectorXd::Constant(X.rows(), base_score);
    for (const auto& tree : trees)
      for (Eigen::Index r = 0; r < X.rows(); ++r) s(r) += learning_rate * tree.predict_row(X, r);
    return s;
  }
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline std::vector<double> predict_proba(const GbmModel& m, const Eigen::MatrixXd& X) {
  const Eigen::VectorXd s = m.raw_scores(X);
  std::vector<double> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[i] = m.logistic ? sigmoid(s(i)) : s(i);
  return out;
}

namespace detail {

inline void check_training_input(const Eigen::MatrixXd& X, const std::vector<double>& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size())
    throw DimensionMismatch(static_cast<std::size_t>(X.rows()), y.size());
  if (X.rows() < 20) throw TooFewRows(20);
}

inline void check_both_classes(const std::vector<double>& y) {
  bool pos = false, neg = false;
  for (double v : y) (v == 1.0 ? pos : neg) = true;
  if (!pos || !neg) throw DegenerateTarget();
}

// Common boosting loop; the loss closure supplies gradients, hessians and the
// validation objective.
template <typename GradFn, typename LossFn>
GbmModel boost(const Eigen::MatrixXd& X, const std::vector<double>& y, std::uint64_t seed,
               const GbmConfig& cfg, bool logistic, double base, GradFn&& fill_grad,
               LossFn&& valid_loss) {
  const std::size_t n = y.size();
  Rng rng(derive_seed(seed, {hash_tag("gbm.split")}));
  auto order = rng.permutation(n);
  std::size_t n_valid = static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                                            static_cast<double>(n)));
  if (n_valid >= n) n_valid = n - 1;
  std::vector<std::size_t> train_rows(order.begin(), order.end() - n_valid);
  std::vector<std::size_t> valid_rows(order.end() - n_valid, order.end());

  GbmModel model;
  model.learning_rate = cfg.learning_rate;
  model.base_score = base;
  model.logistic = logistic;
  model.n_features = X.cols();

  std::vector<double> score(n, base);
  std::vector<double> grad(n, 0.0), hess(n, 0.0);
  GbmTreeParams prm;
  prm.max_splits = cfg.max_splits;
  prm.lambda = cfg.lambda;

  double best_loss = std::numeric_limits<double>::infinity();
  std::size_t best_round = 0;
  int stall = 0;

  for (int round = 0; round < cfg.rounds; ++round) {
    fill_grad(score, grad, hess);
    TreeModel tree = build_gbm_tree(X, train_rows, grad, hess, prm);
    for (std::size_t r = 0; r < n; ++r)
      score[r] += cfg.learning_rate * tree.predict_row(X, static_cast<Eigen::Index>(r));
    model.trees.push_back(std::move(tree));

    if (!valid_rows.empty()) {
      const double loss = valid_loss(score, valid_rows);
      if (loss < best_loss - 1e-12) {
        best_loss = loss;
        best_round = model.trees.size();
        stall = 0;
      } else if (++stall >= cfg.patience) {
        break;
      }
    }
  }
  if (!valid_rows.empty()) model.trees.resize(best_round);
  return model;
}

}  // namespace detail

inline GbmModel train_gbm(const Eigen::MatrixXd& X, const std::vector<double>& y,
                          std::uint64_t seed, const GbmConfig& cfg = {}) {
  detail::check_training_input(X, y);
  detail::check_both_classes(y);

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  mean = std::clamp(mean, 1e-6, 1.0 - 1e-6);
  const double base = std::log(mean / (1.0 - mean));

  return detail::boost(
      X, y, seed, cfg, /*logistic=*/true, base,
      [&](const std::vector<double>& score, std::vector<double>& g, std::vector<double>& h) {
        for (std::size_t r = 0; r < y.size(); ++r) {
          const double p = sigmoid(score[r]);
          g[r] = p - y[r];
          h[r] = std::max(p * (1.0 - p), 1e-16);
        }
      },
      [&](const std::vector<double>& score, const std::vector<std::size_t>& rows) {
        double loss = 0.0;
        for (std::size_t r : rows) {
          const double p = std::clamp(sigmoid(score[r]), 1e-12, 1.0 - 1e-12);
          loss -= y[r] * std::log(p) + (1.0 - y[r]) * std::log(1.0 - p);
        }
        return loss / static_cast<double>(rows.size());
      });
}

// Squared-loss variant for numeric responses (raw-score predictions).
inline GbmModel train_gbm_squared(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                  std::uint64_t seed, const GbmConfig& cfg = {}) {
  detail::check_training_input(X, y);

  double base = 0.0;
  for (double v : y) base += v;
  base /= static_cast<double>(y.size());

  return detail::boost(
      X, y, seed, cfg, /*logistic=*/false, base,
      [&](const std::vector<double>& score, std::vector<double>& g, std::vector<double>& h) {
        for (std::size_t r = 0; r < y.size(); ++r) {
          g[r] = score[r] - y[r];
          h[r] = 1.0;
        }
      },
      [&](const std::vector<double>& score, const std::vector<std::size_t>& rows) {
        double loss = 0.0;
        for (std::size_t r : rows) {
          const double d = score[r] - y[r];
          loss += d * d;
        }
        return loss / static_cast<double>(rows.size());
      });
}

}  // namespace synthaudit
