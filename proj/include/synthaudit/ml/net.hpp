#pragma once

// Single-hidden-layer binary classifier: 256 ReLU units, sigmoid output,
// cross-entropy loss, Adam updates, early stopping on a validation split.
// Inputs are z-scored with statistics taken from the training data.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "synthaudit/errors.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/rng.hpp"

namespace synthaudit {

constexpr Eigen::Index kHiddenWidth = 256;

struct NetConfig {
  int max_epochs = 100;
  int batch = 256;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double validation_fraction = 0.1;
  int patience = 5;
};

struct NetModel {
  Eigen::MatrixXd W1;  // p x 256
  Eigen::VectorXd b1;  // 256
  Eigen::VectorXd w2;  // 256
  double b2 = 0.0;
  Eigen::VectorXd mean;  // standardization statistics, p
  Eigen::VectorXd scale;

  Eigen::Index n_features() const { return W1.rows(); }
};

inline Eigen::MatrixXd standardized_inputs(const NetModel& m, const Eigen::MatrixXd& X) {
  if (X.cols() != m.n_features())
    throw DimensionMismatch(static_cast<std::size_t>(m.n_features()),
                            static_cast<std::size_t>(X.cols()));
  Eigen::MatrixXd Z = X;
  for (Eigen::Index j = 0; j < Z.cols(); ++j)
    Z.col(j) = (Z.col(j).array() - m.mean(j)) / m.scale(j);
  return Z;
}

// Post-ReLU hidden layer on already-standardized inputs.
inline Eigen::MatrixXd hidden_from_standardized(const NetModel& m, const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd A = (Z * m.W1).rowwise() + m.b1.transpose();
  return A.cwiseMax(0.0);
}

inline std::vector<double> predict_proba(const NetModel& m, const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd A = hidden_from_standardized(m, standardized_inputs(m, X));
  const Eigen::VectorXd z2 = (A * m.w2).array() + m.b2;
  std::vector<double> out(static_cast<std::size_t>(z2.size()));
  for (Eigen::Index i = 0; i < z2.size(); ++i) out[i] = sigmoid(z2(i));
  return out;
}

struct NetGradients {
  Eigen::MatrixXd W1;
  Eigen::VectorXd b1;
  Eigen::VectorXd w2;
  double b2 = 0.0;
  double loss = 0.0;
};

// Mean cross-entropy and its gradients on standardized inputs. This is the
// exact code path the optimizer steps on, so the finite-difference check in
// the tests exercises the production gradients.
inline NetGradients net_loss_grad(const NetModel& m, const Eigen::MatrixXd& Z,
                                  const Eigen::VectorXd& y) {
  const auto n = static_cast<double>(Z.rows());
  const Eigen::MatrixXd pre = (Z * m.W1).rowwise() + m.b1.transpose();
  const Eigen::MatrixXd A = pre.cwiseMax(0.0);
  const Eigen::VectorXd z2 = (A * m.w2).array() + m.b2;

  NetGradients g;
  Eigen::VectorXd p(z2.size());
  g.loss = 0.0;
  for (Eigen::Index i = 0; i < z2.size(); ++i) {
    p(i) = sigmoid(z2(i));
    const double q = std::clamp(p(i), 1e-12, 1.0 - 1e-12);
    g.loss -= y(i) * std::log(q) + (1.0 - y(i)) * std::log(1.0 - q);
  }
  g.loss /= n;

  const Eigen::VectorXd dz2 = (p - y) / n;
  g.w2 = A.transpose() * dz2;
  g.b2 = dz2.sum();
  Eigen::MatrixXd dA = dz2 * m.w2.transpose();
  dA = dA.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
  g.W1 = Z.transpose() * dA;
  g.b1 = dA.colwise().sum();
  return g;
}

inline double net_loss(const NetModel& m, const Eigen::MatrixXd& Z, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd A = hidden_from_standardized(m, Z);
  const Eigen::VectorXd z2 = (A * m.w2).array() + m.b2;
  double loss = 0.0;
  for (Eigen::Index i = 0; i < z2.size(); ++i) {
    const double q = std::clamp(sigmoid(z2(i)), 1e-12, 1.0 - 1e-12);
    loss -= y(i) * std::log(q) + (1.0 - y(i)) * std::log(1.0 - q);
  }
  return loss / static_cast<double>(z2.size());
}

namespace detail {

struct AdamState {
  Eigen::MatrixXd mW1, vW1;
  Eigen::VectorXd mb1, vb1, mw2, vw2;
  double mb2 = 0.0, vb2 = 0.0;
  long t = 0;
};

inline void adam_step(NetModel& m, AdamState& s, const NetGradients& g, const NetConfig& cfg) {
  ++s.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(s.t));
  auto update = [&](auto& param, auto& mom, auto& vel, const auto& grad) {
    mom = cfg.beta1 * mom + (1.0 - cfg.beta1) * grad;
    vel = cfg.beta2 * vel + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    param -= cfg.learning_rate * (mom / c1).cwiseQuotient(((vel / c2).cwiseSqrt().array() + cfg.eps).matrix());
  };
  update(m.W1, s.mW1, s.vW1, g.W1);
  update(m.b1, s.mb1, s.vb1, g.b1);
  update(m.w2, s.mw2, s.vw2, g.w2);
  s.mb2 = cfg.beta1 * s.mb2 + (1.0 - cfg.beta1) * g.b2;
  s.vb2 = cfg.beta2 * s.vb2 + (1.0 - cfg.beta2) * g.b2 * g.b2;
  m.b2 -= cfg.learning_rate * (s.mb2 / c1) / (std::sqrt(s.vb2 / c2) + cfg.eps);
}

}  // namespace detail

inline NetModel train_nn(const Eigen::MatrixXd& X, const std::vector<double>& y,
                         std::uint64_t seed, const NetConfig& cfg = {}) {
  detail::check_training_input(X, y);
  detail::check_both_classes(y);

  const Eigen::Index p = X.cols();
  const std::size_t n = y.size();

  NetModel m;
  m.mean = X.colwise().mean();
  m.scale.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = (X.col(j).array() - m.mean(j)).square().sum() / static_cast<double>(n);
    m.scale(j) = var > 0.0 ? std::sqrt(var) : 1.0;
  }

  Rng rng(derive_seed(seed, {hash_tag("nn.init")}));
  const double s1 = std::sqrt(2.0 / static_cast<double>(p));
  const double s2 = std::sqrt(2.0 / static_cast<double>(kHiddenWidth));
  m.W1.resize(p, kHiddenWidth);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < kHiddenWidth; ++j) m.W1(i, j) = s1 * rng.normal();
  m.b1 = Eigen::VectorXd::Zero(kHiddenWidth);
  m.w2.resize(kHiddenWidth);
  for (Eigen::Index j = 0; j < kHiddenWidth; ++j) m.w2(j) = s2 * rng.normal();
  m.b2 = 0.0;

  const Eigen::MatrixXd Z = standardized_inputs(m, X);
  Eigen::VectorXd yv(n);
  for (std::size_t i = 0; i < n; ++i) yv(i) = y[i];

  Rng split_rng(derive_seed(seed, {hash_tag("nn.split")}));
  auto order = split_rng.permutation(n);
  std::size_t n_valid = static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                                            static_cast<double>(n)));
  if (n_valid >= n) n_valid = n - 1;
  std::vector<std::size_t> train_rows(order.begin(), order.end() - n_valid);
  std::vector<std::size_t> valid_rows(order.end() - n_valid, order.end());

  Eigen::MatrixXd Zv(valid_rows.size(), p);
  Eigen::VectorXd yvalid(valid_rows.size());
  for (std::size_t i = 0; i < valid_rows.size(); ++i) {
    Zv.row(i) = Z.row(valid_rows[i]);
    yvalid(i) = yv(valid_rows[i]);
  }

  detail::AdamState adam;
  adam.mW1 = Eigen::MatrixXd::Zero(p, kHiddenWidth);
  adam.vW1 = adam.mW1;
  adam.mb1 = Eigen::VectorXd::Zero(kHiddenWidth);
  adam.vb1 = adam.mb1;
  adam.mw2 = Eigen::VectorXd::Zero(kHiddenWidth);
  adam.vw2 = adam.mw2;

  NetModel best = m;
  double best_loss = std::numeric_limits<double>::infinity();
  int stall = 0;

  const std::size_t batch = static_cast<std::size_t>(cfg.batch);
  Rng epoch_rng(derive_seed(seed, {hash_tag("nn.epochs")}));
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    epoch_rng.shuffle(train_rows);
    for (std::size_t start = 0; start < train_rows.size(); start += batch) {
      const std::size_t stop = std::min(start + batch, train_rows.size());
      Eigen::MatrixXd Zb(stop - start, p);
      Eigen::VectorXd yb(stop - start);
      for (std::size_t i = start; i < stop; ++i) {
        Zb.row(i - start) = Z.row(train_rows[i]);
        yb(i - start) = yv(train_rows[i]);
      }
      const NetGradients g = net_loss_grad(m, Zb, yb);
      detail::adam_step(m, adam, g, cfg);
    }
    if (!valid_rows.empty()) {
      const double loss = net_loss(m, Zv, yvalid);
      if (loss < best_loss - 1e-9) {
        best_loss = loss;
        best = m;
        stall = 0;
      } else if (++stall >= cfg.patience) {
        break;
      }
    }
  }
  return valid_rows.empty() ? m : best;
}

}  // namespace synthaudit
