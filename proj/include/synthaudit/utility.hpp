#pragma once

// Data-utility battery: the four models trained on real vs synthetic data,
// compared on the benchmark split at three depths (aggregate AUC, per-row
// prediction direction, hidden-representation similarity).

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/encoding.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/ml/metrics.hpp"
#include "synthaudit/ml/net.hpp"
#include "synthaudit/special.hpp"
#include "synthaudit/testresult.hpp"

namespace synthaudit {

struct ModelQuartet {
  GbmModel gb_train, gb_synth;
  NetModel nn_train, nn_synth;
};

// Identical hyperparameters and seed on both datasets.
inline ModelQuartet train_quartet(const Dataset& train, const Dataset& synth,
                                  const TargetEncoder& enc, std::uint64_t seed,
                                  const GbmConfig& gbm_cfg = {}, const NetConfig& net_cfg = {}) {
  const Eigen::MatrixXd Xt = encode_features(train, enc);
  const Eigen::MatrixXd Xs = encode_features(synth, enc);
  const auto yt = train.target();
  const auto ys = synth.target();
  detail::check_both_classes(yt);
  detail::check_both_classes(ys);

  ModelQuartet q;
  q.gb_train = train_gbm(Xt, yt, derive_seed(seed, {hash_tag("quartet.gbm")}), gbm_cfg);
  q.gb_synth = train_gbm(Xs, ys, derive_seed(seed, {hash_tag("quartet.gbm")}), gbm_cfg);
  q.nn_train = train_nn(Xt, yt, derive_seed(seed, {hash_tag("quartet.nn")}), net_cfg);
  q.nn_synth = train_nn(Xs, ys, derive_seed(seed, {hash_tag("quartet.nn")}), net_cfg);
  return q;
}

// 1 - mean AUC drop when swapping the training data, clamped to [0,1].
inline TestResult aggregate_prediction_test(const ModelQuartet& q, const Dataset& test,
                                            const TargetEncoder& enc) {
  const Eigen::MatrixXd X = encode_features(test, enc);
  const auto y = test.target();
  const double auc_gb_t = auc(predict_proba(q.gb_train, X), y);
  const double auc_gb_s = auc(predict_proba(q.gb_synth, X), y);
  const double auc_nn_t = auc(predict_proba(q.nn_train, X), y);
  const double auc_nn_s = auc(predict_proba(q.nn_synth, X), y);

  TestResult res;
  res.name = "Aggregate Predictions";
  res.group = TestGroup::utility;
  res.detail = TestDetail::basic;
  res.score = clamp01(1.0 - ((auc_gb_t - auc_gb_s) + (auc_nn_t - auc_nn_s)) / 2.0);
  res.diagnostics["auc_gbm_train"] = auc_gb_t;
  res.diagnostics["auc_gbm_synth"] = auc_gb_s;
  res.diagnostics["auc_nn_train"] = auc_nn_t;
  res.diagnostics["auc_nn_synth"] = auc_nn_s;
  return res;
}

// Mean cosine similarity of the probability vectors, per framework.
inline TestResult single_prediction_test(const ModelQuartet& q, const Dataset& test,
                                         const TargetEncoder& enc) {
  const Eigen::MatrixXd X = encode_features(test, enc);
  const double cs_gb = cosine_similarity(predict_proba(q.gb_synth, X), predict_proba(q.gb_train, X));
  const double cs_nn = cosine_similarity(predict_proba(q.nn_synth, X), predict_proba(q.nn_train, X));

  TestResult res;
  res.name = "Single Predictions";
  res.group = TestGroup::utility;
  res.detail = TestDetail::in_depth;
  res.score = clamp01((cs_gb + cs_nn) / 2.0);
  res.diagnostics["cosine_gbm"] = cs_gb;
  res.diagnostics["cosine_nn"] = cs_nn;
  return res;
}

inline Eigen::MatrixXd hidden_activations(const NetModel& m, const Eigen::MatrixXd& X) {
  return hidden_from_standardized(m, standardized_inputs(m, X));
}

// Linear centered kernel alignment between two activation matrices with a
// shared row count. Invariant to orthogonal transforms and isotropic scaling
// of either argument.
inline double linear_cka(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows())
    throw DimensionMismatch(static_cast<std::size_t>(a.rows()),
                            static_cast<std::size_t>(b.rows()));
  Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  const double cross = (bc.transpose() * ac).squaredNorm();
  const double na = (ac.transpose() * ac).norm();
  const double nb = (bc.transpose() * bc).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return cross / (na * nb);
}

// CKA of the two hidden layers on the benchmark rows.
inline TestResult model_internals_test(const ModelQuartet& q, const Dataset& test,
                                       const TargetEncoder& enc) {
  const Eigen::MatrixXd X = encode_features(test, enc);
  const Eigen::MatrixXd at = hidden_activations(q.nn_train, X);
  const Eigen::MatrixXd as = hidden_activations(q.nn_synth, X);

  TestResult res;
  res.name = "Model Internals";
  res.group = TestGroup::utility;
  res.detail = TestDetail::in_depth;
  const double cka = linear_cka(at, as);
  res.score = clamp01(cka);
  if (cka == 0.0) res.diagnostics["note"] = "zero activation matrix after centering";
  return res;
}

}  // namespace synthaudit
