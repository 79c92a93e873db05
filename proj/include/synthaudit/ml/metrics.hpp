#pragma once

// Classifier metrics shared by the test battery.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "synthaudit/errors.hpp"
#include "synthaudit/stats.hpp"

namespace synthaudit {

// Mann-Whitney AUC with mid-rank tie handling.
inline double auc(std::span<const double> scores, std::span<const double> labels) {
  std::size_t n_pos = 0, n_neg = 0;
  for (double y : labels) (y == 1.0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw DegenerateTarget();
  const auto ranks = mid_ranks(scores);
  double rank_sum_pos = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1.0) rank_sum_pos += ranks[i];
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

inline double gini(std::span<const double> scores, std::span<const double> labels) {
  return 2.0 * auc(scores, labels) - 1.0;
}

inline double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionMismatch(u.size(), v.size());
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ZeroVector();
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

// Per-row cross-entropy; probabilities clamped away from {0,1}.
inline std::vector<double> cross_entropy(std::span<const double> p, std::span<const double> y) {
  std::vector<double> err(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(p[i], 1e-12, 1.0 - 1e-12);
    err[i] = -(y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q));
  }
  return err;
}

inline double mean_cross_entropy(std::span<const double> p, std::span<const double> y) {
  const auto err = cross_entropy(p, y);
  double s = 0.0;
  for (double e : err) s += e;
  return s / static_cast<double>(err.size());
}

}  // namespace synthaudit
