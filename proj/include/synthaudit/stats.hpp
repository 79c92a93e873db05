#pragma once

// Rank statistics and correlation helpers.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/encoding.hpp"

namespace synthaudit {

// 1-based ranks with mid-rank tie handling.
inline std::vector<double> mid_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Pearson correlation; NaN when either side is constant.
inline double pearson(std::span<const double> u, std::span<const double> v) {
  const std::size_t n = u.size();
  double mu = 0.0, mv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mu += u[i];
    mv += v[i];
  }
  mu /= static_cast<double>(n);
  mv /= static_cast<double>(n);
  double suv = 0.0, suu = 0.0, svv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double du = u[i] - mu;
    const double dv = v[i] - mv;
    suv += du * dv;
    suu += du * du;
    svv += dv * dv;
  }
  if (suu == 0.0 || svv == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return suv / std::sqrt(suu * svv);
}

// Spearman correlation matrix over all columns (categoricals encoded first).
// Constant columns correlate 0 with everything and keep a unit diagonal.
inline Eigen::MatrixXd spearman_matrix(const Dataset& d, const TargetEncoder& enc) {
  std::vector<std::string> names;
  names.reserve(d.schema.size());
  for (const auto& cs : d.schema) names.push_back(cs.name);
  const Eigen::MatrixXd X = encode_columns(d, enc, names);
  const auto p = static_cast<std::size_t>(X.cols());

  std::vector<std::vector<double>> ranked(p);
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col(X.rows());
    for (Eigen::Index r = 0; r < X.rows(); ++r) col[r] = X(r, j);
    ranked[j] = mid_ranks(col);
  }

  Eigen::MatrixXd R(p, p);
  for (std::size_t i = 0; i < p; ++i) {
    R(i, i) = 1.0;
    for (std::size_t j = i + 1; j < p; ++j) {
      double rho = pearson(ranked[i], ranked[j]);
      if (std::isnan(rho)) rho = 0.0;
      R(i, j) = rho;
      R(j, i) = rho;
    }
  }
  return R;
}

}  // namespace synthaudit
