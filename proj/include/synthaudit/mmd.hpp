#pragma once

// Maximum mean discrepancy with a Gaussian kernel, the median bandwidth
// heuristic, and the permutation test that calibrates its acceptance
// threshold. Univariate and multivariate samples share one engine built on
// the pooled kernel matrix, so each of the B re-partitions costs O(m^2)
// lookups instead of a fresh kernel evaluation.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "synthaudit/errors.hpp"
#include "synthaudit/rng.hpp"
#include "synthaudit/special.hpp"

namespace synthaudit {

// Biased two-sample MMD estimate:
//   sqrt( m^-2 sum k(x,x') - 2(mn)^-1 sum k(x,y) + n^-2 sum k(y,y') )
// with k(a,b) = exp(-|a-b|^2 / (2 sigma^2)). Negative radicands from
// floating-point cancellation clamp to zero.
inline double mmd_statistic(std::span<const double> x, std::span<const double> y, double sigma) {
  if (!(sigma > 0.0)) throw InvalidSigma();
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto k = [inv](double a, double b) {
    const double d = a - b;
    return std::exp(-d * d * inv);
  };
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (double a : x)
    for (double b : x) sxx += k(a, b);
  for (double a : x)
    for (double b : y) sxy += k(a, b);
  for (double a : y)
    for (double b : y) syy += k(a, b);
  const double m = static_cast<double>(x.size());
  const double n = static_cast<double>(y.size());
  const double sq = sxx / (m * m) - 2.0 * sxy / (m * n) + syy / (n * n);
  return std::sqrt(std::max(0.0, sq));
}

// Multivariate form; rows are samples.
inline double mmd_statistic(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double sigma) {
  if (!(sigma > 0.0)) throw InvalidSigma();
  if (x.cols() != y.cols())
    throw DimensionMismatch(static_cast<std::size_t>(x.cols()),
                            static_cast<std::size_t>(y.cols()));
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto block = [inv](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < b.rows(); ++j)
        s += std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
    return s;
  };
  const double m = static_cast<double>(x.rows());
  const double n = static_cast<double>(y.rows());
  const double sq = block(x, x) / (m * m) - 2.0 * block(x, y) / (m * n) + block(y, y) / (n * n);
  return std::sqrt(std::max(0.0, sq));
}

namespace detail {

// Pooled squared-distance matrix in float (halves the footprint; the
// permutation decisions are far above float noise). Diagonal is zero.
inline Eigen::MatrixXf pooled_sqdist(const Eigen::MatrixXd& pooled) {
  const Eigen::Index n = pooled.rows();
  Eigen::MatrixXf D(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    D(i, i) = 0.0f;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const float d = static_cast<float>((pooled.row(i) - pooled.row(j)).squaredNorm());
      D(i, j) = d;
      D(j, i) = d;
    }
  }
  return D;
}

// sigma = sqrt(median of squared pairwise distances / 2)
inline double median_sigma_from_sqdist(const Eigen::MatrixXf& D) {
  const Eigen::Index n = D.rows();
  if (n < 2) throw DegenerateSample();
  std::vector<float> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) upper.push_back(D(i, j));
  const std::size_t sz = upper.size();
  auto mid = upper.begin() + static_cast<std::ptrdiff_t>(sz / 2);
  std::nth_element(upper.begin(), mid, upper.end());
  double med = *mid;
  if (sz % 2 == 0) {
    auto lo = std::max_element(upper.begin(), mid);
    med = (med + static_cast<double>(*lo)) / 2.0;
  }
  if (!(med > 0.0)) throw DegenerateSample();
  return std::sqrt(med / 2.0);
}

}  // namespace detail

inline double median_sigma(std::span<const double> x, std::span<const double> y) {
  Eigen::MatrixXd pooled(x.size() + y.size(), 1);
  Eigen::Index r = 0;
  for (double v : x) pooled(r++, 0) = v;
  for (double v : y) pooled(r++, 0) = v;
  if (pooled.rows() < 2) throw DegenerateSample();
  return detail::median_sigma_from_sqdist(detail::pooled_sqdist(pooled));
}

inline double median_sigma(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd pooled(x.rows() + y.rows(), x.cols());
  pooled << x, y;
  if (pooled.rows() < 2) throw DegenerateSample();
  return detail::median_sigma_from_sqdist(detail::pooled_sqdist(pooled));
}

// Empirical null of the MMD statistic under random re-partitions of the
// pooled sample. accepted <=> observed <= threshold (the 1-alpha quantile).
struct PermutationNull {
  std::vector<double> samples;
  double threshold = 0.0;
  double observed = 0.0;
  double sigma = 0.0;
  bool accepted = true;
};

inline PermutationNull mmd_permutation_test(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                            std::size_t permutations, double alpha,
                                            std::uint64_t seed) {
  if (x.cols() != y.cols())
    throw DimensionMismatch(static_cast<std::size_t>(x.cols()),
                            static_cast<std::size_t>(y.cols()));
  const auto m = static_cast<std::size_t>(x.rows());
  const auto n = static_cast<std::size_t>(y.rows());
  Eigen::MatrixXd pooled(x.rows() + y.rows(), x.cols());
  pooled << x, y;

  Eigen::MatrixXf K = detail::pooled_sqdist(pooled);
  const double sigma = detail::median_sigma_from_sqdist(K);

  // distances -> kernel values, in place; K(i,i) = 1
  const float inv = static_cast<float>(1.0 / (2.0 * sigma * sigma));
  const Eigen::Index total = K.rows();
  for (Eigen::Index i = 0; i < total; ++i)
    for (Eigen::Index j = 0; j < total; ++j) K(i, j) = std::exp(-K(i, j) * inv);

  std::vector<double> row_sum(static_cast<std::size_t>(total), 0.0);
  double grand = 0.0;
  for (Eigen::Index i = 0; i < total; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < total; ++j) s += K(i, j);
    row_sum[static_cast<std::size_t>(i)] = s;
    grand += s;
  }

  const double dm = static_cast<double>(m);
  const double dn = static_cast<double>(n);
  // MMD of the partition whose first block is the index set A.
  auto partition_mmd = [&](std::span<const std::size_t> a) {
    double s_aa = 0.0, a_rows = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a_rows += row_sum[a[i]];
      const auto* row = K.data() + static_cast<std::ptrdiff_t>(a[i]) * total;
      for (std::size_t j = i + 1; j < a.size(); ++j) s_aa += row[a[j]];
    }
    s_aa = 2.0 * s_aa + dm;  // unit diagonal
    const double s_ab = a_rows - s_aa;
    const double s_bb = grand - 2.0 * s_ab - s_aa;
    const double sq = s_aa / (dm * dm) - 2.0 * s_ab / (dm * dn) + s_bb / (dn * dn);
    return std::sqrt(std::max(0.0, sq));
  };

  PermutationNull null;
  null.sigma = sigma;
  null.observed = mmd_statistic(x, y, sigma);
  null.samples.resize(permutations);

  std::vector<std::size_t> idx(static_cast<std::size_t>(total));
  for (std::size_t b = 0; b < permutations; ++b) {
    Rng rng(derive_seed(seed, {hash_tag("mmd.perm"), b}));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < m; ++i) std::swap(idx[i], idx[i + rng.below(idx.size() - i)]);
    null.samples[b] = partition_mmd(std::span(idx).first(m));
  }

  std::vector<double> sorted = null.samples;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(permutations)));
  null.threshold = sorted[std::min(rank == 0 ? 0 : rank - 1, permutations - 1)];
  null.accepted = null.observed <= null.threshold;
  return null;
}

inline PermutationNull mmd_permutation_test(std::span<const double> x, std::span<const double> y,
                                            std::size_t permutations, double alpha,
                                            std::uint64_t seed) {
  Eigen::MatrixXd mx(x.size(), 1), my(y.size(), 1);
  for (std::size_t i = 0; i < x.size(); ++i) mx(i, 0) = x[i];
  for (std::size_t i = 0; i < y.size(); ++i) my(i, 0) = y[i];
  return mmd_permutation_test(mx, my, permutations, alpha, seed);
}

}  // namespace synthaudit
