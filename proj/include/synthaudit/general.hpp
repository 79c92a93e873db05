#pragma once

// General-purpose descriptive comparisons: Spearman correlation-matrix
// similarity and Information-Value predictive-power similarity.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "synthaudit/binning.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/special.hpp"
#include "synthaudit/stats.hpp"
#include "synthaudit/testresult.hpp"

namespace synthaudit {

// Normalized Frobenius inner product of two correlation matrices, i.e. one
// minus the rescaled Frobenius distance. Identical matrices score 1.
inline TestResult correlation_similarity_test(const Eigen::MatrixXd& r_test,
                                              const Eigen::MatrixXd& r_synth) {
  if (r_test.rows() != r_synth.rows() || r_test.cols() != r_synth.cols())
    throw DimensionMismatch(static_cast<std::size_t>(r_test.rows()),
                            static_cast<std::size_t>(r_synth.rows()));
  const double inner = r_test.cwiseProduct(r_synth).sum();
  const double denom = r_test.norm() * r_synth.norm();
  TestResult res;
  res.name = "Correlations";
  res.group = TestGroup::general;
  res.detail = TestDetail::basic;
  const double raw = denom > 0.0 ? inner / denom : 0.0;
  res.score = clamp01(raw);
  res.diagnostics["raw_similarity"] = raw;
  return res;
}

struct IvEntry {
  std::string feature;
  double iv = 0.0;
};
using IvVector = std::vector<IvEntry>;

// Information Value per non-target feature: numerics are decile-binned with
// the supplied map, categoricals use their classes. Counts get an additive
// smoothing term so empty cells stay finite.
inline IvVector information_value(const Dataset& d, const BinningMap& bins,
                                  double smoothing = 0.5) {
  d.require_binary_target();
  const auto y = d.target();
  bool pos = false, neg = false;
  for (double v : y) (v == 1.0 ? pos : neg) = true;
  if (!pos || !neg) throw DegenerateTarget();

  IvVector out;
  for (std::size_t i = 0; i < d.schema.size(); ++i) {
    const auto& cs = d.schema[i];
    if (cs.is_target) continue;

    // class index per row
    std::vector<std::size_t> cls(d.n_rows);
    std::size_t n_classes;
    if (cs.kind == ColumnKind::numeric) {
      const auto& b = bins.at(cs.name);
      n_classes = b.bin_count();
      for (std::size_t r = 0; r < d.n_rows; ++r) cls[r] = b.bin_of(d.columns[i].values[r]);
    } else {
      n_classes = d.columns[i].classes.size();
      for (std::size_t r = 0; r < d.n_rows; ++r)
        cls[r] = static_cast<std::size_t>(d.columns[i].codes[r]);
    }

    std::vector<double> goods(n_classes, 0.0), bads(n_classes, 0.0);
    double n_good = 0.0, n_bad = 0.0;
    for (std::size_t r = 0; r < d.n_rows; ++r) {
      if (y[r] == 1.0) {
        goods[cls[r]] += 1.0;
        n_good += 1.0;
      } else {
        bads[cls[r]] += 1.0;
        n_bad += 1.0;
      }
    }

    // drop classes empty on both sides, smooth the rest
    double iv = 0.0;
    std::size_t populated = 0;
    for (std::size_t c = 0; c < n_classes; ++c) populated += goods[c] + bads[c] > 0.0;
    const double good_denom = n_good + smoothing * static_cast<double>(populated);
    const double bad_denom = n_bad + smoothing * static_cast<double>(populated);
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (goods[c] + bads[c] == 0.0) continue;
      const double g = (goods[c] + smoothing) / good_denom;
      const double b = (bads[c] + smoothing) / bad_denom;
      iv += (g - b) * std::log(g / b);
    }
    out.push_back({cs.name, iv});
  }
  return out;
}

// Pearson correlation of the two IV vectors, clamped at zero from below.
inline TestResult predictive_power_test(const IvVector& iv_test, const IvVector& iv_synth) {
  if (iv_test.size() != iv_synth.size())
    throw DimensionMismatch(iv_test.size(), iv_synth.size());
  if (iv_test.size() < 2) throw TooFewFeatures();

  std::vector<double> u(iv_test.size()), v(iv_synth.size());
  for (std::size_t i = 0; i < iv_test.size(); ++i) {
    u[i] = iv_test[i].iv;
    v[i] = iv_synth[i].iv;
  }

  TestResult res;
  res.name = "Predictive Power";
  res.group = TestGroup::general;
  res.detail = TestDetail::basic;
  const double rho = pearson(u, v);
  if (std::isnan(rho)) {
    res.score = 0.0;
    res.diagnostics["note"] = "constant IV vector; correlation undefined";
  } else {
    res.score = std::max(0.0, rho);
    res.diagnostics["raw_pearson"] = rho;
  }
  return res;
}

}  // namespace synthaudit
