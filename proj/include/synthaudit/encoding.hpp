#pragma once

// Smoothed target-mean encoding for categorical columns. The encoder is
// fitted once (on the benchmark split) and applied as a static mapping to
// every dataset, so each side of a comparison suffers the same distortion.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"

namespace synthaudit {

struct TargetEncoder {
  std::map<std::string, std::map<std::string, double>> codes;  // column -> class -> code
  double prior = 0.0;
  double smoothing = 1.0;

  // Unseen classes fall back to the prior.
  double encode(const std::string& column, const std::string& label) const {
    auto ci = codes.find(column);
    if (ci == codes.end()) throw SchemaMismatch(column);
    auto li = ci->second.find(label);
    return li == ci->second.end() ? prior : li->second;
  }
};

// code(c) = (sum of target over class c + a * prior) / (count(c) + a)
inline TargetEncoder fit_target_encoding(const Dataset& d, double smoothing = 1.0) {
  d.require_binary_target();
  const auto y = d.target();
  double prior = 0.0;
  for (double v : y) prior += v;
  prior /= static_cast<double>(y.size());

  TargetEncoder enc;
  enc.prior = prior;
  enc.smoothing = smoothing;
  for (std::size_t i = 0; i < d.schema.size(); ++i) {
    if (d.schema[i].kind != ColumnKind::categorical) continue;
    const auto& col = d.columns[i];
    std::vector<double> sum(col.classes.size(), 0.0);
    std::vector<double> count(col.classes.size(), 0.0);
    for (std::size_t r = 0; r < col.codes.size(); ++r) {
      sum[col.codes[r]] += y[r];
      count[col.codes[r]] += 1.0;
    }
    auto& m = enc.codes[d.schema[i].name];
    for (std::size_t c = 0; c < col.classes.size(); ++c)
      m[col.classes[c]] = (sum[c] + smoothing * prior) / (count[c] + smoothing);
  }
  return enc;
}

// Materialize selected columns as a dense numeric matrix: numeric columns
// pass through, categorical columns go through the encoder.
inline Eigen::MatrixXd encode_columns(const Dataset& d, const TargetEncoder& enc,
                                      const std::vector<std::string>& names) {
  Eigen::MatrixXd X(d.n_rows, names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto ci = d.column_index(names[j]);
    const auto& col = d.columns[ci];
    if (d.schema[ci].kind == ColumnKind::numeric) {
      for (std::size_t r = 0; r < d.n_rows; ++r) X(r, j) = col.values[r];
    } else {
      // per-class lookup done once, then splatted by code
      std::vector<double> by_code(col.classes.size());
      for (std::size_t c = 0; c < col.classes.size(); ++c)
        by_code[c] = enc.encode(names[j], col.classes[c]);
      for (std::size_t r = 0; r < d.n_rows; ++r) X(r, j) = by_code[col.codes[r]];
    }
  }
  return X;
}

inline Eigen::MatrixXd encode_features(const Dataset& d, const TargetEncoder& enc) {
  return encode_columns(d, enc, d.feature_names());
}

}  // namespace synthaudit
