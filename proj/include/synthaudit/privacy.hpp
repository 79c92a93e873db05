#pragma once

// Black-box privacy battery: singling-out (cloned / close rows), linkability
// (distance attack in FAMD space, ML error attack), and inference risk.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "synthaudit/binning.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/encoding.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/ml/metrics.hpp"
#include "synthaudit/ml/net.hpp"
#include "synthaudit/special.hpp"
#include "synthaudit/testresult.hpp"

namespace synthaudit {

namespace detail {

// Canonical row key: numerics rounded to 9 significant digits so CSV
// round-trips compare stable, categoricals by label.
inline std::string row_fingerprint(const Dataset& d, std::size_t row) {
  std::string key;
  char buf[40];
  for (std::size_t c = 0; c < d.schema.size(); ++c) {
    if (d.schema[c].kind == ColumnKind::numeric) {
      std::snprintf(buf, sizeof(buf), "%.9g", d.columns[c].values[row]);
      key += buf;
    } else {
      key += d.columns[c].label_of(d.columns[c].codes[row]);
    }
    key += '\x1f';
  }
  return key;
}

}  // namespace detail

// Fraction of synthetic rows that do NOT literally appear in the training
// data. A memorizing generator scores 0.
inline TestResult cloned_rows_test(const Dataset& train, const Dataset& synth) {
  std::unordered_set<std::string> train_rows;
  train_rows.reserve(train.n_rows * 2);
  for (std::size_t r = 0; r < train.n_rows; ++r)
    train_rows.insert(detail::row_fingerprint(train, r));

  std::size_t cloned = 0;
  for (std::size_t r = 0; r < synth.n_rows; ++r)
    cloned += train_rows.count(detail::row_fingerprint(synth, r)) > 0;

  TestResult res;
  res.name = "Cloned Rows";
  res.group = TestGroup::privacy;
  res.detail = TestDetail::basic;
  res.score = 1.0 - static_cast<double>(cloned) / static_cast<double>(synth.n_rows);
  res.diagnostics["cloned_rows"] = cloned;
  return res;
}

// Fraction of synthetic rows with no training row within Hamming distance 1
// once numerics are replaced by their decile bins. Training rows above the
// cap are uniformly subsampled.
inline TestResult close_rows_test(const Dataset& train, const Dataset& synth,
                                  const BinningMap& bins, std::size_t train_cap = 20000,
                                  std::uint64_t seed = 0) {
  const std::size_t p = train.schema.size();

  // integer-coded view: bin index for numerics, shared label code for categoricals
  auto code_rows = [&](const Dataset& d, std::map<std::string, std::int32_t>& labels) {
    std::vector<std::int32_t> grid(d.n_rows * p);
    for (std::size_t c = 0; c < p; ++c) {
      const auto ci = d.column_index(train.schema[c].name);
      if (d.schema[ci].kind == ColumnKind::numeric) {
        const auto& b = bins.at(train.schema[c].name);
        for (std::size_t r = 0; r < d.n_rows; ++r)
          grid[r * p + c] = static_cast<std::int32_t>(b.bin_of(d.columns[ci].values[r]));
      } else {
        for (std::size_t r = 0; r < d.n_rows; ++r) {
          const auto& label = d.columns[ci].label_of(d.columns[ci].codes[r]);
          auto [it, inserted] = labels.emplace(label, static_cast<std::int32_t>(labels.size()));
          grid[r * p + c] = it->second;
        }
      }
    }
    return grid;
  };
  std::map<std::string, std::int32_t> shared_labels;
  const auto train_grid = code_rows(train, shared_labels);
  const auto synth_grid = code_rows(synth, shared_labels);

  std::vector<std::size_t> train_rows(train.n_rows);
  for (std::size_t i = 0; i < train.n_rows; ++i) train_rows[i] = i;
  if (train.n_rows > train_cap) {
    Rng rng(derive_seed(seed, {hash_tag("close_rows.cap")}));
    train_rows = rng.sample_without_replacement(train.n_rows, train_cap);
  }

  std::size_t lonely = 0;
  for (std::size_t s = 0; s < synth.n_rows; ++s) {
    const std::int32_t* srow = &synth_grid[s * p];
    bool close = false;
    for (std::size_t t : train_rows) {
      const std::int32_t* trow = &train_grid[t * p];
      std::size_t mismatches = 0;
      for (std::size_t c = 0; c < p; ++c) {
        if (srow[c] != trow[c] && ++mismatches > 1) break;
      }
      if (mismatches <= 1) {
        close = true;
        break;
      }
    }
    lonely += !close;
  }

  TestResult res;
  res.name = "Close Rows";
  res.group = TestGroup::privacy;
  res.detail = TestDetail::basic;
  res.score = static_cast<double>(lonely) / static_cast<double>(synth.n_rows);
  res.diagnostics["close_rows"] = synth.n_rows - lonely;
  res.diagnostics["train_rows_scanned"] = train_rows.size();
  return res;
}

// ---------------------------------------------------------------------------
// Factor analysis of mixed data: z-scored numerics plus centered one-hot
// columns weighted by 1/sqrt(class proportion), eigendecomposed.
// ---------------------------------------------------------------------------

struct FamdModel {
  struct NumericStats {
    double mean = 0.0, scale = 1.0;
  };
  struct CategoricalStats {
    std::vector<std::string> classes;
    std::vector<double> proportions;
  };
  std::vector<std::string> column_names;
  std::vector<ColumnKind> kinds;
  std::vector<NumericStats> numeric_stats;          // indexed like column_names
  std::vector<CategoricalStats> categorical_stats;  // idem
  Eigen::MatrixXd components;                       // encoded-dim x k
  std::vector<double> explained_fractions;          // all eigenvalue fractions
  std::vector<double> eigenvalues;
  std::size_t k = 0;

  std::size_t encoded_width() const { return static_cast<std::size_t>(components.rows()); }
};

namespace detail {

inline Eigen::MatrixXd famd_encode(const FamdModel& m, const Dataset& d) {
  Eigen::MatrixXd Z(d.n_rows, m.encoded_width());
  std::size_t out = 0;
  for (std::size_t c = 0; c < m.column_names.size(); ++c) {
    const auto ci = d.column_index(m.column_names[c]);
    if (m.kinds[c] == ColumnKind::numeric) {
      const auto& st = m.numeric_stats[c];
      for (std::size_t r = 0; r < d.n_rows; ++r)
        Z(r, out) = (d.columns[ci].values[r] - st.mean) / st.scale;
      ++out;
    } else {
      const auto& st = m.categorical_stats[c];
      for (std::size_t cls = 0; cls < st.classes.size(); ++cls) {
        const double prop = st.proportions[cls];
        const double w = 1.0 / std::sqrt(prop);
        const auto code = [&](std::size_t r) {
          return d.columns[ci].label_of(d.columns[ci].codes[r]) == st.classes[cls] ? 1.0 : 0.0;
        };
        for (std::size_t r = 0; r < d.n_rows; ++r) Z(r, out) = (code(r) - prop) * w;
        ++out;
      }
    }
  }
  return Z;
}

}  // namespace detail

// Fit on the union of the real splits; classes unseen there contribute
// nothing at projection time.
inline FamdModel famd_fit(const Dataset& train, const Dataset& test) {
  FamdModel m;
  const std::size_t n = train.n_rows + test.n_rows;
  std::size_t width = 0;

  for (std::size_t c = 0; c < train.schema.size(); ++c) {
    const auto& cs = train.schema[c];
    m.column_names.push_back(cs.name);
    m.kinds.push_back(cs.kind);
    m.numeric_stats.emplace_back();
    m.categorical_stats.emplace_back();
    const auto ti = test.column_index(cs.name);
    if (cs.kind == ColumnKind::numeric) {
      double sum = 0.0;
      for (double v : train.columns[c].values) sum += v;
      for (double v : test.columns[ti].values) sum += v;
      const double mean = sum / static_cast<double>(n);
      double ss = 0.0;
      for (double v : train.columns[c].values) ss += (v - mean) * (v - mean);
      for (double v : test.columns[ti].values) ss += (v - mean) * (v - mean);
      const double var = ss / static_cast<double>(n);
      m.numeric_stats.back() = {mean, var > 0.0 ? std::sqrt(var) : 1.0};
      ++width;
    } else {
      std::map<std::string, double> counts;
      for (std::int32_t code : train.columns[c].codes)
        counts[train.columns[c].label_of(code)] += 1.0;
      for (std::int32_t code : test.columns[ti].codes)
        counts[test.columns[ti].label_of(code)] += 1.0;
      auto& st = m.categorical_stats.back();
      for (const auto& [label, count] : counts) {
        st.classes.push_back(label);
        st.proportions.push_back(count / static_cast<double>(n));
        ++width;
      }
    }
  }

  // covariance of the encoded fit data
  FamdModel probe = m;
  probe.components = Eigen::MatrixXd::Identity(width, width);
  Eigen::MatrixXd Z(n, width);
  Z.topRows(train.n_rows) = detail::famd_encode(probe, train);
  Z.bottomRows(test.n_rows) = detail::famd_encode(probe, test);
  Z.rowwise() -= Z.colwise().mean().eval();
  const Eigen::MatrixXd cov = Z.transpose() * Z / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw DegenerateData();

  // eigen-pairs in decreasing order
  const Eigen::Index w = cov.rows();
  std::vector<double> values(w);
  double total = 0.0;
  for (Eigen::Index i = 0; i < w; ++i) {
    values[i] = std::max(0.0, eig.eigenvalues()(w - 1 - i));
    total += values[i];
  }
  if (total <= 0.0) throw DegenerateData();

  std::size_t k = 0;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    m.eigenvalues.push_back(values[i]);
    m.explained_fractions.push_back(values[i] / total);
    if (k == 0) {
      acc += values[i] / total;
      if (acc >= 0.8) k = i + 1;
    }
  }
  if (k == 0) k = values.size();
  k = std::min<std::size_t>(k, 10);

  m.components.resize(w, static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i)
    m.components.col(static_cast<Eigen::Index>(i)) = eig.eigenvectors().col(w - 1 - static_cast<Eigen::Index>(i));
  m.k = k;
  return m;
}

inline Eigen::MatrixXd famd_project(const FamdModel& m, const Dataset& d) {
  return detail::famd_encode(m, d) * m.components;
}

// Distance attack: rank each real record by the share of synthetic records
// inside its epsilon-ball (epsilon = scaled median nearest-synthetic-neighbor
// distance). An overfit generator separates train from test by rank; the
// score is 1 minus the clamped Gini of that separation, so rank distributions
// indistinguishable between the splits score near 1.
inline TestResult linkability_distance_test(const Dataset& train, const Dataset& test,
                                            const Dataset& synth, const FamdModel& famd,
                                            double eps_scale = 1.0) {
  const Eigen::MatrixXd pt = famd_project(famd, train);
  const Eigen::MatrixXd pe = famd_project(famd, test);
  const Eigen::MatrixXd ps = famd_project(famd, synth);

  const std::size_t n_real = static_cast<std::size_t>(pt.rows() + pe.rows());
  const std::size_t n_synth = static_cast<std::size_t>(ps.rows());

  auto real_row = [&](std::size_t i) -> Eigen::RowVectorXd {
    return i < static_cast<std::size_t>(pt.rows()) ? pt.row(i) : pe.row(i - pt.rows());
  };

  // two passes keep memory at O(n_real) instead of the full distance matrix
  std::vector<double> nearest(n_real);
  for (std::size_t i = 0; i < n_real; ++i) {
    const Eigen::RowVectorXd row = real_row(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_synth; ++j)
      best = std::min(best, (row - ps.row(j)).squaredNorm());
    nearest[i] = std::sqrt(best);
  }
  const double eps = median(nearest) * eps_scale;
  const double eps_sq = eps * eps;

  std::vector<double> rank(n_real), labels(n_real);
  for (std::size_t i = 0; i < n_real; ++i) {
    const Eigen::RowVectorXd row = real_row(i);
    std::size_t inside = 0;
    for (std::size_t j = 0; j < n_synth; ++j)
      inside += (row - ps.row(j)).squaredNorm() < eps_sq;
    rank[i] = static_cast<double>(inside) / static_cast<double>(n_synth);
    labels[i] = i < static_cast<std::size_t>(pt.rows()) ? 1.0 : 0.0;
  }

  const double auc_rank = auc(rank, labels);

  TestResult res;
  res.name = "Linkability Distance";
  res.group = TestGroup::privacy;
  res.detail = TestDetail::basic;
  // Gini-style rescale: chance-level separation (AUC 1/2) means no leak.
  res.score = clamp01(1.0 - std::max(0.0, 2.0 * auc_rank - 1.0));
  res.diagnostics["auc_rank"] = auc_rank;
  res.diagnostics["epsilon"] = eps;
  res.diagnostics["components"] = famd.k;
  return res;
}

// ML error attack: a network fitted on the synthetic data should not be
// systematically more accurate on training rows than on benchmark rows. The
// worst-case threshold on the per-row cross-entropy is the one-sided
// Kolmogorov-Smirnov statistic between the two error samples.
inline TestResult linkability_ml_test(const Dataset& train, const Dataset& test,
                                      const Dataset& synth, const TargetEncoder& enc,
                                      std::uint64_t seed, const NetConfig& net_cfg = {}) {
  const auto model = train_nn(encode_features(synth, enc), synth.target(),
                              derive_seed(seed, {hash_tag("linkability.nn")}), net_cfg);
  const auto err_train =
      cross_entropy(predict_proba(model, encode_features(train, enc)), train.target());
  const auto err_test =
      cross_entropy(predict_proba(model, encode_features(test, enc)), test.target());

  // max over tau of P_train{err < tau} - P_test{err < tau}
  std::vector<double> st = err_train, se = err_test;
  std::sort(st.begin(), st.end());
  std::sort(se.begin(), se.end());
  double best = 0.0, best_tau = 0.0;
  std::size_t i = 0, j = 0;
  while (i < st.size() || j < se.size()) {
    const double tau = i < st.size() && (j >= se.size() || st[i] <= se[j]) ? st[i] : se[j];
    while (i < st.size() && st[i] <= tau) ++i;
    while (j < se.size() && se[j] <= tau) ++j;
    const double diff = static_cast<double>(i) / static_cast<double>(st.size()) -
                        static_cast<double>(j) / static_cast<double>(se.size());
    if (diff > best) {
      best = diff;
      best_tau = tau;
    }
  }

  TestResult res;
  res.name = "Linkability ML";
  res.group = TestGroup::privacy;
  res.detail = TestDetail::basic;
  res.score = clamp01(1.0 - best);
  res.diagnostics["max_proportion_gap"] = best;
  res.diagnostics["tau"] = best_tau;
  return res;
}

// Modified R^2: squared error of a model fitted on synthetic data against
// the squared error of always predicting the aggregate mean, evaluated on
// training rows. Low scores flag sensitive-attribute disclosure.
inline TestResult inference_risk_test(const Dataset& train, const Dataset& synth,
                                      const TargetEncoder& enc,
                                      const std::vector<std::string>& public_features,
                                      const std::string& sensitive, std::uint64_t seed,
                                      const GbmConfig& gbm_cfg = {}) {
  if (public_features.empty()) throw EmptyPublicSet();
  std::size_t si;
  try {
    si = synth.column_index(sensitive);
  } catch (const SchemaMismatch&) {
    throw SensitiveNotFound(sensitive);
  }
  if (synth.schema[si].kind != ColumnKind::numeric) throw NotNumeric(sensitive);
  for (const auto& f : public_features)
    if (f == sensitive) throw ConfigError("sensitive column listed as public");

  const Eigen::MatrixXd Xs = encode_columns(synth, enc, public_features);
  const Eigen::MatrixXd Xt = encode_columns(train, enc, public_features);
  const auto& ys = synth.columns[si].values;
  const auto& yt = train.columns[train.column_index(sensitive)].values;

  bool binary = true, saw_zero = false, saw_one = false;
  for (double v : ys) {
    binary &= v == 0.0 || v == 1.0;
    (v == 1.0 ? saw_one : saw_zero) = true;
  }
  binary &= saw_zero && saw_one;  // constant columns go through the squared loss

  double y_bar = 0.0;
  for (double v : ys) y_bar += v;
  y_bar /= static_cast<double>(ys.size());

  std::vector<double> pred;
  const auto model_seed = derive_seed(seed, {hash_tag("inference.gbm")});
  if (binary) {
    const auto model = train_gbm(Xs, ys, model_seed, gbm_cfg);
    pred = predict_proba(model, Xt);
  } else {
    const auto model = train_gbm_squared(Xs, ys, model_seed, gbm_cfg);
    pred = predict_proba(model, Xt);
  }

  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < yt.size(); ++r) {
    num += (yt[r] - pred[r]) * (yt[r] - pred[r]);
    den += (yt[r] - y_bar) * (yt[r] - y_bar);
  }

  TestResult res;
  res.name = "Inference Risk";
  res.group = TestGroup::privacy;
  res.detail = TestDetail::in_depth;
  if (den == 0.0) {
    res.diagnostics["skipped"] = "sensitive column constant on training rows";
    return res;
  }
  const double ratio = num / den;
  res.score = clamp01(ratio);
  res.diagnostics["raw_ratio"] = ratio;
  res.diagnostics["aggregate_mean"] = y_bar;
  return res;
}

}  // namespace synthaudit
