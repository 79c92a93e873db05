#pragma once

// Distribution similarity battery: per-variable chi-square and MMD tests,
// Boruta-selected multivariate MMD, power-set categorical groups, and the
// real-vs-synthetic discriminator.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "synthaudit/binning.hpp"
#include "synthaudit/chisquare.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/encoding.hpp"
#include "synthaudit/ml/forest.hpp"
#include "synthaudit/ml/gbm.hpp"
#include "synthaudit/ml/net.hpp"
#include "synthaudit/mmd.hpp"
#include "synthaudit/testresult.hpp"

namespace synthaudit {

struct DistribConfig {
  double alpha = 0.05;
  std::size_t permutations = 500;
  std::size_t mmd_subsample = 2000;
  std::size_t max_group_size = 4;
  std::size_t boruta_max_rounds = 100;
};

namespace detail {

// Class counts aligned by label across the two datasets.
inline void categorical_counts(const Dataset& a, const Dataset& b, std::size_t col,
                               std::vector<double>& counts_a, std::vector<double>& counts_b) {
  std::map<std::string, std::pair<double, double>> table;
  for (std::int32_t code : a.columns[col].codes) table[a.columns[col].label_of(code)].first += 1.0;
  for (std::int32_t code : b.columns[col].codes) table[b.columns[col].label_of(code)].second += 1.0;
  counts_a.clear();
  counts_b.clear();
  for (const auto& [label, c] : table) {
    counts_a.push_back(c.first);
    counts_b.push_back(c.second);
  }
}

inline void binned_counts(const Dataset& d, std::size_t col, const DecileBins& bins,
                          std::vector<double>& counts) {
  counts.assign(bins.bin_count(), 0.0);
  for (double v : d.columns[col].values) counts[bins.bin_of(v)] += 1.0;
}

inline std::vector<double> subsample_column(const Dataset& d, std::size_t col, std::size_t cap,
                                            std::uint64_t seed) {
  const auto& values = d.columns[col].values;
  if (values.size() <= cap) return values;
  Rng rng(seed);
  auto idx = rng.sample_without_replacement(values.size(), cap);
  std::vector<double> out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = values[idx[i]];
  return out;
}

inline Eigen::MatrixXd subsample_matrix(const Eigen::MatrixXd& X, std::size_t cap,
                                        std::uint64_t seed) {
  if (static_cast<std::size_t>(X.rows()) <= cap) return X;
  Rng rng(seed);
  auto idx = rng.sample_without_replacement(static_cast<std::size_t>(X.rows()), cap);
  Eigen::MatrixXd out(idx.size(), X.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(i) = X.row(idx[i]);
  return out;
}

}  // namespace detail

// Fraction of variables whose class frequencies pass the chi-square test;
// numerics enter through decile bins fitted on the benchmark split.
inline TestResult univariate_binned_test(const Dataset& test, const Dataset& synth,
                                         const BinningMap& bins, const DistribConfig& cfg) {
  std::size_t accepted = 0, rejected = 0;
  auto columns = nlohmann::ordered_json::object();
  std::vector<double> ct, cs;
  for (std::size_t i = 0; i < test.schema.size(); ++i) {
    const auto& name = test.schema[i].name;
    const std::size_t j = synth.column_index(name);
    if (test.schema[i].kind == ColumnKind::categorical) {
      detail::categorical_counts(test, synth, i, ct, cs);
    } else {
      const auto& b = bins.at(name);
      detail::binned_counts(test, i, b, ct);
      detail::binned_counts(synth, j, b, cs);
    }
    const auto r = chi_square_two_sample(ct, cs, cfg.alpha);
    if (r.skipped()) {
      columns[name] = {{"status", "skipped"}, {"reason", r.skip_reason}};
      continue;
    }
    (r.accepted() ? accepted : rejected) += 1;
    columns[name] = {{"status", r.accepted() ? "accepted" : "rejected"},
                     {"statistic", r.statistic},
                     {"p_value", r.p_value}};
  }

  TestResult res;
  res.name = "Uni Distrib (bins)";
  res.group = TestGroup::distrib;
  res.detail = TestDetail::basic;
  res.diagnostics["columns"] = columns;
  if (accepted + rejected == 0) {
    res.diagnostics["skipped"] = "no testable variable";
  } else {
    res.score = static_cast<double>(accepted) / static_cast<double>(accepted + rejected);
  }
  return res;
}

// Fraction of numeric variables whose subsampled MMD permutation test
// accepts. Per-column seeds derive from the column name only, so audits of
// the same schema draw identical subsamples and permutations.
inline TestResult univariate_mmd_test(const Dataset& test, const Dataset& synth,
                                      const DistribConfig& cfg, std::uint64_t seed) {
  std::size_t accepted = 0, rejected = 0;
  auto columns = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < test.schema.size(); ++i) {
    if (test.schema[i].kind != ColumnKind::numeric) continue;
    const auto& name = test.schema[i].name;
    const std::size_t j = synth.column_index(name);
    const auto col_tag = hash_tag(name);
    const auto x = detail::subsample_column(test, i, cfg.mmd_subsample,
                                            derive_seed(seed, {hash_tag("mmd.sub.test"), col_tag}));
    const auto y = detail::subsample_column(synth, j, cfg.mmd_subsample,
                                            derive_seed(seed, {hash_tag("mmd.sub.synth"), col_tag}));
    try {
      const auto null = mmd_permutation_test(x, y, cfg.permutations, cfg.alpha,
                                             derive_seed(seed, {hash_tag("mmd.col"), col_tag}));
      (null.accepted ? accepted : rejected) += 1;
      columns[name] = {{"status", null.accepted ? "accepted" : "rejected"},
                       {"observed", null.observed},
                       {"threshold", null.threshold},
                       {"sigma", null.sigma}};
    } catch (const DegenerateSample&) {
      columns[name] = {{"status", "skipped"}, {"reason", "degenerate pooled sample"}};
    }
  }

  TestResult res;
  res.name = "Uni Distrib (MMD)";
  res.group = TestGroup::distrib;
  res.detail = TestDetail::in_depth;
  res.diagnostics["columns"] = columns;
  if (accepted + rejected == 0) {
    res.diagnostics["skipped"] = "no testable numeric variable";
  } else {
    res.score = static_cast<double>(accepted) / static_cast<double>(accepted + rejected);
  }
  return res;
}

// Shadow-feature selection: each round appends a permuted copy of every
// active feature, fits a forest, and marks features beating the best shadow.
// Two-sided binomial tests on the hit counts confirm or drop features.
// Returns the confirmed numeric feature names.
inline std::vector<std::string> boruta_select(const Dataset& d, const TargetEncoder& enc,
                                              const DistribConfig& cfg, std::uint64_t seed) {
  d.require_binary_target();
  const auto features = d.feature_names();
  const Eigen::MatrixXd X = encode_columns(d, enc, features);
  const auto y = d.target();
  detail::check_both_classes(y);

  const std::size_t p = features.size();
  enum class State { undecided, confirmed, rejected };
  std::vector<State> state(p, State::undecided);
  std::vector<std::size_t> hits(p, 0);

  for (std::size_t round = 1; round <= cfg.boruta_max_rounds; ++round) {
    std::vector<std::size_t> active;
    for (std::size_t f = 0; f < p; ++f)
      if (state[f] != State::rejected) active.push_back(f);
    if (active.empty()) break;

    Eigen::MatrixXd Xr(X.rows(), 2 * active.size());
    for (std::size_t a = 0; a < active.size(); ++a) {
      Xr.col(a) = X.col(active[a]);
      Rng rng(derive_seed(seed, {hash_tag("boruta.shadow"), round, a}));
      auto perm = rng.permutation(static_cast<std::size_t>(X.rows()));
      for (std::size_t r = 0; r < perm.size(); ++r)
        Xr(r, active.size() + a) = X(perm[r], active[a]);
    }

    const auto forest = train_forest(Xr, y, derive_seed(seed, {hash_tag("boruta.forest"), round}));
    double max_shadow = 0.0;
    for (std::size_t a = 0; a < active.size(); ++a)
      max_shadow = std::max(max_shadow, forest.feature_importances[active.size() + a]);
    for (std::size_t a = 0; a < active.size(); ++a)
      if (forest.feature_importances[a] > max_shadow) hits[active[a]] += 1;

    bool undecided_left = false;
    for (std::size_t f = 0; f < p; ++f) {
      if (state[f] != State::undecided) continue;
      const double pval = binomial_two_sided_p(hits[f], round);
      const double half = static_cast<double>(round) / 2.0;
      if (pval < 0.05 && static_cast<double>(hits[f]) > half)
        state[f] = State::confirmed;
      else if (pval < 0.05 && static_cast<double>(hits[f]) < half)
        state[f] = State::rejected;
      else
        undecided_left = true;
    }
    if (!undecided_left) break;
  }

  std::vector<std::string> selected;
  for (std::size_t f = 0; f < p; ++f) {
    if (state[f] != State::confirmed) continue;
    const auto ci = d.column_index(features[f]);
    if (d.schema[ci].kind == ColumnKind::numeric) selected.push_back(features[f]);
  }
  return selected;
}

// Single multivariate MMD permutation test on the selected numeric columns.
inline TestResult multivariate_continuous_test(const Dataset& test, const Dataset& synth,
                                               const std::vector<std::string>& selected,
                                               const DistribConfig& cfg, std::uint64_t seed) {
  TestResult res;
  res.name = "Multi-Continuous Distrib";
  res.group = TestGroup::distrib;
  res.detail = TestDetail::in_depth;
  res.diagnostics["selected"] = selected;
  if (selected.empty()) {
    res.diagnostics["skipped"] = "empty feature selection";
    return res;
  }

  auto gather = [&](const Dataset& d) {
    Eigen::MatrixXd M(d.n_rows, selected.size());
    for (std::size_t j = 0; j < selected.size(); ++j) {
      const auto ci = d.column_index(selected[j]);
      for (std::size_t r = 0; r < d.n_rows; ++r) M(r, j) = d.columns[ci].values[r];
    }
    return M;
  };
  const auto x = detail::subsample_matrix(gather(test), cfg.mmd_subsample,
                                          derive_seed(seed, {hash_tag("mmd.mv.test")}));
  const auto y = detail::subsample_matrix(gather(synth), cfg.mmd_subsample,
                                          derive_seed(seed, {hash_tag("mmd.mv.synth")}));
  try {
    const auto null =
        mmd_permutation_test(x, y, cfg.permutations, cfg.alpha,
                             derive_seed(seed, {hash_tag("mmd.mv")}));
    res.score = null.accepted ? 1.0 : 0.0;
    res.diagnostics["observed"] = null.observed;
    res.diagnostics["threshold"] = null.threshold;
    res.diagnostics["sigma"] = null.sigma;
  } catch (const DegenerateSample&) {
    res.diagnostics["skipped"] = "degenerate pooled sample";
  }
  return res;
}

namespace detail {

inline std::string group_key(const std::vector<std::size_t>& group,
                             const std::vector<std::string>& names) {
  std::string key;
  for (std::size_t g : group) {
    if (!key.empty()) key += "*";
    key += names[g];
  }
  return key;
}

// Contingency counts of the cartesian-product variable, aligned by label
// tuple across the two datasets.
inline void product_counts(const Dataset& a, const Dataset& b,
                           const std::vector<std::size_t>& cols_a,
                           const std::vector<std::size_t>& cols_b, std::vector<double>& counts_a,
                           std::vector<double>& counts_b) {
  auto key_of = [](const Dataset& d, const std::vector<std::size_t>& cols, std::size_t row) {
    std::string key;
    for (std::size_t c : cols) {
      key += d.columns[c].label_of(d.columns[c].codes[row]);
      key += '\x1f';
    }
    return key;
  };
  std::map<std::string, std::pair<double, double>> table;
  for (std::size_t r = 0; r < a.n_rows; ++r) table[key_of(a, cols_a, r)].first += 1.0;
  for (std::size_t r = 0; r < b.n_rows; ++r) table[key_of(b, cols_b, r)].second += 1.0;
  counts_a.clear();
  counts_b.clear();
  for (const auto& [key, c] : table) {
    counts_a.push_back(c.first);
    counts_b.push_back(c.second);
  }
}

}  // namespace detail

// Chi-square over cartesian-product variables for every categorical group,
// breadth-first by group size. Groups whose assumptions fail are skipped and
// all their supersets pruned; the score is the accepted fraction of the
// groups actually tested.
inline TestResult multivariate_categorical_test(const Dataset& test, const Dataset& synth,
                                                const DistribConfig& cfg) {
  TestResult res;
  res.name = "Multi-Categorical Distrib";
  res.group = TestGroup::distrib;
  res.detail = TestDetail::basic;

  std::vector<std::size_t> cat_test;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < test.schema.size(); ++i) {
    if (test.schema[i].kind == ColumnKind::categorical) {
      cat_test.push_back(i);
      names.push_back(test.schema[i].name);
    }
  }
  if (names.size() < 2) {
    res.diagnostics["skipped"] = "fewer than two categorical variables";
    return res;
  }

  enum class Status { accepted, rejected, skipped, pruned };
  std::map<std::vector<std::size_t>, Status> log;  // groups as index sets into names
  std::size_t accepted = 0, rejected = 0;
  auto groups_json = nlohmann::ordered_json::object();
  std::vector<double> ct, cs;

  const std::size_t k_max = std::min(cfg.max_group_size, names.size());
  for (std::size_t k = 2; k <= k_max; ++k) {
    // lexicographic k-combinations
    std::vector<std::size_t> comb(k);
    for (std::size_t i = 0; i < k; ++i) comb[i] = i;
    for (;;) {
      bool blocked = false;
      if (k > 2) {
        std::vector<std::size_t> sub(comb.begin(), comb.end() - 1);
        for (std::size_t drop = 0; drop < k && !blocked; ++drop) {
          sub.clear();
          for (std::size_t i = 0; i < k; ++i)
            if (i != drop) sub.push_back(comb[i]);
          const auto it = log.find(sub);
          blocked = it == log.end() || it->second == Status::skipped ||
                    it->second == Status::pruned;
        }
      }

      const auto key = detail::group_key(comb, names);
      if (blocked) {
        log[comb] = Status::pruned;
        groups_json[key] = "pruned";
      } else {
        std::vector<std::size_t> cols_t, cols_s;
        for (std::size_t g : comb) {
          cols_t.push_back(test.column_index(names[g]));
          cols_s.push_back(synth.column_index(names[g]));
        }
        detail::product_counts(test, synth, cols_t, cols_s, ct, cs);
        const auto r = chi_square_two_sample(ct, cs, cfg.alpha);
        if (r.skipped()) {
          log[comb] = Status::skipped;
          groups_json[key] = "skipped: " + r.skip_reason;
        } else if (r.accepted()) {
          log[comb] = Status::accepted;
          ++accepted;
          groups_json[key] = "accepted";
        } else {
          log[comb] = Status::rejected;
          ++rejected;
          groups_json[key] = "rejected";
        }
      }

      // next combination
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == names.size() - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }

  res.diagnostics["groups"] = groups_json;
  if (accepted + rejected == 0) {
    res.diagnostics["skipped"] = "no testable group";
  } else {
    res.score = static_cast<double>(accepted) / static_cast<double>(accepted + rejected);
  }
  return res;
}

// Train a boosted model and a network to tell real rows (train + test) from
// synthetic ones; score = 1 - mean holdout Gini. Indistinguishable data
// scores near 1.
inline TestResult discriminator_test(const Dataset& train, const Dataset& test,
                                     const Dataset& synth, const TargetEncoder& enc,
                                     std::uint64_t seed, const GbmConfig& gbm_cfg = {},
                                     const NetConfig& net_cfg = {}) {
  std::vector<std::string> names;
  for (const auto& cs : train.schema) names.push_back(cs.name);

  const Eigen::MatrixXd a = encode_columns(train, enc, names);
  const Eigen::MatrixXd b = encode_columns(test, enc, names);
  const Eigen::MatrixXd c = encode_columns(synth, enc, names);

  Eigen::MatrixXd real(a.rows() + b.rows(), a.cols());
  real << a, b;

  auto split = [&](std::size_t n, std::uint64_t tag) {
    Rng rng(derive_seed(seed, {hash_tag("discriminator.split"), tag}));
    auto idx = rng.permutation(n);
    const std::size_t cut = n - n * 3 / 10;
    return std::pair(std::vector<std::size_t>(idx.begin(), idx.begin() + cut),
                     std::vector<std::size_t>(idx.begin() + cut, idx.end()));
  };
  const auto [real_fit, real_hold] = split(static_cast<std::size_t>(real.rows()), 0);
  const auto [synth_fit, synth_hold] = split(static_cast<std::size_t>(c.rows()), 1);

  const auto n_fit = real_fit.size() + synth_fit.size();
  Eigen::MatrixXd Xf(n_fit, real.cols());
  std::vector<double> yf(n_fit);
  std::size_t r = 0;
  for (std::size_t i : real_fit) {
    Xf.row(r) = real.row(i);
    yf[r++] = 0.0;
  }
  for (std::size_t i : synth_fit) {
    Xf.row(r) = c.row(i);
    yf[r++] = 1.0;
  }

  const auto n_hold = real_hold.size() + synth_hold.size();
  Eigen::MatrixXd Xh(n_hold, real.cols());
  std::vector<double> yh(n_hold);
  r = 0;
  for (std::size_t i : real_hold) {
    Xh.row(r) = real.row(i);
    yh[r++] = 0.0;
  }
  for (std::size_t i : synth_hold) {
    Xh.row(r) = c.row(i);
    yh[r++] = 1.0;
  }

  const auto gbm = train_gbm(Xf, yf, derive_seed(seed, {hash_tag("discriminator.gbm")}), gbm_cfg);
  const auto nn = train_nn(Xf, yf, derive_seed(seed, {hash_tag("discriminator.nn")}), net_cfg);

  const double gini_gbm = std::clamp(gini(predict_proba(gbm, Xh), yh), 0.0, 1.0);
  const double gini_nn = std::clamp(gini(predict_proba(nn, Xh), yh), 0.0, 1.0);

  TestResult res;
  res.name = "Discriminator";
  res.group = TestGroup::distrib;
  res.detail = TestDetail::in_depth;
  res.score = clamp01(1.0 - (gini_gbm + gini_nn) / 2.0);
  res.diagnostics["gini_gbm"] = gini_gbm;
  res.diagnostics["gini_nn"] = gini_nn;
  res.diagnostics["holdout_rows"] = n_hold;
  return res;
}

}  // namespace synthaudit
