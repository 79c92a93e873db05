#pragma once

// Suite orchestration: load the train/test/synth triple, fit the shared
// artifacts once (bins and encoder on the benchmark split, feature selection
// on the training split, factor model on their union), run the selected
// battery per synthetic dataset, and assemble the report.

#include <chrono>
#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "synthaudit/binning.hpp"
#include "synthaudit/copula.hpp"
#include "synthaudit/dataset.hpp"
#include "synthaudit/distribution.hpp"
#include "synthaudit/encoding.hpp"
#include "synthaudit/general.hpp"
#include "synthaudit/privacy.hpp"
#include "synthaudit/report.hpp"
#include "synthaudit/utility.hpp"

namespace synthaudit {

struct SuiteConfig {
  std::string train_path;
  std::string test_path;
  std::vector<std::string> synth_paths;
  std::vector<ColumnSchema> schema;

  std::vector<std::string> tests;  // empty selects the default battery
  std::uint64_t seed = 42;

  double alpha = 0.05;
  std::size_t permutations = 500;
  std::size_t mmd_subsample = 2000;
  std::size_t max_group_size = 4;
  std::size_t boruta_max_rounds = 100;
  double eps_scale = 1.0;
  double smoothing = 1.0;
  std::size_t close_rows_cap = 20000;
  std::vector<std::string> public_features;
  std::string sensitive;
  std::optional<double> split_fraction;  // shuffle-split of the train file when no test file

  GbmConfig gbm;
  NetConfig net;
};

struct RegistryEntry {
  const char* name;
  TestGroup group;
  TestDetail detail;
};

inline const std::vector<RegistryEntry>& test_registry() {
  static const std::vector<RegistryEntry> registry = {
      {"Correlations", TestGroup::general, TestDetail::basic},
      {"Predictive Power", TestGroup::general, TestDetail::basic},
      {"Uni Distrib (bins)", TestGroup::distrib, TestDetail::basic},
      {"Uni Distrib (MMD)", TestGroup::distrib, TestDetail::in_depth},
      {"Multi-Categorical Distrib", TestGroup::distrib, TestDetail::basic},
      {"Multi-Continuous Distrib", TestGroup::distrib, TestDetail::in_depth},
      {"Discriminator", TestGroup::distrib, TestDetail::in_depth},
      {"Aggregate Predictions", TestGroup::utility, TestDetail::basic},
      {"Single Predictions", TestGroup::utility, TestDetail::in_depth},
      {"Model Internals", TestGroup::utility, TestDetail::in_depth},
      {"Cloned Rows", TestGroup::privacy, TestDetail::basic},
      {"Close Rows", TestGroup::privacy, TestDetail::basic},
      {"Linkability Distance", TestGroup::privacy, TestDetail::basic},
      {"Linkability ML", TestGroup::privacy, TestDetail::basic},
      {"Inference Risk", TestGroup::privacy, TestDetail::in_depth},
  };
  return registry;
}

namespace detail {

class Fnv64 {
 public:
  void mix(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      h_ ^= bytes[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void mix(double v) { mix(&v, sizeof v); }
  void mix(const std::string& s) { mix(s.data(), s.size()); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

inline std::string fingerprint(const BinningMap& bins) {
  Fnv64 f;
  for (const auto& [name, b] : bins.per_column) {
    f.mix(name);
    for (double e : b.edges) f.mix(e);
  }
  return f.hex();
}

inline std::string fingerprint(const TargetEncoder& enc) {
  Fnv64 f;
  f.mix(enc.prior);
  f.mix(enc.smoothing);
  for (const auto& [col, m] : enc.codes) {
    f.mix(col);
    for (const auto& [label, code] : m) {
      f.mix(label);
      f.mix(code);
    }
  }
  return f.hex();
}

inline std::string fingerprint(const std::vector<std::string>& names) {
  Fnv64 f;
  for (const auto& n : names) f.mix(n);
  return f.hex();
}

inline std::string fingerprint(const FamdModel& famd) {
  Fnv64 f;
  for (double v : famd.eigenvalues) f.mix(v);
  for (Eigen::Index i = 0; i < famd.components.size(); ++i) f.mix(famd.components(i));
  return f.hex();
}

inline std::string path_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

// Flag columns appended by preprocess depend on where gaps occurred, so the
// datasets may disagree. Give every dataset the union (constant "0" where a
// dataset had no gaps) and one shared column order.
inline void harmonize_columns(std::vector<Dataset*> datasets) {
  std::vector<std::string> canonical;
  for (Dataset* d : datasets) {
    for (const auto& cs : d->schema) {
      bool known = false;
      for (const auto& name : canonical) known |= name == cs.name;
      if (!known) canonical.push_back(cs.name);
    }
  }
  for (Dataset* d : datasets) {
    for (const auto& name : canonical) {
      bool present = true;
      try {
        d->column_index(name);
      } catch (const SchemaMismatch&) {
        present = false;
      }
      if (!present) {
        ColumnSchema cs;
        cs.name = name;
        cs.kind = ColumnKind::categorical;
        Column col;
        col.intern("0");
        col.codes.assign(d->n_rows, 0);
        d->schema.push_back(std::move(cs));
        d->columns.push_back(std::move(col));
      }
    }
    // reorder to the canonical sequence
    std::vector<ColumnSchema> schema;
    std::vector<Column> columns;
    for (const auto& name : canonical) {
      const auto i = d->column_index(name);
      schema.push_back(std::move(d->schema[i]));
      columns.push_back(std::move(d->columns[i]));
    }
    d->schema = std::move(schema);
    d->columns = std::move(columns);
  }
}

}  // namespace detail

// Seeded shuffle-split of a raw dataset into (first, second) parts.
inline std::pair<Dataset, Dataset> shuffle_split(const Dataset& d, double fraction,
                                                 std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must be in (0,1)");
  Rng rng(derive_seed(seed, {hash_tag("shuffle_split")}));
  auto idx = rng.permutation(d.n_rows);
  const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(d.n_rows)));
  if (cut == 0 || cut >= d.n_rows) throw ConfigError("split produces an empty part");
  std::vector<std::size_t> first(idx.begin(), idx.begin() + cut);
  std::vector<std::size_t> second(idx.begin() + cut, idx.end());
  return {select_rows(d, first), select_rows(d, second)};
}

inline std::vector<std::string> resolve_selection(const SuiteConfig& cfg) {
  const bool inference_available = !cfg.sensitive.empty() && !cfg.public_features.empty();
  std::vector<std::string> selection;
  if (cfg.tests.empty()) {
    for (const auto& entry : test_registry()) {
      if (std::string(entry.name) == "Inference Risk" && !inference_available) continue;
      selection.push_back(entry.name);
    }
    return selection;
  }
  for (const auto& requested : cfg.tests) {
    bool known = false;
    for (const auto& entry : test_registry()) known |= requested == entry.name;
    if (!known) {
      std::string names;
      for (const auto& entry : test_registry()) {
        if (!names.empty()) names += ", ";
        names += entry.name;
      }
      throw ConfigError("unknown test '" + requested + "'; known tests: " + names);
    }
    bool dup = false;
    for (const auto& s : selection) dup |= s == requested;
    if (!dup) selection.push_back(requested);
  }
  for (const auto& s : selection)
    if (s == "Inference Risk" && !inference_available)
      throw ConfigError("Inference Risk requires both --sensitive and --public-features");
  // registry order
  std::vector<std::string> ordered;
  for (const auto& entry : test_registry())
    for (const auto& s : selection)
      if (s == entry.name) ordered.push_back(s);
  return ordered;
}

// Run the battery on already-loaded (raw or preprocessed) datasets.
inline AuditReport run_suite_on(const Dataset& train_raw, const Dataset& test_raw,
                                const std::vector<Dataset>& synth_raw,
                                const std::vector<std::string>& labels, const SuiteConfig& cfg) {
  if (synth_raw.empty()) throw ConfigError("no synthetic dataset supplied");
  if (labels.size() != synth_raw.size()) throw ConfigError("one label per synthetic dataset");

  Dataset train = preprocess(train_raw);
  Dataset test = preprocess(test_raw);
  std::vector<Dataset> synths;
  synths.reserve(synth_raw.size());
  for (const auto& s : synth_raw) synths.push_back(preprocess(s));

  std::vector<Dataset*> all = {&train, &test};
  for (auto& s : synths) all.push_back(&s);
  detail::harmonize_columns(all);

  const auto selection = resolve_selection(cfg);
  auto selected = [&](const char* name) {
    for (const auto& s : selection)
      if (s == name) return true;
    return false;
  };

  DistribConfig dc;
  dc.alpha = cfg.alpha;
  dc.permutations = cfg.permutations;
  dc.mmd_subsample = cfg.mmd_subsample;
  dc.max_group_size = cfg.max_group_size;
  dc.boruta_max_rounds = cfg.boruta_max_rounds;

  AuditReport report;
  report.seed = cfg.seed;
  report.synth_labels = labels;
  report.config["tests"] = selection;
  report.config["alpha"] = cfg.alpha;
  report.config["permutations"] = cfg.permutations;
  report.config["mmd_subsample"] = cfg.mmd_subsample;
  report.config["max_group_size"] = cfg.max_group_size;
  report.config["boruta_max_rounds"] = cfg.boruta_max_rounds;
  report.config["eps_scale"] = cfg.eps_scale;
  report.config["smoothing"] = cfg.smoothing;
  report.config["close_rows_cap"] = cfg.close_rows_cap;

  // shared artifacts, each fitted once and reused across synth datasets
  const bool needs_bins = selected("Uni Distrib (bins)") || selected("Predictive Power") ||
                          selected("Close Rows");
  const bool needs_enc = selected("Correlations") || selected("Multi-Continuous Distrib") ||
                         selected("Discriminator") || selected("Aggregate Predictions") ||
                         selected("Single Predictions") || selected("Model Internals") ||
                         selected("Linkability ML") || selected("Inference Risk");
  const bool needs_quartet = selected("Aggregate Predictions") ||
                             selected("Single Predictions") || selected("Model Internals");

  std::optional<BinningMap> bins;
  if (needs_bins) {
    bins = fit_binning(test);
    report.artifacts["bins"] = detail::fingerprint(*bins);
  }
  std::optional<TargetEncoder> enc;
  if (needs_enc) {
    enc = fit_target_encoding(test, cfg.smoothing);
    report.artifacts["encoding"] = detail::fingerprint(*enc);
  }
  std::optional<IvVector> iv_test;
  if (selected("Predictive Power")) iv_test = information_value(test, *bins);
  std::optional<Eigen::MatrixXd> corr_test;
  if (selected("Correlations")) corr_test = spearman_matrix(test, *enc);
  std::optional<std::vector<std::string>> boruta;
  if (selected("Multi-Continuous Distrib")) {
    boruta = boruta_select(train, *enc, dc, derive_seed(cfg.seed, {hash_tag("suite.boruta")}));
    report.artifacts["boruta_selected"] = *boruta;
    report.artifacts["boruta"] = detail::fingerprint(*boruta);
  }
  std::optional<FamdModel> famd;
  if (selected("Linkability Distance")) {
    famd = famd_fit(train, test);
    report.artifacts["famd"] = detail::fingerprint(*famd);
  }

  for (const auto& name : selection) {
    ReportRow row;
    row.test = name;
    for (const auto& entry : test_registry()) {
      if (name == entry.name) {
        row.group = entry.group;
        row.detail = entry.detail;
      }
    }
    row.scores.resize(synths.size());
    row.diagnostics.resize(synths.size());
    report.rows.push_back(std::move(row));
  }

  for (std::size_t s = 0; s < synths.size(); ++s) {
    const Dataset& synth = synths[s];
    auto seed_for = [&](const char* name) {
      return derive_seed(cfg.seed, {hash_tag(name), static_cast<std::uint64_t>(s)});
    };

    std::optional<ModelQuartet> quartet;
    if (needs_quartet)
      quartet = train_quartet(train, synth, *enc, seed_for("quartet"), cfg.gbm, cfg.net);

    for (std::size_t t = 0; t < selection.size(); ++t) {
      const auto& name = selection[t];
      const auto start = std::chrono::steady_clock::now();
      TestResult r;
      if (name == "Correlations") {
        r = correlation_similarity_test(*corr_test, spearman_matrix(synth, *enc));
      } else if (name == "Predictive Power") {
        r = predictive_power_test(*iv_test, information_value(synth, *bins));
      } else if (name == "Uni Distrib (bins)") {
        r = univariate_binned_test(test, synth, *bins, dc);
      } else if (name == "Uni Distrib (MMD)") {
        r = univariate_mmd_test(test, synth, dc, seed_for("uni_mmd"));
      } else if (name == "Multi-Categorical Distrib") {
        r = multivariate_categorical_test(test, synth, dc);
      } else if (name == "Multi-Continuous Distrib") {
        r = multivariate_continuous_test(test, synth, *boruta, dc, seed_for("multi_mmd"));
      } else if (name == "Discriminator") {
        r = discriminator_test(train, test, synth, *enc, seed_for("discriminator"), cfg.gbm,
                               cfg.net);
      } else if (name == "Aggregate Predictions") {
        r = aggregate_prediction_test(*quartet, test, *enc);
      } else if (name == "Single Predictions") {
        r = single_prediction_test(*quartet, test, *enc);
      } else if (name == "Model Internals") {
        r = model_internals_test(*quartet, test, *enc);
      } else if (name == "Cloned Rows") {
        r = cloned_rows_test(train, synth);
      } else if (name == "Close Rows") {
        r = close_rows_test(train, synth, *bins, cfg.close_rows_cap, seed_for("close_rows"));
      } else if (name == "Linkability Distance") {
        r = linkability_distance_test(train, test, synth, *famd, cfg.eps_scale);
      } else if (name == "Linkability ML") {
        r = linkability_ml_test(train, test, synth, *enc, seed_for("linkability_ml"), cfg.net);
      } else if (name == "Inference Risk") {
        r = inference_risk_test(train, synth, *enc, cfg.public_features, cfg.sensitive,
                                seed_for("inference"), cfg.gbm);
      }
      const auto stop = std::chrono::steady_clock::now();
      report.rows[t].scores[s] = r.score;
      report.rows[t].diagnostics[s] = r.diagnostics;
      report.timings_ms.emplace_back(
          name + " [" + labels[s] + "]",
          std::chrono::duration<double, std::milli>(stop - start).count());
    }
  }
  return report;
}

// File-based entry point used by the CLI.
inline AuditReport run_suite(const SuiteConfig& cfg) {
  if (cfg.schema.empty()) throw ConfigError("schema is empty");
  if (cfg.train_path.empty()) throw ConfigError("train path missing");
  if (cfg.synth_paths.empty()) throw ConfigError("at least one synth path required");

  Dataset train, test;
  if (!cfg.test_path.empty()) {
    train = load_csv(cfg.train_path, cfg.schema);
    test = load_csv(cfg.test_path, cfg.schema);
  } else if (cfg.split_fraction.has_value()) {
    const Dataset whole = load_csv(cfg.train_path, cfg.schema);
    auto [first, second] = shuffle_split(whole, *cfg.split_fraction, cfg.seed);
    train = std::move(first);
    test = std::move(second);
  } else {
    throw ConfigError("either a test path or --split is required");
  }

  std::vector<Dataset> synths;
  std::vector<std::string> labels;
  for (const auto& path : cfg.synth_paths) {
    synths.push_back(load_csv(path, cfg.schema));
    std::string label = detail::path_stem(path);
    for (const auto& existing : labels)
      if (existing == label) label += "#" + std::to_string(labels.size());
    labels.push_back(label);
  }
  return run_suite_on(train, test, synths, labels, cfg);
}

}  // namespace synthaudit
