// Command-line front end: `audit` scores one or more synthetic datasets
// against a real train/test pair, `generate` fits the reference Gaussian
// copula on a CSV and samples a synthetic replica.
//
// Exit codes: 0 success, 1 configuration error, 2 data error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "synthaudit/synthaudit.hpp"

namespace {

struct SchemaArgs {
  std::string target;
  std::vector<std::string> categorical;
  std::vector<std::string> special;  // entries of the form column=token
};

void add_schema_options(CLI::App* cmd, SchemaArgs& args) {
  cmd->add_option("--target", args.target, "Name of the binary target column")->required();
  cmd->add_option("--categorical", args.categorical,
                  "Categorical column names (comma separated or repeated)")
      ->delimiter(',');
  cmd->add_option("--special", args.special,
                  "Special-value token per column, as column=token (repeatable)");
}

std::vector<synthaudit::ColumnSchema> build_schema(const std::string& csv_path,
                                                   const SchemaArgs& args) {
  const auto header = synthaudit::read_csv_header(csv_path);

  auto in_header = [&](const std::string& name) {
    for (const auto& h : header)
      if (h == name) return true;
    return false;
  };
  if (!in_header(args.target))
    throw synthaudit::ConfigError("target column '" + args.target + "' not in '" + csv_path + "'");
  for (const auto& c : args.categorical) {
    if (!in_header(c))
      throw synthaudit::ConfigError("categorical column '" + c + "' not in '" + csv_path + "'");
    if (c == args.target)
      throw synthaudit::ConfigError("target column cannot be categorical");
  }

  std::vector<synthaudit::ColumnSchema> schema;
  for (const auto& name : header) {
    synthaudit::ColumnSchema cs;
    cs.name = name;
    cs.is_target = name == args.target;
    cs.kind = synthaudit::ColumnKind::numeric;
    for (const auto& c : args.categorical)
      if (c == name) cs.kind = synthaudit::ColumnKind::categorical;
    schema.push_back(std::move(cs));
  }

  for (const auto& entry : args.special) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0)
      throw synthaudit::ConfigError("--special expects column=token, got '" + entry + "'");
    const std::string column = entry.substr(0, eq);
    const std::string token = entry.substr(eq + 1);
    bool found = false;
    for (auto& cs : schema) {
      if (cs.name == column) {
        cs.special_values.push_back(token);
        found = true;
      }
    }
    if (!found) throw synthaudit::ConfigError("--special names unknown column '" + column + "'");
  }
  return schema;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw synthaudit::IoError("cannot write '" + out_path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Audit engine for synthetic tabular data"};
  app.require_subcommand(1);

  // ---- audit -------------------------------------------------------------
  auto* audit = app.add_subcommand("audit", "Score synthetic datasets against real splits");
  audit->set_config("--config", "", "Config file with long option names as keys");
  audit->allow_config_extras(true);

  std::string train_path, test_path, out_path, format = "json", sensitive;
  std::vector<std::string> synth_paths, tests, public_features;
  SchemaArgs schema_args;
  synthaudit::SuiteConfig cfg;
  double split_fraction = 0.0;

  audit->add_option("--train", train_path, "Training split CSV")->required();
  audit->add_option("--test", test_path, "Benchmark split CSV");
  audit->add_option("--synth", synth_paths, "Synthetic CSV (repeatable)")
      ->required()
      ->delimiter(',');
  add_schema_options(audit, schema_args);
  audit->add_option("--tests", tests, "Subset of tests to run (default: full battery)")
      ->delimiter(',');
  audit->add_option("--seed", cfg.seed, "Master seed");
  audit->add_option("--alpha", cfg.alpha, "Type I error for the two-sample tests");
  audit->add_option("--permutations", cfg.permutations, "Permutations per MMD test");
  audit->add_option("--mmd-subsample", cfg.mmd_subsample, "Rows per dataset in MMD tests");
  audit->add_option("--max-group-size", cfg.max_group_size,
                    "Largest categorical group tested");
  audit->add_option("--boruta-rounds", cfg.boruta_max_rounds, "Feature-selection round cap");
  audit->add_option("--eps-scale", cfg.eps_scale, "Scale on the linkability neighborhood size");
  audit->add_option("--smoothing", cfg.smoothing, "Target-encoding smoothing weight");
  audit->add_option("--close-rows-cap", cfg.close_rows_cap,
                    "Training rows scanned by the close-rows test");
  audit->add_option("--public-features", public_features,
                    "Adversary-known columns for the inference test")
      ->delimiter(',');
  audit->add_option("--sensitive", sensitive, "Sensitive column for the inference test");
  audit->add_option("--split", split_fraction,
                    "Shuffle-split fraction of --train when no --test file is given");
  audit->add_option("--out", out_path, "Write the report here instead of stdout");
  audit->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "table"}));

  // ---- generate ----------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "Sample a Gaussian-copula replica of a CSV");
  generate->set_config("--config", "", "Config file with long option names as keys");
  generate->allow_config_extras(true);

  std::string gen_train, gen_out;
  std::size_t gen_n = 0;
  std::uint64_t gen_seed = 42;
  SchemaArgs gen_schema_args;
  generate->add_option("--train", gen_train, "CSV to fit the generator on")->required();
  add_schema_options(generate, gen_schema_args);
  generate->add_option("--n", gen_n, "Rows to sample")->required();
  generate->add_option("--seed", gen_seed, "Sampling seed");
  generate->add_option("--out", gen_out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (audit->parsed()) {
      cfg.train_path = train_path;
      cfg.test_path = test_path;
      cfg.synth_paths = synth_paths;
      cfg.tests = tests;
      cfg.public_features = public_features;
      cfg.sensitive = sensitive;
      if (split_fraction > 0.0) cfg.split_fraction = split_fraction;
      cfg.schema = build_schema(train_path, schema_args);

      const auto report = synthaudit::run_suite(cfg);
      for (const auto& [what, ms] : report.timings_ms)
        std::fprintf(stderr, "%-48s %8.1f ms\n", what.c_str(), ms);
      write_output(format == "table" ? synthaudit::render_table(report)
                                     : synthaudit::render_json_string(report),
                   out_path);
    } else if (generate->parsed()) {
      const auto schema = build_schema(gen_train, gen_schema_args);
      const auto fitted = synthaudit::preprocess(synthaudit::load_csv(gen_train, schema));
      const auto model = synthaudit::fit_copula(fitted);
      const auto sample = synthaudit::sample_synthetic(model, gen_n, gen_seed);
      synthaudit::write_csv(sample, gen_out);
    }
  } catch (const synthaudit::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const synthaudit::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
