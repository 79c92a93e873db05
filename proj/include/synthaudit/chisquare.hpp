#pragma once

// Two-sample chi-square on class counts. The benchmark split plays the role
// of the reference distribution: expected counts are its class proportions
// rescaled to the comparison total. Assumption gate (Cochran-style): at least
// 80% of classes need expected counts above 5 and no class present in the
// reference may be empty in the comparison sample; otherwise the test is
// skipped rather than failed.

#include <cstddef>
#include <string>
#include <vector>

#include "synthaudit/special.hpp"

namespace synthaudit {

struct ChiSquareResult {
  enum class Status { accepted, rejected, skipped };
  Status status = Status::skipped;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t df = 0;
  std::string skip_reason;

  bool accepted() const { return status == Status::accepted; }
  bool skipped() const { return status == Status::skipped; }
};

inline ChiSquareResult chi_square_two_sample(const std::vector<double>& counts_test,
                                             const std::vector<double>& counts_synth,
                                             double alpha = 0.05) {
  ChiSquareResult res;
  if (counts_test.size() != counts_synth.size()) {
    res.skip_reason = "class count mismatch";
    return res;
  }

  double total_test = 0.0, total_synth = 0.0;
  for (double c : counts_test) total_test += c;
  for (double c : counts_synth) total_synth += c;
  if (total_test <= 0.0 || total_synth <= 0.0) {
    res.skip_reason = "empty sample";
    return res;
  }

  // classes absent from both sides carry no information
  std::vector<double> expected, observed;
  for (std::size_t c = 0; c < counts_test.size(); ++c) {
    if (counts_test[c] == 0.0 && counts_synth[c] == 0.0) continue;
    if (counts_test[c] == 0.0) {
      res.skip_reason = "class with zero reference frequency";
      return res;
    }
    if (counts_synth[c] == 0.0) {
      res.skip_reason = "class with zero comparison frequency";
      return res;
    }
    expected.push_back(counts_test[c] / total_test * total_synth);
    observed.push_back(counts_synth[c]);
  }
  if (expected.size() < 2) {
    res.skip_reason = "fewer than two populated classes";
    return res;
  }

  std::size_t big_enough = 0;
  for (double e : expected) big_enough += e > 5.0;
  if (static_cast<double>(big_enough) < 0.8 * static_cast<double>(expected.size())) {
    res.skip_reason = "more than 20% of classes with expected frequency <= 5";
    return res;
  }

  double stat = 0.0;
  for (std::size_t c = 0; c < expected.size(); ++c) {
    const double d = observed[c] - expected[c];
    stat += d * d / expected[c];
  }
  res.statistic = stat;
  res.df = expected.size() - 1;
  res.p_value = chi_square_upper_tail(stat, res.df);
  res.status = res.p_value >= alpha ? ChiSquareResult::Status::accepted
                                    : ChiSquareResult::Status::rejected;
  return res;
}

}  // namespace synthaudit
