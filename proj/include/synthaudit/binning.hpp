#pragma once

// Decile binning for numeric columns. Edges are fitted on one dataset and
// reused verbatim on others so both sides of a comparison see identical bins.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "synthaudit/dataset.hpp"
#include "synthaudit/special.hpp"

namespace synthaudit {

struct DecileBins {
  std::vector<double> edges;  // strictly increasing, at most 9

  // Index of the first edge the value does not exceed; values above every
  // edge land in the last bin. Bin count = edges.size() + 1.
  std::size_t bin_of(double v) const {
    std::size_t lo = 0;
    while (lo < edges.size() && v > edges[lo]) ++lo;
    return lo;
  }

  std::size_t bin_count() const { return edges.size() + 1; }
};

inline DecileBins fit_decile_bins(const Dataset& d, std::string_view column) {
  const auto ci = d.column_index(column);
  if (d.schema[ci].kind != ColumnKind::numeric) throw NotNumeric(std::string(column));
  std::vector<double> sorted = d.columns[ci].values;
  std::sort(sorted.begin(), sorted.end());
  DecileBins bins;
  for (int k = 1; k <= 9; ++k) {
    double e = quantile_sorted(sorted, static_cast<double>(k) / 10.0);
    if (bins.edges.empty() || e > bins.edges.back()) bins.edges.push_back(e);
  }
  // A constant column collapses every decile onto one value: single bin.
  if (bins.edges.size() == 1 && sorted.front() == sorted.back()) bins.edges.clear();
  return bins;
}

struct BinningMap {
  std::map<std::string, DecileBins> per_column;

  const DecileBins& at(const std::string& column) const {
    auto it = per_column.find(column);
    if (it == per_column.end()) throw SchemaMismatch(column);
    return it->second;
  }
};

// Fit deciles for every numeric column (target included; it is part of the
// record for privacy comparisons).
inline BinningMap fit_binning(const Dataset& d) {
  BinningMap map;
  for (const auto& cs : d.schema)
    if (cs.kind == ColumnKind::numeric)
      map.per_column.emplace(cs.name, fit_decile_bins(d, cs.name));
  return map;
}

}  // namespace synthaudit
