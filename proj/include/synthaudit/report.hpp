#pragma once

// Audit report assembly and rendering. The JSON rendering is fully
// deterministic for a fixed config and seed: stable key order, no wall-clock
// content. Per-test timings live on the struct for callers that want them
// (the CLI logs them to stderr) but never enter the JSON.

#include <cstdint>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "synthaudit/testresult.hpp"

namespace synthaudit {

struct ReportRow {
  std::string test;
  TestGroup group = TestGroup::general;
  TestDetail detail = TestDetail::basic;
  std::vector<std::optional<double>> scores;          // one per synth dataset
  std::vector<nlohmann::ordered_json> diagnostics;    // idem
};

struct AuditReport {
  int schema_version = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> synth_labels;
  nlohmann::ordered_json artifacts = nlohmann::ordered_json::object();  // fingerprints
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<ReportRow> rows;
  std::vector<std::pair<std::string, double>> timings_ms;  // not rendered to JSON
};

// Two-decimal display: 0.966 -> "0.97", 1.0 -> "1", 0.9 -> "0.9".
inline std::string format_score(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

inline nlohmann::ordered_json render_json(const AuditReport& report) {
  nlohmann::ordered_json j;
  j["schema_version"] = report.schema_version;
  j["seed"] = report.seed;
  j["synth_labels"] = report.synth_labels;
  j["artifacts"] = report.artifacts;
  j["config"] = report.config;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r;
    r["test"] = row.test;
    r["group"] = to_string(row.group);
    r["detail"] = to_string(row.detail);
    auto scores = nlohmann::ordered_json::object();
    for (std::size_t s = 0; s < report.synth_labels.size(); ++s) {
      nlohmann::ordered_json cell;
      if (row.scores[s].has_value()) {
        cell["score"] = format_score(*row.scores[s]);
        cell["raw"] = *row.scores[s];
      } else {
        cell["score"] = nullptr;
        cell["skipped"] = true;
      }
      cell["diagnostics"] = row.diagnostics[s];
      scores[report.synth_labels[s]] = cell;
    }
    r["scores"] = scores;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j;
}

inline std::string render_json_string(const AuditReport& report) {
  return render_json(report).dump(2) + "\n";
}

// Fixed-width text table: Test | Group | Detail | one column per synth set.
inline std::string render_table(const AuditReport& report) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"Test", "Group", "Detail"};
  for (const auto& label : report.synth_labels) header.push_back(label);
  cells.push_back(header);
  for (const auto& row : report.rows) {
    std::vector<std::string> line = {row.test, to_string(row.group), to_string(row.detail)};
    for (const auto& score : row.scores)
      line.push_back(score.has_value() ? format_score(*score) : "skipped");
    cells.push_back(line);
  }

  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells)
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());

  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    for (std::size_t c = 0; c < cells[r].size(); ++c) {
      out += cells[r][c];
      out.append(width[c] - cells[r][c].size(), ' ');
      if (c + 1 < cells[r].size()) out += "  ";
    }
    out += '\n';
    if (r == 0) {
      for (std::size_t c = 0; c < width.size(); ++c) {
        out.append(width[c], '-');
        if (c + 1 < width.size()) out += "  ";
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace synthaudit
