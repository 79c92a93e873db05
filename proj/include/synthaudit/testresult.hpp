#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

namespace synthaudit {

enum class TestGroup { general, distrib, utility, privacy };
enum class TestDetail { basic, in_depth };

inline const char* to_string(TestGroup g) {
  switch (g) {
    case TestGroup::general: return "General";
    case TestGroup::distrib: return "Distrib";
    case TestGroup::utility: return "Utility";
    case TestGroup::privacy: return "Privacy";
  }
  return "?";
}

inline const char* to_string(TestDetail d) {
  return d == TestDetail::basic ? "basic" : "in-depth";
}

// One audited metric. A missing score means the test was skipped (its
// assumptions were not met); diagnostics carry the reason and any raw values.
struct TestResult {
  std::string name;
  TestGroup group = TestGroup::general;
  TestDetail detail = TestDetail::basic;
  std::optional<double> score;
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::object();

  static TestResult skipped(std::string name, TestGroup g, TestDetail d, std::string reason) {
    TestResult r;
    r.name = std::move(name);
    r.group = g;
    r.detail = d;
    r.diagnostics["skipped"] = std::move(reason);
    return r;
  }
};

}  // namespace synthaudit
