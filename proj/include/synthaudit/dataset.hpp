#pragma once

// Column-typed tabular data: schema, CSV ingestion, and the preprocessing
// pass that removes missing/special cells before any test runs.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthaudit/errors.hpp"

namespace synthaudit {

enum class ColumnKind { numeric, categorical };

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  std::vector<std::string> special_values;
  bool is_target = false;
};

constexpr std::int32_t kMissingCode = -1;
inline const std::string kMissingClass = "__MISSING__";
inline const std::string kSpecialClassPrefix = "__SPECIAL__";

// One column of data. Numeric columns keep doubles (NaN marks a cell that is
// missing or matched a special token); categorical columns keep interned
// class codes (kMissingCode marks a missing cell).
struct Column {
  std::vector<double> values;        // numeric cells
  std::vector<std::int32_t> codes;   // categorical cells
  std::vector<std::string> classes;  // interned class labels

  std::int32_t intern(const std::string& label) {
    for (std::size_t i = 0; i < classes.size(); ++i)
      if (classes[i] == label) return static_cast<std::int32_t>(i);
    classes.push_back(label);
    return static_cast<std::int32_t>(classes.size() - 1);
  }

  const std::string& label_of(std::int32_t code) const { return classes.at(code); }
};

class Dataset {
 public:
  std::vector<ColumnSchema> schema;
  std::vector<Column> columns;
  std::size_t n_rows = 0;
  bool preprocessed = false;

  std::size_t column_index(std::string_view name) const {
    for (std::size_t i = 0; i < schema.size(); ++i)
      if (schema[i].name == name) return i;
    throw SchemaMismatch(std::string(name));
  }

  std::size_t target_index() const {
    for (std::size_t i = 0; i < schema.size(); ++i)
      if (schema[i].is_target) return i;
    throw SchemaMismatch("<target>");
  }

  // Target values as doubles; throws if any is missing.
  std::vector<double> target() const {
    const auto ti = target_index();
    if (schema[ti].kind != ColumnKind::numeric) throw NotNumeric(schema[ti].name);
    const auto& v = columns[ti].values;
    for (std::size_t r = 0; r < v.size(); ++r)
      if (std::isnan(v[r])) throw MissingTarget(r + 1);
    return v;
  }

  bool has_binary_target() const {
    const auto ti = target_index();
    if (schema[ti].kind != ColumnKind::numeric) return false;
    bool seen[2] = {false, false};
    for (double v : columns[ti].values) {
      if (v == 0.0)
        seen[0] = true;
      else if (v == 1.0)
        seen[1] = true;
      else
        return false;
    }
    return seen[0] && seen[1];
  }

  void require_binary_target() const {
    const auto ti = target_index();
    if (schema[ti].kind != ColumnKind::numeric) throw NonBinaryTarget();
    for (double v : columns[ti].values)
      if (v != 0.0 && v != 1.0) throw NonBinaryTarget();
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> out;
    for (const auto& cs : schema)
      if (!cs.is_target) out.push_back(cs.name);
    return out;
  }
};

namespace detail {

// RFC-4180 record reader: quoted fields, "" escapes, CRLF or LF line ends.
// Returns one record per call; std::nullopt at end of input.
class CsvReader {
 public:
  explicit CsvReader(std::string text) : text_(std::move(text)) {}

  std::optional<std::vector<std::string>> next() {
    if (pos_ >= text_.size()) return std::nullopt;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (;;) {
      if (pos_ >= text_.size()) {
        fields.push_back(std::move(field));
        return fields;
      }
      char c = text_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < text_.size() && text_[pos_] == '"') {
            field.push_back('"');
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\r') {
        if (pos_ < text_.size() && text_[pos_] == '\n') ++pos_;
        fields.push_back(std::move(field));
        return fields;
      } else if (c == '\n') {
        fields.push_back(std::move(field));
        return fields;
      } else {
        field.push_back(c);
      }
    }
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

inline bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

inline bool is_special(const ColumnSchema& cs, const std::string& token) {
  for (const auto& s : cs.special_values)
    if (s == token) return true;
  return false;
}

}  // namespace detail

inline std::vector<std::string> read_csv_header(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IoError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  detail::CsvReader reader(line);
  auto rec = reader.next();
  if (!rec) throw IoError("'" + path + "' has no header");
  return *rec;
}

// Load a CSV against a schema. Header columns may appear in any order but
// must cover the schema exactly. Special tokens declared in the schema are
// mapped to NaN (numeric) or a dedicated "__SPECIAL__<token>" class
// (categorical); empty cells become missing.
inline Dataset load_csv(const std::string& path, std::vector<ColumnSchema> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  detail::CsvReader reader(buf.str());

  auto header = reader.next();
  if (!header) throw IoError("'" + path + "' has no header");

  // header position of each schema column
  std::vector<std::size_t> pos(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < header->size(); ++j) {
      if ((*header)[j] == schema[i].name) {
        pos[i] = j;
        found = true;
        break;
      }
    }
    if (!found) throw SchemaMismatch(schema[i].name);
  }
  if (header->size() != schema.size()) {
    for (const auto& h : *header) {
      bool known = false;
      for (const auto& cs : schema) known |= cs.name == h;
      if (!known) throw SchemaMismatch(h);
    }
  }

  Dataset d;
  d.schema = std::move(schema);
  d.columns.resize(d.schema.size());

  std::size_t row = 0;
  while (auto rec = reader.next()) {
    if (rec->size() == 1 && (*rec)[0].empty()) continue;  // trailing blank line
    ++row;
    if (rec->size() != header->size())
      throw ParseError(row, "<record>", "field count " + std::to_string(rec->size()));
    for (std::size_t i = 0; i < d.schema.size(); ++i) {
      const auto& cs = d.schema[i];
      const std::string& token = (*rec)[pos[i]];
      auto& col = d.columns[i];
      if (cs.kind == ColumnKind::numeric) {
        if (token.empty() || detail::is_special(cs, token)) {
          col.values.push_back(std::numeric_limits<double>::quiet_NaN());
        } else {
          double v;
          if (!detail::parse_double(token, v)) throw ParseError(row, cs.name, token);
          col.values.push_back(v);
        }
      } else {
        if (token.empty())
          col.codes.push_back(kMissingCode);
        else if (detail::is_special(cs, token))
          col.codes.push_back(col.intern(kSpecialClassPrefix + token));
        else
          col.codes.push_back(col.intern(token));
      }
    }
  }
  if (row == 0) throw IoError("'" + path + "' has no data rows");
  d.n_rows = row;
  return d;
}

namespace detail {

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

// RFC-4180 writer; numeric cells use round-trippable %.17g.
inline void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  for (std::size_t c = 0; c < d.schema.size(); ++c) {
    if (c) out << ',';
    out << detail::csv_escape(d.schema[c].name);
  }
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < d.n_rows; ++r) {
    for (std::size_t c = 0; c < d.schema.size(); ++c) {
      if (c) out << ',';
      if (d.schema[c].kind == ColumnKind::numeric) {
        const double v = d.columns[c].values[r];
        if (!std::isnan(v)) {
          std::snprintf(buf, sizeof buf, "%.17g", v);
          out << buf;
        }
      } else {
        const auto code = d.columns[c].codes[r];
        if (code != kMissingCode) out << detail::csv_escape(d.columns[c].label_of(code));
      }
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

// Row subset in the given order; class interning is preserved.
inline Dataset select_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.schema = d.schema;
  out.preprocessed = d.preprocessed;
  out.n_rows = rows.size();
  out.columns.resize(d.columns.size());
  for (std::size_t c = 0; c < d.columns.size(); ++c) {
    out.columns[c].classes = d.columns[c].classes;
    if (d.schema[c].kind == ColumnKind::numeric) {
      out.columns[c].values.reserve(rows.size());
      for (std::size_t r : rows) out.columns[c].values.push_back(d.columns[c].values[r]);
    } else {
      out.columns[c].codes.reserve(rows.size());
      for (std::size_t r : rows) out.columns[c].codes.push_back(d.columns[c].codes[r]);
    }
  }
  return out;
}

// Remove every missing cell: categorical gaps become the "__MISSING__" class,
// numeric gaps are mean-imputed and a categorical flag column
// "<name>__was_missing" is appended for each imputed column. Idempotent.
inline Dataset preprocess(const Dataset& input) {
  Dataset d = input;
  const std::size_t ti = d.target_index();

  if (d.schema[ti].kind == ColumnKind::numeric) {
    const auto& v = d.columns[ti].values;
    for (std::size_t r = 0; r < v.size(); ++r)
      if (std::isnan(v[r])) throw MissingTarget(r + 1);
  } else {
    const auto& c = d.columns[ti].codes;
    for (std::size_t r = 0; r < c.size(); ++r)
      if (c[r] == kMissingCode) throw MissingTarget(r + 1);
  }

  std::vector<ColumnSchema> flag_schema;
  std::vector<Column> flag_columns;

  for (std::size_t i = 0; i < d.schema.size(); ++i) {
    auto& cs = d.schema[i];
    auto& col = d.columns[i];
    if (cs.kind == ColumnKind::categorical) {
      std::int32_t missing_code = -2;
      for (auto& code : col.codes) {
        if (code == kMissingCode) {
          if (missing_code == -2) missing_code = col.intern(kMissingClass);
          code = missing_code;
        }
      }
      continue;
    }
    if (cs.is_target) continue;
    double sum = 0.0;
    std::size_t observed = 0;
    for (double v : col.values) {
      if (!std::isnan(v)) {
        sum += v;
        ++observed;
      }
    }
    if (observed == col.values.size()) continue;
    if (observed == 0) throw AllMissingColumn(cs.name);
    const double mean = sum / static_cast<double>(observed);

    Column flag;
    flag.intern("0");
    flag.intern("1");
    flag.codes.resize(col.values.size(), 0);
    for (std::size_t r = 0; r < col.values.size(); ++r) {
      if (std::isnan(col.values[r])) {
        col.values[r] = mean;
        flag.codes[r] = 1;
      }
    }
    ColumnSchema fs;
    fs.name = cs.name + "__was_missing";
    fs.kind = ColumnKind::categorical;
    flag_schema.push_back(std::move(fs));
    flag_columns.push_back(std::move(flag));
  }

  for (std::size_t i = 0; i < flag_schema.size(); ++i) {
    d.schema.push_back(std::move(flag_schema[i]));
    d.columns.push_back(std::move(flag_columns[i]));
  }
  d.preprocessed = true;
  return d;
}

}  // namespace synthaudit
