#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "tourmon/error.hpp"

namespace tourmon {

inline std::string csv_escape(std::string_view field, char sep = ',') {
  bool needs_quote = false;
  for (char c : field) {
    if (c == sep || c == '"' || c == '\n' || c == '\r') {
      needs_quote = true;
      break;
    }
  }
  if (!needs_quote) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os, char sep = ',') : os_(os), sep_(sep) {}

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) os_ << sep_;
      os_ << csv_escape(fields[i], sep_);
    }
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  char sep_;
};

// Splits one CSV record. Handles quoted fields with doubled quotes; the
// line must not contain an embedded newline (callers read line-wise).
inline std::vector<std::string> split_csv_record(std::string_view line,
                                                 char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Reads a whole delimited file into rows, dropping a trailing \r per line
// and skipping blank lines.
inline std::vector<std::vector<std::string>> read_delimited_file(
    const std::string& path, char sep) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_csv_record(line, sep));
  }
  return rows;
}

// Fixed-decimal rendering used by all report writers (deterministic,
// locale-independent).
inline std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

}  // namespace tourmon
