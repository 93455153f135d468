#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "npca/errors.hpp"

namespace npca::io {

/// Display form: 10 significant digits, '.' separator, stable across runs.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) {
    throw config_error("csv: refusing to write a non-finite value");
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Shortest decimal form that parses back to exactly the same double.
inline std::string format_number_exact(double v) {
  if (!std::isfinite(v)) {
    throw config_error("csv: refusing to write a non-finite value");
  }
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Comma-separated writer: header row, '.' decimals, LF line endings.
/// Rejects NaN/Inf so no non-finite value ever reaches an output file.
class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { buf_ << header << "\n"; }

  class RowBuilder {
   public:
    explicit RowBuilder(std::ostringstream& buf) : buf_(buf) {}
    RowBuilder& add(double v) { return add_raw(format_number(v)); }
    RowBuilder& add(int v) { return add_raw(std::to_string(v)); }
    RowBuilder& add(long long v) { return add_raw(std::to_string(v)); }
    RowBuilder& add(unsigned long long v) { return add_raw(std::to_string(v)); }
    RowBuilder& add(const std::string& v) { return add_raw(v); }
    ~RowBuilder() { buf_ << "\n"; }

   private:
    RowBuilder& add_raw(const std::string& s) {
      if (!first_) buf_ << ",";
      first_ = false;
      buf_ << s;
      return *this;
    }
    std::ostringstream& buf_;
    bool first_ = true;
  };

  RowBuilder row() { return RowBuilder(buf_); }

  std::string str() const { return buf_.str(); }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("csv: cannot open output file " + path);
    out << buf_.str();
    if (!out) throw config_error("csv: failed writing " + path);
  }

 private:
  std::ostringstream buf_;
};

}  // namespace npca::io
