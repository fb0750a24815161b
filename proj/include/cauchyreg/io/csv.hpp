#pragma once

// CSV ingestion for empirical return/predictor series.
//
// Dialect: comma separated, '.' decimal point, header row required, optional
// double quotes around fields. Each row holds a date label, the return y_t
// and the predictor level x_t; y_t is paired with x_{t-1}, so the return on
// the first row is never used and may be left blank.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cauchyreg/errors.hpp"
#include "cauchyreg/sample.hpp"

namespace cauchyreg::io {

enum class Frequency { unknown, monthly, quarterly, yearly };

inline const char* to_string(Frequency f) {
  switch (f) {
    case Frequency::unknown: return "unknown";
    case Frequency::monthly: return "monthly";
    case Frequency::quarterly: return "quarterly";
    case Frequency::yearly: return "yearly";
  }
  return "?";
}

inline Frequency parse_frequency(const std::string& s) {
  if (s == "monthly") return Frequency::monthly;
  if (s == "quarterly") return Frequency::quarterly;
  if (s == "yearly") return Frequency::yearly;
  if (s == "unknown" || s.empty()) return Frequency::unknown;
  throw std::invalid_argument("unknown frequency '" + s + "' (expected monthly, quarterly or yearly)");
}

struct CsvSchema {
  std::string date_col = "date";
  std::string y_col = "y";
  std::string x_col = "x";
  std::size_t min_rows = 10;
  Frequency frequency = Frequency::unknown;
};

struct EmpiricalDataset {
  std::vector<std::string> dates;
  std::vector<double> y;  // y[0] is NaN when the first return is blank
  std::vector<double> x;  // predictor levels
  Frequency frequency = Frequency::unknown;

  std::size_t size() const { return dates.size(); }

  /// Lag-aligned sample: y_1..y_{N-1} against x_0..x_{N-2}, with levels
  /// x_0..x_{N-1}.
  RegressionSample to_sample() const {
    if (size() < 3) throw InsufficientDataError("need at least 3 rows to form a lagged sample");
    std::vector<double> yy(y.begin() + 1, y.end());
    std::vector<double> lag(x.begin(), x.end() - 1);
    return RegressionSample::univariate(std::move(yy), std::move(lag), x);
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Whole-field numeric parse; nullopt if the field is not a number.
inline std::optional<double> parse_number(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return v;
}

inline bool dates_increasing(const std::string& a, const std::string& b) {
  const auto na = parse_number(a);
  const auto nb = parse_number(b);
  if (na && nb) return *na < *nb;
  return a < b;
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest text that reads back to the same double, for human-facing output.
inline std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses and validates an aligned return/predictor file. Row numbers in
/// errors are 1-based file lines (the header is line 1).
inline EmpiricalDataset parse_csv(std::istream& in, const CsvSchema& schema = {}) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("file is empty; a header row is required", 1, "");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> header = detail::split_csv_line(line);
  for (auto& h : header) h = detail::trim(h);

  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw SchemaError("column '" + name + "' not found in header", name);
  };
  const std::size_t di = find_col(schema.date_col);
  const std::size_t yi = find_col(schema.y_col);
  const std::size_t xi = find_col(schema.x_col);

  EmpiricalDataset ds;
  ds.frequency = schema.frequency;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const std::vector<std::string> fields = detail::split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) + " fields, header has " +
                           std::to_string(header.size()),
                       row, "");
    }
    const std::string date = detail::trim(fields[di]);
    if (date.empty()) throw ParseError("row " + std::to_string(row) + ": missing date", row, schema.date_col);

    auto numeric = [&](std::size_t col, const std::string& name, bool allow_blank) -> double {
      const std::string f = detail::trim(fields[col]);
      if (f.empty()) {
        if (allow_blank) return std::numeric_limits<double>::quiet_NaN();
        throw ParseError("row " + std::to_string(row) + ": missing value in column '" + name + "'", row, name);
      }
      const auto v = detail::parse_number(f);
      if (!v) {
        throw ParseError("row " + std::to_string(row) + ": malformed number '" + f + "' in column '" + name + "'", row,
                         name);
      }
      if (!std::isfinite(*v)) {
        throw ParseError("row " + std::to_string(row) + ": non-finite value in column '" + name + "'", row, name);
      }
      return *v;
    };
    const double y = numeric(yi, schema.y_col, ds.dates.empty());
    const double x = numeric(xi, schema.x_col, false);
    if (!ds.dates.empty() && !detail::dates_increasing(ds.dates.back(), date)) {
      throw ParseError("row " + std::to_string(row) + ": date '" + date + "' does not follow '" + ds.dates.back() + "'",
                       row, schema.date_col);
    }
    ds.dates.push_back(date);
    ds.y.push_back(y);
    ds.x.push_back(x);
  }
  if (ds.size() < schema.min_rows) {
    throw InsufficientDataError("found " + std::to_string(ds.size()) + " usable rows, need at least " +
                                std::to_string(schema.min_rows));
  }
  return ds;
}

inline EmpiricalDataset parse_csv(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_csv(in, schema);
}

/// Writes the dataset back with full precision (%.17g); a NaN first return
/// is written blank.
inline void write_csv(std::ostream& out, const EmpiricalDataset& ds, const CsvSchema& schema = {}) {
  out << schema.date_col << ',' << schema.y_col << ',' << schema.x_col << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << ds.dates[i] << ',' << (std::isnan(ds.y[i]) ? std::string() : detail::format_double(ds.y[i])) << ','
        << detail::format_double(ds.x[i]) << '\n';
  }
}

}  // namespace cauchyreg::io
