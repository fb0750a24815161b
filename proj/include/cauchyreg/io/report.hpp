#pragma once

// Text and CSV rendering of test outcomes, Monte Carlo tables and histograms.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cauchyreg/experiments.hpp"
#include "cauchyreg/inference.hpp"
#include "cauchyreg/io/csv.hpp"

namespace cauchyreg::io {

/// "**" at 1%, "*" at 5%, otherwise empty.
inline std::string significance_marker(double p_value) {
  if (p_value <= 0.01) return "**";
  if (p_value <= 0.05) return "*";
  return "";
}

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

inline std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace detail

inline std::string format_outcome(const std::string& method, const TestOutcome& o) {
  std::ostringstream out;
  out << "method:    " << method << '\n'
      << "statistic: " << detail::fixed(o.statistic, 4) << significance_marker(o.p_value) << '\n'
      << "reference: " << o.ref.name() << " (" << to_string(o.sided) << "-sided)\n"
      << "p-value:   " << detail::fixed(o.p_value, 4) << '\n'
      << "decision:  " << (o.reject ? "reject" : "do not reject") << " H0 at alpha=" << detail::shortest(o.alpha)
      << '\n';
  if (o.validity_warning) out << "warning:   alpha exceeds the level at which the group t-test is known to be valid\n";
  out << "(* significant at 5%, ** at 1%)\n";
  return out.str();
}

inline std::string outcome_csv_header() { return "method,statistic,reference,sided,p_value,alpha,reject,marker"; }

inline std::string outcome_csv_row(const std::string& method, const TestOutcome& o) {
  std::ostringstream out;
  out << method << ',' << detail::format_double(o.statistic) << ',' << o.ref.name() << ',' << to_string(o.sided) << ','
      << detail::format_double(o.p_value) << ',' << detail::format_double(o.alpha) << ',' << (o.reject ? 1 : 0) << ','
      << significance_marker(o.p_value);
  return out.str();
}

/// One row per cell: beta,kappa,T,vol,method,freq,mc_se,degenerate_count.
inline void write_mc_csv(std::ostream& out, const McTable& table) {
  out << "beta,kappa,T,vol,method,freq,mc_se,degenerate_count\n";
  for (const CellResult& c : table.cells) {
    out << detail::format_double(c.key.beta) << ',' << detail::format_double(c.key.kappa) << ','
        << detail::format_double(c.key.T) << ',' << to_string(c.key.vol) << ',' << c.method << ','
        << detail::format_double(c.freq) << ',' << detail::format_double(c.mc_se) << ',' << c.degenerate << '\n';
  }
}

/// Rejection percentages laid out one panel per volatility model, rows
/// (beta, method), columns grouped by kappa and then T.
inline std::string format_mc_table(const McTable& table) {
  std::vector<VolModel> vols;
  std::vector<double> betas, kappas, Ts;
  std::vector<std::string> methods;
  auto add = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const CellResult& c : table.cells) {
    add(vols, c.key.vol);
    add(betas, c.key.beta);
    add(kappas, c.key.kappa);
    add(Ts, c.key.T);
    add(methods, c.method);
  }
  const std::size_t label_w = 18;
  const std::size_t col_w = 7;
  std::ostringstream out;
  out << "Rejection frequencies (%), " << table.n_reps << " replications, alpha=" << detail::shortest(table.alpha)
      << ", " << to_string(table.sided) << "-sided\n";
  for (VolModel v : vols) {
    out << '\n' << to_string(v) << '\n';
    std::string head1 = detail::pad_right("", label_w);
    std::string head2 = detail::pad_right("T", label_w);
    for (double k : kappas) {
      head1 += detail::pad_right("| kappa=" + detail::shortest(k), col_w * Ts.size() + 2);
      head2 += "| ";
      for (double T : Ts) head2 += detail::pad_left(detail::shortest(T), col_w);
      head2 += ' ';
    }
    out << head1 << '\n' << head2 << '\n' << std::string(head2.size(), '-') << '\n';
    for (double b : betas) {
      bool first = true;
      for (const std::string& m : methods) {
        std::string line = detail::pad_right((first ? "beta=" + detail::shortest(b) : "") , 9);
        line = detail::pad_right(line + m, label_w);
        first = false;
        for (double k : kappas) {
          line += "| ";
          for (double T : Ts) {
            std::string cell = "";
            for (const CellResult& c : table.cells) {
              if (c.key == CellKey{b, k, T, v} && c.method == m) cell = detail::fixed(100.0 * c.freq, 1);
            }
            line += detail::pad_left(cell, col_w);
          }
          line += ' ';
        }
        out << line << '\n';
      }
    }
  }
  return out.str();
}

/// Two-column histogram CSV: bin_center,count.
inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_center,count\n";
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    out << detail::format_double(h.bin_center(k)) << ',' << h.counts[k] << '\n';
  }
}

}  // namespace cauchyreg::io
