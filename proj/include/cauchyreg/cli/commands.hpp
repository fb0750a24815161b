#pragma once

// Subcommand bodies behind the command-line tool. Each returns the process
// exit code or throws; run_guarded turns exceptions into a message, a hint
// and a nonzero code.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <ostream>
#include <string>

#include "cauchyreg/dgp.hpp"
#include "cauchyreg/errors.hpp"
#include "cauchyreg/estimators.hpp"
#include "cauchyreg/experiments.hpp"
#include "cauchyreg/inference.hpp"
#include "cauchyreg/io/csv.hpp"
#include "cauchyreg/io/experiment_file.hpp"
#include "cauchyreg/io/report.hpp"

namespace cauchyreg::cli {

struct TestOptions {
  std::string data_path;
  io::CsvSchema schema;
  std::string method = "hybrid";  // hybrid, tq or hybrid_raw
  std::size_t q = 12;
  Parity parity = Parity::odd;
  Sided sided = Sided::two_sided;
  double alpha = 0.05;
  bool intercept = false;
  std::string out_dir;
};

struct TableOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  std::string out_dir = ".";
};

struct D2Options {
  std::size_t n_draws = 100000;
  std::size_t n_steps = 1000;
  double threshold = 4.303;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out_dir;
};

struct SimulateOptions {
  std::string config_path;  // optional; its first cell is used
  std::string dgp = "continuous";
  double beta = 0.0;
  double kappa = 0.0;
  double T = 20.0;
  std::string vol = "CNST";
  std::uint64_t seed = 1;
  std::uint64_t replication = 0;
  std::string out_dir;
};

namespace detail {

inline std::ofstream open_output(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

/// Resolves the method label used in reports.
inline std::string test_label(const TestOptions& o) {
  if (o.method == "hybrid") return o.intercept ? std::string("tau_") + (o.parity == Parity::even ? "e" : "o") : "tau";
  if (o.method == "hybrid_raw") return "tau_raw";
  if (o.method == "tq") {
    const std::string base = "t" + std::to_string(o.q);
    return o.intercept ? base + "_tau_" + (o.parity == Parity::even ? "e" : "o") : base;
  }
  throw std::invalid_argument("unknown method '" + o.method + "' (expected hybrid, tq or hybrid_raw)");
}

inline TestOutcome run_test(const RegressionSample& sample, const TestOptions& o) {
  const std::string label = test_label(o);
  if (o.method == "hybrid_raw" && o.intercept) {
    throw std::invalid_argument("hybrid_raw has no intercept-robust variant; drop --intercept or use --method hybrid");
  }
  return evaluate_method(sample, MethodSpec::parse(label), o.alpha, o.sided);
}

inline int cmd_test(const TestOptions& o, std::ostream& out) {
  const io::EmpiricalDataset ds = io::parse_csv(o.data_path, o.schema);
  const RegressionSample sample = ds.to_sample();
  const std::string label = test_label(o);
  const TestOutcome outcome = run_test(sample, o);
  out << "data:      " << o.data_path << " (" << sample.size() << " lagged observations)\n"
      << io::format_outcome(label, outcome);
  if (!o.out_dir.empty()) {
    std::ofstream csv = detail::open_output(o.out_dir, "test_result.csv");
    csv << io::outcome_csv_header() << '\n' << io::outcome_csv_row(label, outcome) << '\n';
  }
  return 0;
}

inline int cmd_table(const TableOptions& o, std::ostream& out) {
  io::ExperimentFile f = io::load_experiment(o.config_path);
  if (o.seed) f.grid.master_seed = *o.seed;
  const McTable table = run_grid(f.grid, o.workers);
  {
    std::ofstream csv = detail::open_output(o.out_dir, f.name + ".csv");
    io::write_mc_csv(csv, table);
  }
  const std::string text = io::format_mc_table(table);
  {
    std::ofstream txt = detail::open_output(o.out_dir, f.name + ".txt");
    txt << text;
  }
  {
    std::ofstream man = detail::open_output(o.out_dir, f.name + ".manifest.json");
    man << io::make_manifest(f, o.workers).dump(2) << '\n';
  }
  out << text << "\nwrote " << (std::filesystem::path(o.out_dir) / (f.name + ".csv")).string() << " (+ .txt, .manifest.json)\n";
  return 0;
}

inline int cmd_d2(const D2Options& o, std::ostream& out) {
  const D2Study s = d2_study(o.n_draws, o.n_steps, o.threshold, o.seed, o.workers);
  out << "draws:      " << s.n_draws << " (" << s.n_steps << " steps per path)\n"
      << "minimum:    " << io::detail::fixed(s.min_value, 4) << '\n'
      << "P(D2 > " << io::detail::shortest(s.threshold) << ") = " << io::detail::fixed(s.tail_prob, 4)
      << " (mc_se " << io::detail::fixed(s.mc_se, 4) << ")\n"
      << "beyond histogram range: " << s.histogram.above << '\n';
  if (!o.out_dir.empty()) {
    std::ofstream csv = detail::open_output(o.out_dir, "d2_histogram.csv");
    io::write_histogram_csv(csv, s.histogram);
  }
  return 0;
}

/// Dumps one simulated path as date,y,x,sigma (readable by `test`).
inline int cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  ExperimentGrid grid;
  CellKey cell;
  if (!o.config_path.empty()) {
    grid = io::load_experiment(o.config_path).grid;
    cell = grid.cells().front();
  } else {
    grid.dgp = o.dgp == "continuous" ? DgpKind::continuous
               : o.dgp == "discrete" ? DgpKind::discrete
                                     : throw std::invalid_argument("unknown dgp '" + o.dgp + "' (expected continuous or discrete)");
    cell = {o.beta, o.kappa, o.T, parse_vol_model(o.vol)};
    grid.beta_values = {o.beta};
    grid.kappa_values = {o.kappa};
    grid.T_values = {o.T};
    grid.vol_models = {cell.vol};
    grid.methods = {MethodSpec::parse("tau")};
    grid.validate();
  }
  grid.master_seed = o.seed;
  const std::uint64_t stream = cell_stream_index(grid.dgp, cell, o.replication);

  std::ostringstream csv;
  csv << "date,y,x,sigma\n";
  if (grid.dgp == DgpKind::continuous) {
    DgpContinuousConfig c = grid.continuous;
    c.beta = cell.beta;
    c.kappa_bar = cell.kappa;
    c.years = cell.T;
    c.vol = cell.vol;
    c.master_seed = grid.master_seed;
    c.stream_index = stream;
    const ContinuousPath p = simulate_continuous_path(c);
    for (std::size_t i = 0; i < p.X.size(); ++i) {
      csv << i << ',' << (i == 0 ? std::string() : io::detail::format_double(p.Y[i] - p.Y[i - 1])) << ','
          << io::detail::format_double(p.X[i]) << ','
          << (i == 0 ? std::string() : io::detail::format_double(p.sigma[i - 1])) << '\n';
    }
  } else {
    DgpDiscreteConfig d = grid.discrete;
    d.beta = cell.beta;
    d.kappa_bar = cell.kappa;
    d.n_obs = static_cast<std::size_t>(cell.T);
    d.vol = cell.vol;
    d.master_seed = grid.master_seed;
    d.stream_index = stream;
    const DiscretePath p = simulate_discrete_path(d);
    for (std::size_t t = 0; t < p.x.size(); ++t) {
      csv << t << ',' << (t == 0 ? std::string() : io::detail::format_double(p.y[t - 1])) << ','
          << io::detail::format_double(p.x[t]) << ','
          << (t == 0 ? std::string() : io::detail::format_double(p.sigma[t - 1])) << '\n';
    }
  }
  if (o.out_dir.empty()) {
    out << csv.str();
  } else {
    std::ofstream f = detail::open_output(o.out_dir, "simulated_path.csv");
    f << csv.str();
    out << "wrote " << (std::filesystem::path(o.out_dir) / "simulated_path.csv").string() << '\n';
  }
  return 0;
}

/// Runs a command, reporting failures with a remediation hint on `err`.
inline int run_guarded(const std::function<int()>& fn, std::ostream& err) {
  try {
    return fn();
  } catch (const PartitionError& e) {
    err << "error: " << e.what() << "\nhint: lower --q or supply a longer sample\n";
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\nhint: fix line " << e.row() << " of the input file\n";
  } catch (const InsufficientDataError& e) {
    err << "error: " << e.what() << "\nhint: the tests need a longer aligned series\n";
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\nhint: check '" << e.key() << "' against the config format in the README\n";
  } catch (const SignDegeneracyError& e) {
    err << "error: " << e.what() << "\nhint: demean or recentre the predictors so their signs differ\n";
  } catch (const DegenerateError& e) {
    err << "error: " << e.what() << "\nhint: the series is degenerate for this test (constant predictor or responses)\n";
  } catch (const SingularDesignError& e) {
    err << "error: " << e.what() << "\nhint: the predictor has no variation; check the selected column\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return 1;
}

}  // namespace cauchyreg::cli
