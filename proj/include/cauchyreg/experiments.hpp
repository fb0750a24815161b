#pragma once

// Monte Carlo runner: rejection frequencies over (beta, kappa, T, vol, method)
// grids, and the D_2 density study.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "cauchyreg/dgp.hpp"
#include "cauchyreg/errors.hpp"
#include "cauchyreg/estimators.hpp"
#include "cauchyreg/inference.hpp"
#include "cauchyreg/rng.hpp"

namespace cauchyreg {

enum class DgpKind { continuous, discrete };

inline const char* to_string(DgpKind k) { return k == DgpKind::continuous ? "continuous" : "discrete"; }

// ---------------------------------------------------------------------------
// Methods

enum class MethodKind {
  hybrid,         // tau
  hybrid_raw,     // tau with the raw mean-square of y as variance
  group,          // t_q over Cauchy group statistics
  diff_hybrid,    // tau_e / tau_o
  diff_group,     // t_q over differenced terms
};

struct MethodSpec {
  MethodKind kind = MethodKind::hybrid;
  std::size_t q = 0;
  Parity parity = Parity::odd;

  bool needs_levels() const { return kind == MethodKind::diff_hybrid || kind == MethodKind::diff_group; }

  /// Labels: tau, tau_raw, t<q>, tau_e, tau_o, t<q>_tau_e, t<q>_tau_o.
  std::string label() const {
    const std::string p = parity == Parity::even ? "e" : "o";
    switch (kind) {
      case MethodKind::hybrid: return "tau";
      case MethodKind::hybrid_raw: return "tau_raw";
      case MethodKind::group: return "t" + std::to_string(q);
      case MethodKind::diff_hybrid: return "tau_" + p;
      case MethodKind::diff_group: return "t" + std::to_string(q) + "_tau_" + p;
    }
    return "?";
  }

  static MethodSpec parse(const std::string& label) {
    auto parse_q = [&](const std::string& digits) -> std::size_t {
      if (digits.empty() || digits.size() > 6 ||
          !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("unknown method '" + label + "'");
      }
      const std::size_t q = std::stoul(digits);
      if (q < 2) throw std::invalid_argument("method '" + label + "': q must be at least 2");
      return q;
    };
    if (label == "tau") return {MethodKind::hybrid, 0, Parity::odd};
    if (label == "tau_raw") return {MethodKind::hybrid_raw, 0, Parity::odd};
    if (label == "tau_e") return {MethodKind::diff_hybrid, 0, Parity::even};
    if (label == "tau_o") return {MethodKind::diff_hybrid, 0, Parity::odd};
    if (label.size() > 1 && label[0] == 't') {
      const auto us = label.find('_');
      if (us == std::string::npos) return {MethodKind::group, parse_q(label.substr(1)), Parity::odd};
      const std::string rest = label.substr(us);
      if (rest == "_tau_e") return {MethodKind::diff_group, parse_q(label.substr(1, us - 1)), Parity::even};
      if (rest == "_tau_o") return {MethodKind::diff_group, parse_q(label.substr(1, us - 1)), Parity::odd};
    }
    throw std::invalid_argument("unknown method '" + label +
                                "' (expected tau, tau_raw, t<q>, tau_e, tau_o, t<q>_tau_e or t<q>_tau_o)");
  }
};

/// Runs one method on one sample.
inline TestOutcome evaluate_method(const RegressionSample& sample, const MethodSpec& m, double alpha, Sided sided) {
  switch (m.kind) {
    case MethodKind::hybrid: return hybrid_test(sample, alpha, sided);
    case MethodKind::hybrid_raw: return hybrid_test(sample, alpha, sided, HybridVariance::raw_y);
    case MethodKind::group: return t_q_test(group_gammas(sample, m.q), alpha, sided);
    case MethodKind::diff_hybrid: return hybrid_test_intercept(sample, m.parity, alpha, sided);
    case MethodKind::diff_group: return grouped_hybrid_test(sample, m.parity, m.q, alpha, sided);
  }
  throw std::logic_error("unhandled method kind");
}

// ---------------------------------------------------------------------------
// Grid

struct CellKey {
  double beta = 0.0;
  double kappa = 0.0;
  double T = 0.0;  // years (continuous) or observations (discrete)
  VolModel vol = VolModel::CNST;

  friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct ExperimentGrid {
  DgpKind dgp = DgpKind::continuous;
  std::vector<double> beta_values{0.0};
  std::vector<double> kappa_values{0.0};
  std::vector<double> T_values{20.0};
  std::vector<VolModel> vol_models{VolModel::CNST};
  std::vector<MethodSpec> methods;
  std::size_t n_reps = 2000;
  double alpha = 0.05;
  Sided sided = Sided::two_sided;
  std::uint64_t master_seed = 20240601;

  // Templates; beta, kappa, T, vol and seeds are overwritten per cell.
  DgpContinuousConfig continuous;
  DgpDiscreteConfig discrete;

  std::vector<CellKey> cells() const {
    std::vector<CellKey> out;
    for (double T : T_values)
      for (VolModel v : vol_models)
        for (double k : kappa_values)
          for (double b : beta_values) out.push_back({b, k, T, v});
    return out;
  }

  void validate() const {
    if (beta_values.empty()) throw std::invalid_argument("grid has no beta values");
    if (kappa_values.empty()) throw std::invalid_argument("grid has no kappa values");
    if (T_values.empty()) throw std::invalid_argument("grid has no T values");
    if (vol_models.empty()) throw std::invalid_argument("grid has no volatility models");
    if (methods.empty()) throw std::invalid_argument("grid has no methods");
    if (n_reps < 1) throw std::invalid_argument("n_reps must be at least 1");
    detail::require_alpha(alpha);
    for (double b : beta_values) {
      if (!std::isfinite(b)) throw std::invalid_argument("beta values must be finite");
    }
    for (double k : kappa_values) {
      if (!(k >= 0.0) || !std::isfinite(k)) throw std::invalid_argument("kappa values must be finite and nonnegative");
    }
    for (VolModel v : vol_models) {
      if (dgp == DgpKind::discrete && v == VolModel::GBM) {
        throw std::invalid_argument("GBM volatility is not part of the discrete design");
      }
    }
    for (double T : T_values) {
      if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("T values must be positive");
      std::size_t usable = 0;
      if (dgp == DgpKind::continuous) {
        DgpContinuousConfig c = continuous;
        c.years = T;
        c.validate();
        usable = c.n_steps();
      } else {
        if (T != std::floor(T)) throw std::invalid_argument("discrete T values must be integers");
        DgpDiscreteConfig d = discrete;
        d.n_obs = static_cast<std::size_t>(T);
        d.validate();
        usable = (d.n_obs - 1) / 2;  // fewest differenced terms over both parities
      }
      for (const MethodSpec& m : methods) {
        if (m.needs_levels() && dgp == DgpKind::continuous) {
          throw std::invalid_argument("method " + m.label() + " needs predictor levels (discrete design only)");
        }
        const std::size_t n = m.needs_levels() ? usable : (dgp == DgpKind::continuous ? usable : static_cast<std::size_t>(T));
        if ((m.kind == MethodKind::group || m.kind == MethodKind::diff_group) && m.q > n) {
          throw PartitionError("method " + m.label() + " needs at least q=" + std::to_string(m.q) +
                               " usable terms at T=" + std::to_string(T));
        }
      }
    }
  }
};

namespace detail {

inline std::uint64_t double_bits(double v) { return std::bit_cast<std::uint64_t>(v == 0.0 ? 0.0 : v); }

}  // namespace detail

/// Stream index of replication r in a cell. Depends only on the design and
/// the cell coordinates (not on the method or the rest of the grid), so every
/// method in a cell sees the same paths and adding grid points leaves
/// existing cells unchanged.
inline std::uint64_t cell_stream_index(DgpKind dgp, const CellKey& cell, std::uint64_t r) {
  std::uint64_t h = hash_combine(0x63617563687921ULL, static_cast<std::uint64_t>(dgp));
  h = hash_combine(h, detail::double_bits(cell.beta));
  h = hash_combine(h, detail::double_bits(cell.kappa));
  h = hash_combine(h, detail::double_bits(cell.T));
  h = hash_combine(h, static_cast<std::uint64_t>(cell.vol));
  return hash_combine(h, r);
}

/// Replication r of a cell.
inline RegressionSample simulate_sample(const ExperimentGrid& grid, const CellKey& cell, std::uint64_t r) {
  const std::uint64_t stream = cell_stream_index(grid.dgp, cell, r);
  if (grid.dgp == DgpKind::continuous) {
    DgpContinuousConfig c = grid.continuous;
    c.beta = cell.beta;
    c.kappa_bar = cell.kappa;
    c.years = cell.T;
    c.vol = cell.vol;
    c.master_seed = grid.master_seed;
    c.stream_index = stream;
    return simulate_continuous(c);
  }
  DgpDiscreteConfig d = grid.discrete;
  d.beta = cell.beta;
  d.kappa_bar = cell.kappa;
  d.n_obs = static_cast<std::size_t>(cell.T);
  d.vol = cell.vol;
  d.master_seed = grid.master_seed;
  d.stream_index = stream;
  return simulate_discrete(d);
}

// ---------------------------------------------------------------------------
// Results

struct CellResult {
  CellKey key;
  std::string method;
  std::size_t n_reps = 0;
  std::size_t rejections = 0;
  std::size_t degenerate = 0;
  double freq = 0.0;
  double mc_se = 0.0;
};

inline double mc_standard_error(double p, std::size_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct McTable {
  DgpKind dgp = DgpKind::continuous;
  std::size_t n_reps = 0;
  double alpha = 0.05;
  Sided sided = Sided::two_sided;
  std::uint64_t master_seed = 0;
  std::vector<CellResult> cells;  // grid cell order, methods in grid order within a cell

  const CellResult& at(const CellKey& key, const std::string& method) const {
    for (const CellResult& c : cells) {
      if (c.key == key && c.method == method) return c;
    }
    throw std::out_of_range("no cell for method " + method);
  }
};

namespace detail {

// Calls fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Tally {
  std::vector<std::size_t> rejections;
  std::vector<std::size_t> degenerate;
};

inline void run_replication(const ExperimentGrid& grid, const CellKey& cell, std::uint64_t r, Tally& tally) {
  const RegressionSample sample = simulate_sample(grid, cell, r);
  for (std::size_t m = 0; m < grid.methods.size(); ++m) {
    try {
      if (evaluate_method(sample, grid.methods[m], grid.alpha, grid.sided).reject) ++tally.rejections[m];
    } catch (const DegenerateError&) {
      ++tally.degenerate[m];
    } catch (const SingularDesignError&) {
      ++tally.degenerate[m];
    }
  }
}

}  // namespace detail

/// Runs every (cell, replication) of the grid. Replications are split into
/// fixed chunks so the work list, and therefore the result, does not depend
/// on the worker count.
inline McTable run_grid(const ExperimentGrid& grid, std::size_t workers = 1) {
  grid.validate();
  const std::vector<CellKey> cells = grid.cells();
  const std::size_t M = grid.methods.size();
  constexpr std::size_t kChunk = 50;
  const std::size_t chunks_per_cell = (grid.n_reps + kChunk - 1) / kChunk;

  std::vector<detail::Tally> tallies(cells.size() * chunks_per_cell,
                                     detail::Tally{std::vector<std::size_t>(M, 0), std::vector<std::size_t>(M, 0)});
  detail::parallel_for(tallies.size(), workers, [&](std::size_t task) {
    const std::size_t c = task / chunks_per_cell;
    const std::size_t begin = (task % chunks_per_cell) * kChunk;
    const std::size_t end = std::min(grid.n_reps, begin + kChunk);
    for (std::size_t r = begin; r < end; ++r) detail::run_replication(grid, cells[c], r, tallies[task]);
  });

  McTable table;
  table.dgp = grid.dgp;
  table.n_reps = grid.n_reps;
  table.alpha = grid.alpha;
  table.sided = grid.sided;
  table.master_seed = grid.master_seed;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t m = 0; m < M; ++m) {
      CellResult res;
      res.key = cells[c];
      res.method = grid.methods[m].label();
      res.n_reps = grid.n_reps;
      for (std::size_t k = 0; k < chunks_per_cell; ++k) {
        res.rejections += tallies[c * chunks_per_cell + k].rejections[m];
        res.degenerate += tallies[c * chunks_per_cell + k].degenerate[m];
      }
      res.freq = static_cast<double>(res.rejections) / static_cast<double>(res.n_reps);
      res.mc_se = mc_standard_error(res.freq, res.n_reps);
      table.cells.push_back(res);
    }
  }
  return table;
}

/// Single cell of a grid with one method, as a one-row table.
inline CellResult run_cell(ExperimentGrid grid, const CellKey& cell, const MethodSpec& method, std::size_t workers = 1) {
  grid.beta_values = {cell.beta};
  grid.kappa_values = {cell.kappa};
  grid.T_values = {cell.T};
  grid.vol_models = {cell.vol};
  grid.methods = {method};
  return run_grid(grid, workers).cells.front();
}

/// Test statistics of one method over the replications of a cell; NaN marks
/// degenerate replications.
inline std::vector<double> collect_statistics(const ExperimentGrid& grid, const CellKey& cell, const MethodSpec& method,
                                              std::size_t workers = 1) {
  grid.validate();
  std::vector<double> out(grid.n_reps, std::numeric_limits<double>::quiet_NaN());
  detail::parallel_for(grid.n_reps, workers, [&](std::size_t r) {
    const RegressionSample sample = simulate_sample(grid, cell, r);
    try {
      out[r] = evaluate_method(sample, method, grid.alpha, grid.sided).statistic;
    } catch (const DegenerateError&) {
    } catch (const SingularDesignError&) {
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// D_2 study

struct Histogram {
  double lower = 1.0;
  double width = 0.2;
  std::vector<std::size_t> counts;  // [lower + k width, lower + (k+1) width)
  std::size_t below = 0;
  std::size_t above = 0;

  double bin_center(std::size_t k) const { return lower + (static_cast<double>(k) + 0.5) * width; }

  void add(double v) {
    if (v < lower) {
      ++below;
      return;
    }
    const double pos = (v - lower) / width;
    if (pos >= static_cast<double>(counts.size())) {
      ++above;
      return;
    }
    ++counts[static_cast<std::size_t>(pos)];
  }
};

struct D2Study {
  std::size_t n_draws = 0;
  std::size_t n_steps = 0;
  double threshold = 0.0;
  double min_value = 0.0;
  double tail_prob = 0.0;
  double mc_se = 0.0;
  Histogram histogram;
};

/// Draws D_2 from n_draws Brownian paths on n_steps grid points. Draw i uses
/// stream i of master_seed.
inline D2Study d2_study(std::size_t n_draws, std::size_t n_steps, double threshold, std::uint64_t master_seed = 1,
                        std::size_t workers = 1) {
  if (n_draws < 1) throw std::invalid_argument("n_draws must be at least 1");
  if (n_steps < 100) throw std::invalid_argument("n_steps must be at least 100");
  std::vector<double> draws(n_draws);
  detail::parallel_for(n_draws, workers, [&](std::size_t i) {
    RngStream stream(master_seed, i);
    draws[i] = d_q_statistic(gen_brownian_abs_functionals(n_steps, 2, stream));
  });

  D2Study out;
  out.n_draws = n_draws;
  out.n_steps = n_steps;
  out.threshold = threshold;
  out.histogram.counts.assign(100, 0);
  out.min_value = std::numeric_limits<double>::infinity();
  std::size_t exceed = 0;
  for (double d : draws) {
    out.min_value = std::min(out.min_value, d);
    if (d > threshold) ++exceed;
    out.histogram.add(d);
  }
  out.tail_prob = static_cast<double>(exceed) / static_cast<double>(n_draws);
  out.mc_se = mc_standard_error(out.tail_prob, n_draws);
  return out;
}

}  // namespace cauchyreg
