#pragma once

// Simulation designs: an Euler-discretized continuous-time predictive system
// with persistent volatility, a discrete-time local-to-unity system with MA
// innovations, and Brownian |X| functionals for the D_q limit law.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cauchyreg/estimators.hpp"
#include "cauchyreg/rng.hpp"
#include "cauchyreg/sample.hpp"

namespace cauchyreg {

enum class VolModel { CNST, SB, RS, GBM };

inline const char* to_string(VolModel m) {
  switch (m) {
    case VolModel::CNST: return "CNST";
    case VolModel::SB: return "SB";
    case VolModel::RS: return "RS";
    case VolModel::GBM: return "GBM";
  }
  return "?";
}

inline VolModel parse_vol_model(const std::string& s) {
  if (s == "CNST") return VolModel::CNST;
  if (s == "SB") return VolModel::SB;
  if (s == "RS") return VolModel::RS;
  if (s == "GBM") return VolModel::GBM;
  throw std::invalid_argument("unknown volatility model '" + s + "' (expected CNST, SB, RS or GBM)");
}

// Diffusion coefficient of the GBM variance process: omega/sqrt(T) (default,
// log-variance is a driftless Brownian motion) or omega^2/sqrt(T).
enum class GbmDiffusion { omega, omega_sq };

struct VolParams {
  double sigma0 = 1.0;
  double sigma1 = 4.0;
  double lambda_bar = 60.0;  // RS transition decay
  double omega_bar = 9.0;    // GBM volatility of volatility
  double break_fraction = 0.8;
  GbmDiffusion gbm_diffusion = GbmDiffusion::omega;

  void validate(VolModel model) const {
    if (!(sigma0 > 0.0)) throw std::domain_error("sigma0 must be positive");
    if ((model == VolModel::SB || model == VolModel::RS) && !(sigma1 > 0.0)) {
      throw std::domain_error("sigma1 must be positive");
    }
    if (model == VolModel::RS && !(lambda_bar >= 0.0)) throw std::domain_error("lambda_bar must be nonnegative");
    if (model == VolModel::GBM && !(omega_bar >= 0.0)) throw std::domain_error("omega_bar must be nonnegative");
    if (model == VolModel::SB && !(break_fraction >= 0.0 && break_fraction <= 1.0)) {
      throw std::domain_error("break_fraction must lie in [0, 1]");
    }
  }
};

struct VolatilityPath {
  VolModel model = VolModel::CNST;
  VolParams params;
  std::vector<double> sigma;  // sigma[i] scales the shocks of step i+1
  std::vector<double> z;      // GBM driving normals, one per step (empty otherwise)
};

/// Volatility along n_steps observation intervals of length dt_years on a
/// sample of total_years.
///
/// SB switches to sigma1 from the first step whose end time satisfies
/// t/T >= break_fraction. RS moves once per step with the transition matrix
/// evaluated at the step's start time; the initial state is drawn from the
/// limiting invariant law (state 1 with probability 0.2). GBM steps log
/// sigma^2 exactly, so the path stays positive; sigma[i] is the value at the
/// start of step i+1 and z[i] drives the move over that step.
inline VolatilityPath gen_volatility(VolModel model, const VolParams& params, std::size_t n_steps, double dt_years,
                                     double total_years, RngStream& stream) {
  if (n_steps < 1) throw std::invalid_argument("volatility path needs at least one step");
  if (!(dt_years > 0.0 && total_years > 0.0)) throw std::invalid_argument("time step and span must be positive");
  params.validate(model);

  VolatilityPath path;
  path.model = model;
  path.params = params;
  path.sigma.assign(n_steps, params.sigma0);

  switch (model) {
    case VolModel::CNST:
      break;
    case VolModel::SB:
      for (std::size_t i = 1; i <= n_steps; ++i) {
        const double frac = static_cast<double>(i) * dt_years / total_years;
        if (frac >= params.break_fraction - 1e-12) path.sigma[i - 1] = params.sigma1;
      }
      break;
    case VolModel::RS: {
      bool high = stream.uniform() < 0.2;
      for (std::size_t i = 1; i <= n_steps; ++i) {
        const double t = static_cast<double>(i - 1) * dt_years;
        const double decay = std::exp(-params.lambda_bar * t / total_years);
        const double to_high = high ? 0.2 + 0.8 * decay : 0.2 - 0.2 * decay;
        high = stream.uniform() < to_high;
        path.sigma[i - 1] = high ? params.sigma1 : params.sigma0;
      }
      break;
    }
    case VolModel::GBM: {
      const double w2 = params.omega_bar * params.omega_bar;
      const double drift = 0.5 * w2 / total_years;
      const double diff = (params.gbm_diffusion == GbmDiffusion::omega ? params.omega_bar : w2) / std::sqrt(total_years);
      const double step_mean = (drift - 0.5 * diff * diff) * dt_years;
      const double step_sd = diff * std::sqrt(dt_years);
      double log_var = 2.0 * std::log(params.sigma0);
      path.z.resize(n_steps);
      for (std::size_t i = 0; i < n_steps; ++i) {
        const double s = std::exp(0.5 * log_var);
        if (!(s > 0.0) || !std::isfinite(s)) throw std::range_error("GBM volatility left the representable range");
        path.sigma[i] = s;
        path.z[i] = stream.normal();
        log_var += step_mean + step_sd * path.z[i];
      }
      break;
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Continuous-time design

// Clock of the predictor's Brownian driver: `observation` gives unit
// variance per observation interval, `calendar` gives variance dt (years).
enum class PredictorClock { observation, calendar };

// Regressor handed to the tests: the recursively demeaned level (default) or
// the raw level X_{i-1}.
enum class PredictorDemeaning { recursive, none };

struct DgpContinuousConfig {
  double years = 20.0;
  double delta = 1.0 / 252.0;
  double kappa_bar = 0.0;
  double beta = 0.0;
  VolModel vol = VolModel::CNST;
  VolParams vol_params;
  double jump_intensity = 0.0;  // expected jumps per year; 0 disables jumps
  double jump_sd = 0.0;
  double rho_vw = -0.98;
  double rho_wz = -0.4;
  PredictorClock clock = PredictorClock::observation;
  PredictorDemeaning demeaning = PredictorDemeaning::recursive;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(years / delta)); }

  void validate() const {
    if (!(years > 0.0)) throw std::invalid_argument("years must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    const double n = std::round(years / delta);
    if (n < 2.0) throw std::invalid_argument("sample must contain at least two observation intervals");
    if (std::fabs(n * delta - years) > 1e-6 * years) {
      throw std::invalid_argument("years must be an integer multiple of delta");
    }
    if (!(kappa_bar >= 0.0)) throw std::invalid_argument("kappa_bar must be nonnegative");
    if (!(std::fabs(rho_vw) <= 1.0) || !(std::fabs(rho_wz) <= 1.0)) {
      throw std::domain_error("correlations must lie in [-1, 1]");
    }
    if (!(jump_intensity >= 0.0) || !(jump_sd >= 0.0)) throw std::invalid_argument("jump parameters must be nonnegative");
    vol_params.validate(vol);
  }
};

struct ContinuousPath {
  std::vector<double> X;  // X_0 .. X_n
  std::vector<double> Y;  // Y_0 .. Y_n
  std::vector<double> sigma;
};

/// Euler-Maruyama path of dY = beta X dt + dU, dX = -(kappa/T) X dt + sigma dV,
/// dU = sigma (dW + jumps), corr(dV, dW) = rho_vw. Under GBM volatility W is
/// built from the variance driver Z with corr(dW, dZ) = rho_wz.
inline ContinuousPath simulate_continuous_path(const DgpContinuousConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_steps();
  RngStream main(cfg.master_seed, cfg.stream_index);
  RngStream vol_stream = main.substream(1);
  RngStream jump_stream = main.substream(2);
  const VolatilityPath vol = gen_volatility(cfg.vol, cfg.vol_params, n, cfg.delta, cfg.years, vol_stream);

  const double sqrt_dt = std::sqrt(cfg.delta);
  const double ar = 1.0 - cfg.kappa_bar / cfg.years * cfg.delta;
  const double v_scale = cfg.clock == PredictorClock::observation ? 1.0 : sqrt_dt;
  const double rho_vw_c = std::sqrt(1.0 - cfg.rho_vw * cfg.rho_vw);
  const double rho_wz_c = std::sqrt(1.0 - cfg.rho_wz * cfg.rho_wz);
  const bool jumps = cfg.jump_intensity > 0.0;

  ContinuousPath path;
  path.X.assign(n + 1, 0.0);
  path.Y.assign(n + 1, 0.0);
  path.sigma = vol.sigma;
  for (std::size_t i = 1; i <= n; ++i) {
    const double s = vol.sigma[i - 1];
    double ev = 0.0;
    double ew = 0.0;
    if (cfg.vol == VolModel::GBM) {
      ew = cfg.rho_wz * vol.z[i - 1] + rho_wz_c * main.normal();
      ev = cfg.rho_vw * ew + rho_vw_c * main.normal();
    } else {
      const auto [v, w] = draw_correlated_normals(main, cfg.rho_vw);
      ev = v;
      ew = w;
    }
    double jump = 0.0;
    if (jumps) {
      const std::uint64_t count = jump_stream.poisson(cfg.jump_intensity * cfg.delta);
      for (std::uint64_t j = 0; j < count; ++j) jump += cfg.jump_sd * jump_stream.normal();
    }
    const double x_prev = path.X[i - 1];
    path.X[i] = ar * x_prev + s * v_scale * ev;
    path.Y[i] = path.Y[i - 1] + cfg.beta * x_prev * cfg.delta + s * (sqrt_dt * ew + jump);
  }
  return path;
}

/// Regression pairs (Y_i - Y_{i-1}, recursively demeaned X_{i-1}).
inline RegressionSample simulate_continuous(const DgpContinuousConfig& cfg) {
  const ContinuousPath path = simulate_continuous_path(cfg);
  const std::size_t n = path.X.size() - 1;
  std::vector<double> y(n);
  for (std::size_t i = 1; i <= n; ++i) y[i - 1] = path.Y[i] - path.Y[i - 1];
  if (cfg.demeaning == PredictorDemeaning::none) {
    return RegressionSample::univariate(std::move(y), std::vector<double>(path.X.begin(), path.X.end() - 1));
  }
  return RegressionSample::univariate(std::move(y),
                                      recursive_demean(std::span<const double>(path.X.data(), n)));
}

// ---------------------------------------------------------------------------
// Discrete-time design

enum class SlopeScale { per_sample, raw };

// Which innovation the return shock eps_t is correlated with: the current
// MA input v_t (default) or the contemporaneous predictor innovation eta_t.
enum class Endogeneity { v_eps, eta_eps };

inline std::vector<double> ma_weights(int order) {
  if (order == 2) return {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
  if (order == 4) return {0.5, 0.5, 0.5, 0.5};
  throw std::invalid_argument("MA order must be 2 or 4");
}

struct DgpDiscreteConfig {
  std::size_t n_obs = 240;
  double kappa_bar = 0.0;
  double beta = 0.0;
  SlopeScale slope_scale = SlopeScale::raw;
  int ma_order = 2;
  std::vector<double> custom_ma_weights;  // overrides ma_order when nonempty
  VolModel vol = VolModel::CNST;
  VolParams vol_params;
  double rho = -0.98;
  Endogeneity endogeneity = Endogeneity::v_eps;
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  std::vector<double> weights() const { return custom_ma_weights.empty() ? ma_weights(ma_order) : custom_ma_weights; }

  double slope() const {
    return slope_scale == SlopeScale::per_sample ? beta / static_cast<double>(n_obs) : beta;
  }

  void validate() const {
    if (n_obs < 4) throw std::invalid_argument("discrete design needs at least 4 observations");
    if (!(kappa_bar >= 0.0)) throw std::invalid_argument("kappa_bar must be nonnegative");
    if (vol == VolModel::GBM) throw std::invalid_argument("GBM volatility is not part of the discrete design");
    if (!(std::fabs(rho) <= 1.0)) throw std::domain_error("rho must lie in [-1, 1]");
    if (custom_ma_weights.empty()) (void)ma_weights(ma_order);
    vol_params.validate(vol);
  }
};

struct DiscretePath {
  std::vector<double> x;  // x_0 .. x_T
  std::vector<double> y;  // y_1 .. y_T
  std::vector<double> sigma;
};

/// y_t = b x_{t-1} + sigma_t eps_t, x_t = (1 - kappa/T) x_{t-1} + sigma_t eta_t,
/// eta_t = sum_j C_j v_{t-j}, x_0 = 0, with `order` pre-sample v draws.
inline DiscretePath simulate_discrete_path(const DgpDiscreteConfig& cfg) {
  cfg.validate();
  const std::size_t T = cfg.n_obs;
  const std::vector<double> C = cfg.weights();
  const std::size_t order = C.size();
  RngStream main(cfg.master_seed, cfg.stream_index);
  RngStream vol_stream = main.substream(1);
  const VolatilityPath vol = gen_volatility(cfg.vol, cfg.vol_params, T, 1.0, static_cast<double>(T), vol_stream);

  // v[order + t - 1] holds v_t; v_{1-order} .. v_0 are the burn-in draws.
  std::vector<double> v(order + T, 0.0);
  for (std::size_t j = 0; j < order; ++j) v[j] = main.normal();

  const double ar = 1.0 - cfg.kappa_bar / static_cast<double>(T);
  const double b = cfg.slope();
  const double rho_c = std::sqrt(1.0 - cfg.rho * cfg.rho);
  DiscretePath path;
  path.x.assign(T + 1, 0.0);
  path.y.assign(T, 0.0);
  path.sigma = vol.sigma;
  for (std::size_t t = 1; t <= T; ++t) {
    double eta = 0.0;
    for (std::size_t j = 1; j <= order; ++j) eta += C[j - 1] * v[order + t - 1 - j];
    double eps = 0.0;
    if (cfg.endogeneity == Endogeneity::v_eps) {
      const auto [vt, e] = draw_correlated_normals(main, cfg.rho);
      v[order + t - 1] = vt;
      eps = e;
    } else {
      v[order + t - 1] = main.normal();
      eps = cfg.rho * eta + rho_c * main.normal();
    }
    const double s = vol.sigma[t - 1];
    path.y[t - 1] = b * path.x[t - 1] + s * eps;
    path.x[t] = ar * path.x[t - 1] + s * eta;
  }
  return path;
}

/// Sample with x_lag = x_0..x_{T-1} and the level series x_0..x_T.
inline RegressionSample simulate_discrete(const DgpDiscreteConfig& cfg) {
  DiscretePath path = simulate_discrete_path(cfg);
  std::vector<double> lag(path.x.begin(), path.x.end() - 1);
  return RegressionSample::univariate(std::move(path.y), std::move(lag), std::move(path.x));
}

// ---------------------------------------------------------------------------
// Brownian |X| functionals

struct AbsFunctionals {
  double full = 0.0;
  std::array<double, 2> halves{};
  std::vector<double> parts;  // integrals over [(j-1)/q, j/q)
};

/// Left-endpoint Riemann sums of |path| over [0,1] where path[k] is the value
/// at k/n (n = path.size()), the two halves, and q equal parts.
inline AbsFunctionals abs_functionals(std::span<const double> path, std::size_t q = 2) {
  const std::size_t n = path.size();
  if (n < 2 || q < 1 || q > n) throw std::invalid_argument("invalid path length or partition");
  AbsFunctionals out;
  out.parts.assign(q, 0.0);
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = std::fabs(path[k]) * h;
    out.full += a;
    out.halves[2 * k < n ? 0 : 1] += a;
    out.parts[std::min(q - 1, k * q / n)] += a;
  }
  return out;
}

/// Standard Brownian motion on n_steps grid points (starting at 0) reduced to
/// its |X| functionals.
inline AbsFunctionals gen_brownian_abs_functionals(std::size_t n_steps, std::size_t q, RngStream& stream) {
  if (n_steps < 100) throw std::invalid_argument("Brownian functionals need at least 100 steps");
  std::vector<double> path(n_steps);
  const double sd = std::sqrt(1.0 / static_cast<double>(n_steps));
  double x = 0.0;
  for (std::size_t k = 0; k < n_steps; ++k) {
    path[k] = x;
    x += sd * stream.normal();
  }
  return abs_functionals(path, q);
}

/// D_q = I (q(q-1) / sum_j (I - q I_j)^2)^{1/2}; for q = 2 this is
/// I / |I_1 - I_2|.
inline double d_q_statistic(const AbsFunctionals& f) {
  const double q = static_cast<double>(f.parts.size());
  if (q < 2) throw std::invalid_argument("D_q needs q >= 2");
  double ss = 0.0;
  for (double part : f.parts) ss += (f.full - q * part) * (f.full - q * part);
  return f.full * std::sqrt(q * (q - 1.0) / ss);
}

}  // namespace cauchyreg
