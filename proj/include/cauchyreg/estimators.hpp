#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyreg/errors.hpp"
#include "cauchyreg/sample.hpp"

namespace cauchyreg {

enum class Parity { even, odd };

inline const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

/// Sign instrument with sign(0) = +1.
constexpr int sign_conv(double x) { return x >= 0.0 ? 1 : -1; }

struct CauchyFit {
  double beta = 0.0;   // slope estimate
  double gamma = 0.0;  // normalized numerator, sum / scale
  double denom = 0.0;  // sum |x_{t-1}|, or the differenced denominator
  std::size_t n_used = 0;
  double scale = 0.0;  // normalizer applied to the numerator (sqrt(T))
};

struct GroupStatistics {
  std::size_t q = 0;
  std::vector<double> gammas;
  std::size_t block_size = 0;
  std::size_t dropped = 0;
};

struct OlsFit {
  std::vector<double> beta;
  std::vector<double> residuals;
  bool intercept = false;
};

namespace detail {

inline void require_univariate(const RegressionSample& sample, const char* who) {
  if (sample.predictors() != 1) {
    throw std::invalid_argument(std::string(who) + " requires a single predictor");
  }
}

}  // namespace detail

/// Cauchy (sign-instrument) estimator for the no-intercept model.
inline CauchyFit cauchy_estimate(const RegressionSample& sample) {
  detail::require_univariate(sample, "cauchy_estimate");
  const auto y = sample.y();
  const auto x = sample.x();
  double numer = 0.0;
  double denom = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    numer += sign_conv(x[t]) * y[t];
    denom += std::fabs(x[t]);
  }
  if (denom == 0.0) throw DegenerateDenominatorError("all lagged predictor values are zero");
  CauchyFit fit;
  fit.beta = numer / denom;
  fit.scale = std::sqrt(static_cast<double>(y.size()));
  fit.gamma = numer / fit.scale;
  fit.denom = denom;
  fit.n_used = y.size();
  return fit;
}

/// Splits `terms` into q consecutive blocks of floor(n/q) entries (the tail
/// remainder is dropped) and returns sqrt(q/n) times each block sum.
inline GroupStatistics group_sums(std::span<const double> terms, std::size_t q) {
  if (q < 2) throw std::invalid_argument("group count q must be at least 2");
  const std::size_t n = terms.size();
  if (q > n) {
    throw PartitionError("cannot split " + std::to_string(n) + " observations into q=" + std::to_string(q) +
                         " groups");
  }
  GroupStatistics g;
  g.q = q;
  g.block_size = n / q;
  g.dropped = n - q * g.block_size;
  g.gammas.resize(q);
  const double scale = std::sqrt(static_cast<double>(q) / static_cast<double>(n));
  for (std::size_t j = 0; j < q; ++j) {
    double sum = 0.0;
    for (std::size_t t = j * g.block_size; t < (j + 1) * g.block_size; ++t) sum += terms[t];
    g.gammas[j] = scale * sum;
  }
  return g;
}

/// Group-level normalized Cauchy statistics over q consecutive blocks.
inline GroupStatistics group_gammas(const RegressionSample& sample, std::size_t q) {
  detail::require_univariate(sample, "group_gammas");
  const auto y = sample.y();
  const auto x = sample.x();
  std::vector<double> terms(y.size());
  for (std::size_t t = 0; t < y.size(); ++t) terms[t] = sign_conv(x[t]) * y[t];
  return group_sums(terms, q);
}

/// Least squares of y on the lagged predictors. With `intercept` both y and the
/// predictors are demeaned over the full sample before the slope fit, so the
/// residuals are (y_t - ybar) - (x_{t-1} - xbar)' beta.
inline OlsFit ols_fit(const RegressionSample& sample, bool intercept) {
  const std::size_t T = sample.size();
  const std::size_t K = sample.predictors();
  Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(sample.y().data(), static_cast<Eigen::Index>(T));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    X.col(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(sample.x(k).data(), static_cast<Eigen::Index>(T));
  }
  if (intercept) {
    y.array() -= y.mean();
    for (Eigen::Index k = 0; k < X.cols(); ++k) X.col(k).array() -= X.col(k).mean();
  }

  OlsFit fit;
  fit.intercept = intercept;
  Eigen::VectorXd b;
  if (K == 1) {
    const double sxx = X.col(0).squaredNorm();
    if (!(sxx > 0.0)) {
      throw SingularDesignError(intercept ? "predictor has zero variation around its mean"
                                          : "predictor is identically zero");
    }
    b.resize(1);
    b(0) = X.col(0).dot(y) / sxx;
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < X.cols()) throw SingularDesignError("design matrix is rank deficient");
    b = qr.solve(y);
  }
  const Eigen::VectorXd resid = y - X * b;
  fit.beta.assign(b.data(), b.data() + b.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  return fit;
}

/// Mean of squared residuals.
inline double omega_hat_sq(std::span<const double> residuals) {
  if (residuals.empty()) throw std::invalid_argument("omega_hat_sq needs at least one residual");
  double s = 0.0;
  for (double u : residuals) s += u * u;
  return s / static_cast<double>(residuals.size());
}

/// Per-pair terms of the differenced Cauchy estimator.
///
/// Even parity pairs (y_{2t-1}, y_{2t}) with instrument sign(x_{2t-2});
/// odd parity pairs (y_{2t}, y_{2t+1}) with instrument sign(x_{2t-1}). Terms
/// start at the first pair whose indices all exist. Only levels x_0..x_{T-1}
/// are needed.
struct DifferencedTerms {
  std::vector<double> numerator;    // sign * (y_s - y_{s-1})
  std::vector<double> denominator;  // sign * (x_{s-1} - x_{s-2})
  double denom = 0.0;               // sum of denominator
};

inline DifferencedTerms differenced_terms(const RegressionSample& sample, Parity parity) {
  detail::require_univariate(sample, "diff_cauchy");
  if (!sample.has_levels()) throw std::invalid_argument("differenced estimator requires the level series");
  const auto y = sample.y();      // y[i] = y_{i+1}
  const auto lv = sample.x_level();  // lv[i] = x_i
  const std::size_t T = y.size();
  DifferencedTerms out;
  // Pair ends at 1-based response index s = 2t (even) or 2t+1 (odd); the
  // instrument is the level two periods earlier, x_{s-2}.
  for (std::size_t s = (parity == Parity::even ? 2 : 3); s <= T; s += 2) {
    const int sg = sign_conv(lv[s - 2]);
    out.numerator.push_back(sg * (y[s - 1] - y[s - 2]));
    out.denominator.push_back(sg * (lv[s - 1] - lv[s - 2]));
    out.denom += out.denominator.back();
  }
  if (out.numerator.size() < 2) {
    throw std::invalid_argument("differenced estimator needs at least 2 differenced terms");
  }
  return out;
}

/// First-differenced Cauchy estimator on even- or odd-indexed pairs. The
/// numerator is normalized by sqrt(T) with T the full sample size, which makes
/// numerator / omega asymptotically standard normal under the null.
inline CauchyFit diff_cauchy(const RegressionSample& sample, Parity parity) {
  const DifferencedTerms terms = differenced_terms(sample, parity);
  if (terms.denom == 0.0) throw DegenerateDenominatorError("differenced denominator is zero");
  double numer = 0.0;
  for (double v : terms.numerator) numer += v;
  CauchyFit fit;
  fit.beta = numer / terms.denom;
  fit.denom = terms.denom;
  fit.n_used = terms.numerator.size();
  fit.scale = std::sqrt(static_cast<double>(sample.size()));
  fit.gamma = numer / fit.scale;
  return fit;
}

/// Recursive demeaning: entry t is x_t minus the running mean of x_0..x_t.
/// Each entry only uses values up to its own index.
inline std::vector<double> recursive_demean(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("recursive_demean needs a nonempty sequence");
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    sum += x[t];
    out[t] = x[t] - sum / static_cast<double>(t + 1);
  }
  return out;
}

}  // namespace cauchyreg
