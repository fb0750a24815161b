#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cauchyreg/distributions.hpp"
#include "cauchyreg/errors.hpp"
#include "cauchyreg/estimators.hpp"
#include "cauchyreg/sample.hpp"

namespace cauchyreg {

// right tests H_A: beta > 0, left tests H_A: beta < 0.
enum class Sided { two_sided, right, left };

inline const char* to_string(Sided s) {
  switch (s) {
    case Sided::two_sided: return "two";
    case Sided::right: return "right";
    case Sided::left: return "left";
  }
  return "?";
}

enum class RefFamily { student_t, std_normal, chi_square };

struct RefDist {
  RefFamily family = RefFamily::std_normal;
  int df = 0;  // unused for std_normal

  std::string name() const {
    switch (family) {
      case RefFamily::student_t: return "t(" + std::to_string(df) + ")";
      case RefFamily::std_normal: return "N(0,1)";
      case RefFamily::chi_square: return "chi2(" + std::to_string(df) + ")";
    }
    return "?";
  }
};

struct TestOutcome {
  double statistic = 0.0;
  RefDist ref;
  double p_value = 1.0;
  Sided sided = Sided::two_sided;
  double alpha = 0.05;
  bool reject = false;
  // Set when the group t-test is run with alpha above its validity bound.
  bool validity_warning = false;
};

enum class JointMethod { bonferroni, wald };

struct JointTestOutcome {
  std::vector<TestOutcome> per_predictor;
  JointMethod method = JointMethod::bonferroni;
  bool joint_reject = false;
  std::optional<double> wald_stat;
  std::optional<double> wald_p_value;
};

enum class HybridVariance { ols_residual, raw_y };

// Largest level for which the group t-test is known to be conservative.
inline constexpr double kGroupTestAlphaBound = 0.83;

namespace detail {

inline void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
}

inline double p_value(double stat, const RefDist& ref, Sided sided) {
  double right = 0.0;
  double left = 0.0;
  switch (ref.family) {
    case RefFamily::std_normal:
      if (sided == Sided::two_sided) return dist::normal_two_sided_p(stat);
      right = dist::normal_sf(stat);
      left = dist::normal_cdf(stat);
      break;
    case RefFamily::student_t:
      if (sided == Sided::two_sided) return std::min(1.0, 2.0 * dist::student_t_tail(stat, ref.df));
      right = dist::student_t_sf(stat, ref.df);
      left = dist::student_t_cdf(stat, ref.df);
      break;
    case RefFamily::chi_square:
      return dist::chi_square_sf(std::max(stat, 0.0), ref.df);
  }
  return sided == Sided::right ? right : left;
}

}  // namespace detail

inline TestOutcome make_outcome(double statistic, RefDist ref, Sided sided, double alpha) {
  detail::require_alpha(alpha);
  TestOutcome out;
  out.statistic = statistic;
  out.ref = ref;
  out.sided = ref.family == RefFamily::chi_square ? Sided::right : sided;
  out.alpha = alpha;
  out.p_value = detail::p_value(statistic, ref, out.sided);
  out.reject = out.p_value <= alpha;
  return out;
}

/// sqrt(q) * mean / sd of the group statistics (sd with divisor q - 1).
inline double t_q_statistic(std::span<const double> gammas) {
  const std::size_t q = gammas.size();
  if (q < 2) throw std::invalid_argument("group t-statistic needs q >= 2");
  const double mean = std::accumulate(gammas.begin(), gammas.end(), 0.0) / static_cast<double>(q);
  double ss = 0.0;
  for (double g : gammas) ss += (g - mean) * (g - mean);
  const double sd = std::sqrt(ss / static_cast<double>(q - 1));
  if (!(sd > 0.0)) throw DegenerateGroupsError("all group statistics are identical");
  return std::sqrt(static_cast<double>(q)) * mean / sd;
}

/// Group t-statistic test against t(q-1).
inline TestOutcome t_q_test(const GroupStatistics& groups, double alpha, Sided sided) {
  const double stat = t_q_statistic(groups.gammas);
  TestOutcome out = make_outcome(stat, {RefFamily::student_t, static_cast<int>(groups.gammas.size()) - 1}, sided, alpha);
  out.validity_warning = alpha > kGroupTestAlphaBound;
  return out;
}

/// Hybrid statistic: Cauchy numerator studentized by the OLS residual scale.
inline double hybrid_statistic(const RegressionSample& sample, HybridVariance variance = HybridVariance::ols_residual) {
  const CauchyFit fit = cauchy_estimate(sample);
  double omega2 = 0.0;
  if (variance == HybridVariance::ols_residual) {
    omega2 = omega_hat_sq(ols_fit(sample, false).residuals);
  } else {
    omega2 = omega_hat_sq(sample.y());
  }
  if (!(omega2 > 0.0)) throw DegenerateVarianceError("residual variance estimate is zero");
  return fit.gamma / std::sqrt(omega2);
}

inline TestOutcome hybrid_test(const RegressionSample& sample, double alpha, Sided sided,
                               HybridVariance variance = HybridVariance::ols_residual) {
  return make_outcome(hybrid_statistic(sample, variance), {RefFamily::std_normal, 0}, sided, alpha);
}

/// Intercept-robust hybrid: differenced Cauchy numerator on one parity,
/// full-sample demeaned OLS residual variance. The numerator is oriented by
/// the sign of the differenced denominator, so the statistic is
/// beta_e / se(beta_e) with se = omega sqrt(T) / |D| and one-sided
/// alternatives refer to the sign of the slope. Without an intercept the
/// denominator is positive and this reduces to gamma / omega.
inline double hybrid_intercept_statistic(const RegressionSample& sample, Parity parity) {
  const CauchyFit fit = diff_cauchy(sample, parity);
  const double omega2 = omega_hat_sq(ols_fit(sample, true).residuals);
  if (!(omega2 > 0.0)) throw DegenerateVarianceError("residual variance estimate is zero");
  return sign_conv(fit.denom) * fit.gamma / std::sqrt(omega2);
}

inline TestOutcome hybrid_test_intercept(const RegressionSample& sample, Parity parity, double alpha, Sided sided) {
  return make_outcome(hybrid_intercept_statistic(sample, parity), {RefFamily::std_normal, 0}, sided, alpha);
}

/// Group statistics of the parity-differenced terms, each oriented by the
/// sign of its own block denominator (the group analogue of the hybrid
/// orientation). Dividing every group by the common omega leaves t_q
/// unchanged, so no variance is estimated.
inline GroupStatistics grouped_differenced(const RegressionSample& sample, Parity parity, std::size_t q) {
  const DifferencedTerms terms = differenced_terms(sample, parity);
  GroupStatistics g = group_sums(terms.numerator, q);
  const GroupStatistics d = group_sums(terms.denominator, q);
  for (std::size_t j = 0; j < q; ++j) g.gammas[j] *= sign_conv(d.gammas[j]);
  return g;
}

inline TestOutcome grouped_hybrid_test(const RegressionSample& sample, Parity parity, std::size_t q, double alpha,
                                       Sided sided) {
  return t_q_test(grouped_differenced(sample, parity, q), alpha, sided);
}

/// Reject the joint null when the smallest p-value is at most alpha / K.
inline bool bonferroni_decision(std::span<const double> p_values, double alpha) {
  if (p_values.empty()) throw std::invalid_argument("bonferroni needs at least one p-value");
  detail::require_alpha(alpha);
  const double min_p = *std::min_element(p_values.begin(), p_values.end());
  return min_p <= alpha / static_cast<double>(p_values.size());
}

/// Marginal hybrid test on each predictor column, combined by Bonferroni.
inline JointTestOutcome bonferroni_joint(const RegressionSample& sample, double alpha, Sided sided) {
  JointTestOutcome out;
  out.method = JointMethod::bonferroni;
  std::vector<double> p;
  for (std::size_t k = 0; k < sample.predictors(); ++k) {
    out.per_predictor.push_back(hybrid_test(sample.column(k), alpha, sided));
    p.push_back(out.per_predictor.back().p_value);
  }
  out.joint_reject = bonferroni_decision(p, alpha);
  return out;
}

/// Wald statistic on the sign-instrument moments:
/// W = S' (omega^2 M)^{-1} S, S = sum z_{t-1} y_t, M = sum z_{t-1} z_{t-1}',
/// omega^2 from the K-variate no-intercept OLS residuals. Null limit chi2(K).
inline JointTestOutcome wald_joint(const RegressionSample& sample, double alpha) {
  const std::size_t T = sample.size();
  const std::size_t K = sample.predictors();
  const auto y = sample.y();

  Eigen::MatrixXd Z(static_cast<Eigen::Index>(T), static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const auto x = sample.x(k);
    for (std::size_t t = 0; t < T; ++t) Z(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = sign_conv(x[t]);
  }
  for (std::size_t a = 0; a < K; ++a) {
    for (std::size_t b = a + 1; b < K; ++b) {
      const double dot = Z.col(static_cast<Eigen::Index>(a)).dot(Z.col(static_cast<Eigen::Index>(b)));
      if (std::fabs(dot) == static_cast<double>(T)) {
        throw SignDegeneracyError("sign instruments of predictors " + std::to_string(a) + " and " +
                                      std::to_string(b) + " are collinear; recentre one of them",
                                  a, b);
      }
    }
  }
  const Eigen::MatrixXd M = Z.transpose() * Z;
  const Eigen::VectorXd S = Z.transpose() * Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(T));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (lu.rank() < static_cast<Eigen::Index>(K)) {
    throw SignDegeneracyError("sign-instrument cross-product matrix is singular", SignDegeneracyError::npos,
                              SignDegeneracyError::npos);
  }

  const double omega2 = omega_hat_sq(ols_fit(sample, false).residuals);
  if (!(omega2 > 0.0)) throw DegenerateVarianceError("residual variance estimate is zero");

  const double W = S.dot(lu.solve(S)) / omega2;
  JointTestOutcome out;
  out.method = JointMethod::wald;
  const TestOutcome joint = make_outcome(W, {RefFamily::chi_square, static_cast<int>(K)}, Sided::right, alpha);
  out.wald_stat = W;
  out.wald_p_value = joint.p_value;
  out.joint_reject = joint.reject;
  for (std::size_t k = 0; k < K; ++k) {
    try {
      out.per_predictor.push_back(hybrid_test(sample.column(k), alpha, Sided::two_sided));
    } catch (const DegenerateError&) {
      out.per_predictor.push_back(TestOutcome{});
    } catch (const SingularDesignError&) {
      out.per_predictor.push_back(TestOutcome{});
    }
  }
  return out;
}

}  // namespace cauchyreg
