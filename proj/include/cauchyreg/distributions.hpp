#pragma once

// Reference distributions for the test statistics: standard normal, Student t
// and chi-square. Accuracy target is 1e-10 absolute on probabilities.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace cauchyreg::dist {

namespace detail {

// Lanczos approximation (g = 7, n = 9); relative error ~1e-15 for x > 0.
inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma requires x > 0");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  static constexpr double kCoef[9] = {
      0.99999999999980993,    676.5203681218851,      -1259.1392167224028,
      771.32342877765313,     -176.61502916214059,    12.507343278686905,
      -0.13857109526572012,   9.9843695780195716e-6,  1.5056327351493116e-7};
  const double z = x - 1.0;
  double a = kCoef[0];
  for (int i = 1; i < 9; ++i) a += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

inline double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// Series for the lower regularized incomplete gamma P(a, x), x < a + 1.
inline double gamma_series(double a, double x) {
  double sum = 1.0 / a;
  double del = sum;
  double ap = a;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17) {
      return sum * std::exp(-x + a * std::log(x) - log_gamma(a));
    }
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

// Continued fraction for the upper regularized incomplete gamma Q(a, x).
inline double gamma_continued_fraction(double a, double x) {
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      return std::exp(-x + a * std::log(x) - log_gamma(a)) * h;
    }
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

inline void require_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("probability must lie strictly inside (0, 1)");
}

inline void require_df(int df) {
  if (df < 1) throw std::domain_error("degrees of freedom must be a positive integer");
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps precision when x is close to one.
inline double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete_beta requires a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("incomplete_beta requires x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (y == 0.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log(y) - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, y) / b;
}

inline double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

/// Upper regularized incomplete gamma Q(a, x) = 1 - P(a, x).
inline double incomplete_gamma_upper(double a, double x) {
  if (!(a > 0.0)) throw std::domain_error("incomplete_gamma requires a > 0");
  if (!(x >= 0.0)) throw std::domain_error("incomplete_gamma requires x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_series(a, x);
  return detail::gamma_continued_fraction(a, x);
}

// ---------------------------------------------------------------------------
// Standard normal

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Wichura's AS241 (PPND16), relative accuracy about 1e-16.
inline double normal_quantile(double p) {
  detail::require_probability(p);
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
            45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
         133.14166789178437745) * r + 3.387132872796366608;
    const double den =
        ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
            21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
         42.313330701600911252) * r + 1.0;
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value = 0.0;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) *
               r + 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) *
             r + 4.6303378461565452959) * r + 1.42343711074968357734;
    const double den =
        ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) *
               r + 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) *
             r + 2.05319162663775882187) * r + 1.0;
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) *
               r + 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) *
             r + 5.4637849111641143699) * r + 6.6579046435011037772;
    const double den =
        ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) *
               r + 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) *
             r + 0.59983220655588793769) * r + 1.0;
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

inline double normal_two_sided_p(double x) { return std::erfc(std::fabs(x) / std::numbers::sqrt2); }

enum class NormalMode { cdf, quantile, one_sided_p, two_sided_p };

// one_sided_p is the right-tail probability P(Z > x).
inline double std_normal(double x, NormalMode mode) {
  switch (mode) {
    case NormalMode::cdf: return normal_cdf(x);
    case NormalMode::quantile: return normal_quantile(x);
    case NormalMode::one_sided_p: return normal_sf(x);
    case NormalMode::two_sided_p: return normal_two_sided_p(x);
  }
  throw std::logic_error("unknown normal mode");
}

// ---------------------------------------------------------------------------
// Student t

// P(T > |x|) for T ~ t(df).
inline double student_t_tail(double x, int df) {
  detail::require_df(df);
  const double nu = df;
  const double x2 = x * x;
  return 0.5 * incomplete_beta(0.5 * nu, 0.5, nu / (nu + x2), x2 / (nu + x2));
}

inline double student_t_cdf(double x, int df) {
  detail::require_df(df);
  if (x == 0.0) return 0.5;
  const double tail = student_t_tail(x, df);
  return x > 0.0 ? 1.0 - tail : tail;
}

inline double student_t_sf(double x, int df) {
  detail::require_df(df);
  if (x == 0.0) return 0.5;
  const double tail = student_t_tail(x, df);
  return x > 0.0 ? tail : 1.0 - tail;
}

inline double student_t_pdf(double x, int df) {
  detail::require_df(df);
  const double nu = df;
  const double log_norm = detail::log_gamma(0.5 * (nu + 1.0)) - detail::log_gamma(0.5 * nu) -
                          0.5 * std::log(nu * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (nu + 1.0) * std::log1p(x * x / nu));
}

inline double student_t_quantile(double p, int df) {
  detail::require_df(df);
  detail::require_probability(p);
  if (p == 0.5) return 0.0;
  if (p < 0.5) return -student_t_quantile(1.0 - p, df);
  if (df == 1) return std::tan(std::numbers::pi * (p - 0.5));
  if (df == 2) return (2.0 * p - 1.0) / std::sqrt(2.0 * p * (1.0 - p));

  // Solve P(T > t) = 1 - p on a bracket, Newton steps with bisection fallback.
  const double target = 1.0 - p;
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * normal_quantile(p));
  while (student_t_tail(hi, df) > target) {
    lo = hi;
    hi *= 2.0;
  }
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = student_t_tail(t, df) - target;
    if (f > 0.0) lo = t; else hi = t;
    double next = t + f / student_t_pdf(t, df);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-15 * std::max(1.0, std::fabs(t))) return next;
    t = next;
  }
  return t;
}

// c with P(|T| > c) = alpha for T ~ t(df).
inline double student_t_two_sided_cv(double alpha, int df) {
  detail::require_probability(alpha);
  return student_t_quantile(1.0 - 0.5 * alpha, df);
}

enum class StudentMode { cdf, quantile, two_sided_cv };

inline double student_t(double x, int df, StudentMode mode) {
  switch (mode) {
    case StudentMode::cdf: return student_t_cdf(x, df);
    case StudentMode::quantile: return student_t_quantile(x, df);
    case StudentMode::two_sided_cv: return student_t_two_sided_cv(x, df);
  }
  throw std::logic_error("unknown Student t mode");
}

// ---------------------------------------------------------------------------
// Chi-square

inline double chi_square_sf(double x, int k) {
  detail::require_df(k);
  if (!(x >= 0.0)) throw std::domain_error("chi_square_sf requires x >= 0");
  if (k == 2) return std::exp(-0.5 * x);
  return incomplete_gamma_upper(0.5 * k, 0.5 * x);
}

inline double chi_square_cdf(double x, int k) {
  detail::require_df(k);
  if (!(x >= 0.0)) throw std::domain_error("chi_square_cdf requires x >= 0");
  if (k == 2) return -std::expm1(-0.5 * x);
  if (x < 0.5 * k + 1.0) return detail::gamma_series(0.5 * k, 0.5 * x);
  return 1.0 - detail::gamma_continued_fraction(0.5 * k, 0.5 * x);
}

inline double chi_square_pdf(double x, int k) {
  detail::require_df(k);
  if (x <= 0.0) return k == 2 ? (x == 0.0 ? 0.5 : 0.0) : 0.0;
  const double a = 0.5 * k;
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::numbers::ln2 - detail::log_gamma(a));
}

inline double chi_square_quantile(double p, int k) {
  detail::require_df(k);
  detail::require_probability(p);
  if (k == 2) return -2.0 * std::log1p(-p);
  double lo = 0.0;
  double hi = std::max(1.0, 2.0 * k);
  while (chi_square_cdf(hi, k) < p) {
    lo = hi;
    hi *= 2.0;
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 300; ++iter) {
    const double f = chi_square_cdf(x, k) - p;
    if (f < 0.0) lo = x; else hi = x;
    const double pdf = chi_square_pdf(x, k);
    double next = pdf > 0.0 ? x - f / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 1e-15 * std::max(1.0, x)) return next;
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------

/// Kolmogorov-Smirnov distance sup |F_n - F| between the empirical
/// distribution of `values` and a continuous cdf.
template <typename Cdf>
double ks_distance(std::span<const double> values, Cdf cdf) {
  if (values.empty()) throw std::invalid_argument("ks_distance needs at least one value");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace cauchyreg::dist
