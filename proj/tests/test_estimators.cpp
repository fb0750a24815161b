#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "cauchyreg/errors.hpp"
#include "cauchyreg/estimators.hpp"
#include "cauchyreg/rng.hpp"

using namespace cauchyreg;

namespace {

RegressionSample random_sample(RngStream& s, std::size_t T, bool levels = false) {
  std::vector<double> x(T + 1), y(T);
  for (auto& v : x) v = s.normal() * 2.0;
  for (auto& v : y) v = s.normal();
  if (levels) return RegressionSample::univariate(y, std::vector<double>(x.begin(), x.end() - 1), x);
  x.pop_back();
  return RegressionSample::univariate(y, x);
}

}  // namespace

// sign convention ------------------------------------------------------------

TEST(SignConv, ZeroIsPositive) {
  EXPECT_EQ(sign_conv(0.0), 1);
  EXPECT_EQ(sign_conv(-0.0), 1);
  EXPECT_EQ(sign_conv(-3.2), -1);
  EXPECT_EQ(sign_conv(1e-300), 1);
}

// Cauchy estimator -----------------------------------------------------------

TEST(CauchyEstimate, ExactLinearFit) {
  const auto fit = cauchy_estimate(RegressionSample::univariate({2, -4, 6}, {1, -2, 3}));
  EXPECT_DOUBLE_EQ(fit.beta, 2.0);
}

TEST(CauchyEstimate, TwoPointHandValue) {
  const auto fit = cauchy_estimate(RegressionSample::univariate({3, -1}, {1, -1}));
  EXPECT_DOUBLE_EQ(fit.beta, 2.0);
  EXPECT_NEAR(fit.gamma, 4.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(fit.denom, 2.0);
}

TEST(CauchyEstimate, ZeroPredictorCountsAsPositive) {
  const auto fit = cauchy_estimate(RegressionSample::univariate({5, 1}, {0, 1}));
  EXPECT_DOUBLE_EQ(fit.beta, 6.0);
  EXPECT_DOUBLE_EQ(fit.denom, 1.0);
}

TEST(CauchyEstimate, AllZeroPredictorIsDegenerate) {
  EXPECT_THROW(cauchy_estimate(RegressionSample::univariate({1, 2, 3}, {0, 0, 0})), DegenerateDenominatorError);
}

TEST(CauchyEstimate, MatchesDirectFormulaOnRandomSamples) {
  RngStream s(101, 0);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t T = 2 + static_cast<std::size_t>(s.uniform() * 30);
    const auto sample = random_sample(s, T);
    double num = 0, den = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const double sg = sample.x()[t] < 0 ? -1.0 : 1.0;
      num += sg * sample.y()[t];
      den += std::fabs(sample.x()[t]);
    }
    const auto fit = cauchy_estimate(sample);
    EXPECT_NEAR(fit.beta, num / den, 1e-12 * std::max(1.0, std::fabs(num / den)));
    EXPECT_NEAR(fit.gamma, num / std::sqrt(static_cast<double>(T)), 1e-12);
    EXPECT_NEAR(fit.gamma, fit.denom * fit.beta / fit.scale, 1e-12);
  }
}

TEST(CauchyEstimate, ScaleEquivariance) {
  RngStream s(5, 1);
  for (int rep = 0; rep < 100; ++rep) {
    const auto base = random_sample(s, 50);
    const double c = 0.1 + 10.0 * s.uniform();
    std::vector<double> cy(base.y().begin(), base.y().end()), cx(base.x().begin(), base.x().end());
    for (auto& v : cy) v *= c;
    for (auto& v : cx) v *= c;
    const auto f0 = cauchy_estimate(base);
    const auto fy = cauchy_estimate(RegressionSample::univariate(cy, {base.x().begin(), base.x().end()}));
    const auto fx = cauchy_estimate(RegressionSample::univariate({base.y().begin(), base.y().end()}, cx));
    EXPECT_NEAR(fy.beta, c * f0.beta, 1e-12 * std::max(1.0, std::fabs(c * f0.beta)));
    EXPECT_NEAR(fy.gamma, c * f0.gamma, 1e-12 * std::max(1.0, std::fabs(c * f0.gamma)));
    EXPECT_NEAR(fx.beta, f0.beta / c, 1e-12 * std::max(1.0, std::fabs(f0.beta / c)));
    EXPECT_EQ(fx.gamma, f0.gamma);
  }
}

TEST(CauchyEstimate, ExactFitRecovery) {
  RngStream s(6, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const double beta = 4.0 * s.normal();
    std::vector<double> x(40), y(40);
    for (std::size_t t = 0; t < x.size(); ++t) {
      x[t] = s.normal();
      y[t] = beta * x[t];
    }
    EXPECT_NEAR(cauchy_estimate(RegressionSample::univariate(y, x)).beta, beta, 1e-12 * std::max(1.0, std::fabs(beta)));
  }
}

// Groups ---------------------------------------------------------------------

TEST(GroupGammas, HandValues) {
  const auto g = group_gammas(RegressionSample::univariate({1, 2, 3, 1, 1, 1}, {1, 1, 1, -1, -1, -1}), 2);
  ASSERT_EQ(g.gammas.size(), 2u);
  EXPECT_NEAR(g.gammas[0], std::sqrt(2.0 / 6.0) * 6.0, 1e-15);
  EXPECT_NEAR(g.gammas[1], std::sqrt(2.0 / 6.0) * -3.0, 1e-15);
  EXPECT_EQ(g.block_size, 3u);
  EXPECT_EQ(g.dropped, 0u);
}

TEST(GroupGammas, RemainderIsDropped) {
  std::vector<double> y(10, 1.0), x(10, 1.0);
  y[9] = 1000.0;
  const auto g = group_gammas(RegressionSample::univariate(y, x), 3);
  EXPECT_EQ(g.block_size, 3u);
  EXPECT_EQ(g.dropped, 1u);
  for (double v : g.gammas) EXPECT_NEAR(v, std::sqrt(3.0 / 10.0) * 3.0, 1e-14);
}

TEST(GroupGammas, ZeroResponseGivesZeroGroups) {
  const auto g = group_gammas(RegressionSample::univariate(std::vector<double>(12, 0.0), std::vector<double>(12, 1.0)), 4);
  for (double v : g.gammas) EXPECT_EQ(v, 0.0);
}

TEST(GroupGammas, PartitionErrors) {
  const auto s = RegressionSample::univariate({1, 2, 3}, {1, 1, 1});
  EXPECT_THROW(group_gammas(s, 4), PartitionError);
  EXPECT_THROW(group_gammas(s, 1), std::invalid_argument);
  EXPECT_NO_THROW(group_gammas(s, 3));
}

TEST(GroupGammas, PartitionConsistency) {
  RngStream s(8, 8);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t T = 20 + static_cast<std::size_t>(s.uniform() * 200);
    const std::size_t q = 2 + static_cast<std::size_t>(s.uniform() * 15);
    const auto sample = random_sample(s, T);
    const auto g = group_gammas(sample, q);
    const std::size_t used = q * g.block_size;
    EXPECT_EQ(g.dropped, T - used);
    EXPECT_LT(g.dropped, q);
    double numer = 0.0;
    for (std::size_t t = 0; t < used; ++t) numer += sign_conv(sample.x()[t]) * sample.y()[t];
    double recombined = 0.0;
    for (double v : g.gammas) recombined += v * std::sqrt(static_cast<double>(T) / static_cast<double>(q));
    EXPECT_NEAR(recombined / std::sqrt(static_cast<double>(T)), numer / std::sqrt(static_cast<double>(T)), 1e-10);
  }
}

// OLS ------------------------------------------------------------------------

TEST(OlsFit, ExactFitWithoutIntercept) {
  const auto f = ols_fit(RegressionSample::univariate({2, 4}, {1, 2}), false);
  EXPECT_DOUBLE_EQ(f.beta[0], 2.0);
  EXPECT_DOUBLE_EQ(f.residuals[0], 0.0);
  EXPECT_DOUBLE_EQ(f.residuals[1], 0.0);
}

TEST(OlsFit, HandNormalEquations) {
  const auto f = ols_fit(RegressionSample::univariate({1, 1}, {1, -1}), false);
  EXPECT_DOUBLE_EQ(f.beta[0], 0.0);
  EXPECT_DOUBLE_EQ(f.residuals[0], 1.0);
  EXPECT_DOUBLE_EQ(f.residuals[1], 1.0);
}

TEST(OlsFit, ConstantResponseWithIntercept) {
  const auto f = ols_fit(RegressionSample::univariate({5, 5, 5}, {1, 2, 3}), true);
  EXPECT_DOUBLE_EQ(f.beta[0], 0.0);
  for (double r : f.residuals) EXPECT_DOUBLE_EQ(r, 0.0);
}

TEST(OlsFit, SingularDesigns) {
  EXPECT_THROW(ols_fit(RegressionSample::univariate({1, 2}, {0, 0}), false), SingularDesignError);
  EXPECT_THROW(ols_fit(RegressionSample::univariate({1, 2, 3}, {4, 4, 4}), true), SingularDesignError);
  EXPECT_THROW(ols_fit(RegressionSample::multivariate({1, 2, 3}, {{1, 2, 3}, {2, 4, 6}}), false), SingularDesignError);
}

TEST(OlsFit, ResidualsOrthogonalToDesign) {
  RngStream s(12, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t T = 30 + static_cast<std::size_t>(s.uniform() * 100);
    std::vector<double> y(T), a(T), b(T);
    for (std::size_t t = 0; t < T; ++t) {
      a[t] = s.normal() + 3.0;
      b[t] = s.normal();
      y[t] = 1.5 + 0.3 * a[t] - b[t] + s.normal();
    }
    for (bool intercept : {false, true}) {
      const auto f1 = ols_fit(RegressionSample::univariate(y, a), intercept);
      const auto fk = ols_fit(RegressionSample::multivariate(y, {a, b}), intercept);
      double xa = 0, xb = 0, c1 = 0, ck = 0, xa1 = 0;
      const double abar = intercept ? std::accumulate(a.begin(), a.end(), 0.0) / T : 0.0;
      const double bbar = intercept ? std::accumulate(b.begin(), b.end(), 0.0) / T : 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        xa1 += (a[t] - abar) * f1.residuals[t];
        xa += (a[t] - abar) * fk.residuals[t];
        xb += (b[t] - bbar) * fk.residuals[t];
        c1 += f1.residuals[t];
        ck += fk.residuals[t];
      }
      EXPECT_NEAR(xa1, 0.0, 1e-8 * T);
      EXPECT_NEAR(xa, 0.0, 1e-8 * T);
      EXPECT_NEAR(xb, 0.0, 1e-8 * T);
      if (intercept) {
        EXPECT_NEAR(c1, 0.0, 1e-8 * T);
        EXPECT_NEAR(ck, 0.0, 1e-8 * T);
      }
    }
  }
}

TEST(OmegaHatSq, HandValues) {
  EXPECT_EQ(omega_hat_sq(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_EQ(omega_hat_sq(std::vector<double>{1, 1}), 1.0);
  EXPECT_EQ(omega_hat_sq(std::vector<double>{3, -4}), 12.5);
  EXPECT_THROW(omega_hat_sq(std::vector<double>{}), std::invalid_argument);
}

// Differenced estimator ------------------------------------------------------

TEST(DiffCauchy, EvenParityHandValue) {
  const auto s = RegressionSample::univariate({0, 5, 1, 4}, {1, 2, -1, 3}, {1, 2, -1, 3});
  const auto terms = differenced_terms(s, Parity::even);
  ASSERT_EQ(terms.numerator.size(), 2u);
  EXPECT_DOUBLE_EQ(terms.numerator[0], 5.0);
  EXPECT_DOUBLE_EQ(terms.numerator[1], -3.0);
  const auto fit = diff_cauchy(s, Parity::even);
  EXPECT_DOUBLE_EQ(fit.denom, -3.0);
  EXPECT_DOUBLE_EQ(fit.beta, -2.0 / 3.0);
  EXPECT_NEAR(fit.gamma, fit.denom * fit.beta / std::sqrt(4.0), 1e-15);
}

TEST(DiffCauchy, OddParityHandValue) {
  // pairs (y_2, y_3) and (y_4, y_5) with instruments sign(x_1), sign(x_3)
  const std::vector<double> lv{0.5, -1, 2, 4, -3, 1};
  const std::vector<double> y{1, 2, 7, 3, 5};
  const auto s = RegressionSample::univariate(y, {lv.begin(), lv.begin() + 5}, lv);
  const auto terms = differenced_terms(s, Parity::odd);
  ASSERT_EQ(terms.numerator.size(), 2u);
  EXPECT_DOUBLE_EQ(terms.numerator[0], -1.0 * (7 - 2));
  EXPECT_DOUBLE_EQ(terms.numerator[1], 1.0 * (5 - 3));
  EXPECT_DOUBLE_EQ(terms.denom, -1.0 * (2 - (-1)) + 1.0 * (-3 - 4));
}

TEST(DiffCauchy, ConstantResponseGivesZeroSlope) {
  const std::vector<double> lv{1, 2, -1, 3, 0.5, 2};
  const auto s = RegressionSample::univariate(std::vector<double>(5, 7.0), {lv.begin(), lv.end() - 1}, lv);
  for (Parity p : {Parity::even, Parity::odd}) EXPECT_EQ(diff_cauchy(s, p).beta, 0.0);
}

TEST(DiffCauchy, InterceptModelRecoversSlope) {
  RngStream rs(3, 3);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t T = 20;
    std::vector<double> lv(T + 1), y(T);
    for (auto& v : lv) v = rs.normal();
    const double alpha = rs.normal() * 5, beta = rs.normal();
    for (std::size_t t = 0; t < T; ++t) y[t] = alpha + beta * lv[t];
    const auto s = RegressionSample::univariate(y, {lv.begin(), lv.end() - 1}, lv);
    for (Parity p : {Parity::even, Parity::odd}) {
      EXPECT_NEAR(diff_cauchy(s, p).beta, beta, 1e-10 * std::max(1.0, std::fabs(beta)));
    }
  }
}

TEST(DiffCauchy, ParityStreamsUseDisjointDifferences) {
  for (std::size_t T : {4u, 5u, 10u, 11u}) {
    std::set<std::pair<std::size_t, std::size_t>> even, odd;
    for (std::size_t s = 2; s <= T; s += 2) even.insert({s - 1, s});
    for (std::size_t s = 3; s <= T; s += 2) odd.insert({s - 1, s});
    // Each parity stream uses non-overlapping response pairs.
    std::set<std::size_t> used_even, used_odd;
    for (auto [a, b] : even) {
      EXPECT_TRUE(used_even.insert(a).second);
      EXPECT_TRUE(used_even.insert(b).second);
    }
    for (auto [a, b] : odd) {
      EXPECT_TRUE(used_odd.insert(a).second);
      EXPECT_TRUE(used_odd.insert(b).second);
    }
    // and the library builds exactly those pairs: perturbing an unused y leaves it unchanged
    std::vector<double> lv(T + 1, 1.0), y(T, 0.0);
    const auto base = RegressionSample::univariate(y, {lv.begin(), lv.end() - 1}, lv);
    EXPECT_EQ(differenced_terms(base, Parity::even).numerator.size(), even.size());
    if (T >= 5) EXPECT_EQ(differenced_terms(base, Parity::odd).numerator.size(), odd.size());
  }
}

TEST(DiffCauchy, Preconditions) {
  EXPECT_THROW(diff_cauchy(RegressionSample::univariate({1, 2, 3, 4}, {1, 2, 3, 4}), Parity::even), std::invalid_argument);
  EXPECT_THROW(diff_cauchy(RegressionSample::univariate({1, 2, 3}, {1, 2, 3}, {1, 2, 3, 4}), Parity::odd),
               std::invalid_argument);
  const std::vector<double> flat{1, 1, 1, 1, 1};
  EXPECT_THROW(diff_cauchy(RegressionSample::univariate({1, 2, 3, 4}, {1, 1, 1, 1}, flat), Parity::even),
               DegenerateDenominatorError);
}

// Recursive demeaning --------------------------------------------------------

TEST(RecursiveDemean, HandValues) {
  const auto c = recursive_demean(std::vector<double>{4, 4, 4, 4});
  for (double v : c) EXPECT_EQ(v, 0.0);
  const auto d = recursive_demean(std::vector<double>{1, 3});
  EXPECT_DOUBLE_EQ(d[0], 0.0);
  EXPECT_DOUBLE_EQ(d[1], 1.0);
}

TEST(RecursiveDemean, UsesOnlyPastValues) {
  RngStream s(1, 2);
  std::vector<double> x(50);
  for (auto& v : x) v = s.normal();
  const auto a = recursive_demean(x);
  EXPECT_EQ(a[0], 0.0);
  x[30] += 100.0;
  const auto b = recursive_demean(x);
  for (std::size_t t = 0; t < 30; ++t) EXPECT_EQ(a[t], b[t]);
  EXPECT_NE(a[30], b[30]);
}
