#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cauchyreg {

/// Aligned predictive-regression data: responses y_t (t = 1..T) paired with
/// lagged predictors x_{t-1}. Predictors are stored column-wise (K columns of
/// length T). The optional level series holds x_0, x_1, ... and is required by
/// the differenced (intercept-robust) estimators; when present its first T
/// entries coincide with the single predictor column.
class RegressionSample {
 public:
  RegressionSample() = default;

  static RegressionSample univariate(std::vector<double> y, std::vector<double> x_lag,
                                     std::vector<double> x_level = {}) {
    RegressionSample s;
    s.y_ = std::move(y);
    s.x_lag_.push_back(std::move(x_lag));
    s.x_level_ = std::move(x_level);
    s.validate();
    return s;
  }

  static RegressionSample multivariate(std::vector<double> y, std::vector<std::vector<double>> columns) {
    RegressionSample s;
    s.y_ = std::move(y);
    s.x_lag_ = std::move(columns);
    s.validate();
    return s;
  }

  std::size_t size() const { return y_.size(); }
  std::size_t predictors() const { return x_lag_.size(); }
  bool has_levels() const { return !x_level_.empty(); }

  std::span<const double> y() const { return y_; }
  std::span<const double> x(std::size_t k = 0) const { return x_lag_.at(k); }
  std::span<const double> x_level() const { return x_level_; }

  // Univariate sample built from predictor column k (levels dropped).
  RegressionSample column(std::size_t k) const {
    return univariate(y_, x_lag_.at(k));
  }

 private:
  void validate() const {
    const std::size_t T = y_.size();
    if (T < 2) throw std::invalid_argument("regression sample needs at least 2 observations");
    if (x_lag_.empty()) throw std::invalid_argument("regression sample needs at least one predictor");
    for (double v : y_) {
      if (!std::isfinite(v)) throw std::invalid_argument("response contains a non-finite value");
    }
    for (std::size_t k = 0; k < x_lag_.size(); ++k) {
      if (x_lag_[k].size() != T) {
        throw std::invalid_argument("predictor column " + std::to_string(k) + " has length " +
                                    std::to_string(x_lag_[k].size()) + ", expected " + std::to_string(T));
      }
      for (double v : x_lag_[k]) {
        if (!std::isfinite(v)) throw std::invalid_argument("predictor contains a non-finite value");
      }
    }
    if (x_level_.empty()) return;
    if (x_lag_.size() != 1) throw std::invalid_argument("level series is only supported for one predictor");
    if (x_level_.size() != T && x_level_.size() != T + 1) {
      throw std::invalid_argument("level series must have length T or T+1");
    }
    for (std::size_t t = 0; t < x_level_.size(); ++t) {
      if (!std::isfinite(x_level_[t])) throw std::invalid_argument("level series contains a non-finite value");
      if (t < T && x_level_[t] != x_lag_[0][t]) {
        throw std::invalid_argument("level series entry " + std::to_string(t) +
                                    " does not match the lagged predictor");
      }
    }
  }

  std::vector<double> y_;
  std::vector<std::vector<double>> x_lag_;
  std::vector<double> x_level_;
};

}  // namespace cauchyreg
