#pragma once

#include "mds/types.hpp"

namespace mds {

/// Population mean of all entries.
template <typename Derived>
double field_mean(const Eigen::MatrixBase<Derived>& x) {
  return x.template cast<double>().mean();
}

/// Population (central, 1/n) variance of all entries.
template <typename Derived>
double field_variance(const Eigen::MatrixBase<Derived>& x) {
  const double mu = field_mean(x);
  return (x.template cast<double>().array() - mu).square().mean();
}

/// Pooled lag-1 autocorrelation along the time (column) axis: all rows share
/// one global mean, pairs (t, t+1) are pooled over the whole field.
template <typename Derived>
double lag1_time_autocorr(const Eigen::MatrixBase<Derived>& x) {
  const MatrixD m = x.template cast<double>();
  const double mu = m.mean();
  const MatrixD c = m.array() - mu;
  const Index t = c.cols();
  if (t < 2) return 0.0;
  const double cov = (c.leftCols(t - 1).array() * c.rightCols(t - 1).array()).sum();
  const double var = c.array().square().sum();
  return var > 0.0 ? cov / var : 0.0;
}

/// Median over rows of the per-row (mean-removed) lag-1 time autocorrelation.
/// Robust to localized structure such as high-energy rectangles.
double median_row_lag1_autocorr(const MatrixF& x);

/// Excess kurtosis of all entries (0 for a Gaussian field).
double excess_kurtosis(const MatrixF& x);

}  // namespace mds
