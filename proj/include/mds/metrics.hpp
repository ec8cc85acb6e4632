#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "mds/types.hpp"

namespace mds {

/// Stabilizers for the structural-similarity ratio. c1/c2 derive from the
/// dynamic range L of the normalized data.
struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

namespace detail {
struct Moments {
  double mean_x, mean_y, var_x, var_y, cov;
};

template <typename DA, typename DB>
Moments whole_image_moments(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("metric inputs must share one shape");
  }
  const MatrixD xd = x.template cast<double>();
  const MatrixD yd = y.template cast<double>();
  Moments m;
  m.mean_x = xd.mean();
  m.mean_y = yd.mean();
  const MatrixD cx = xd.array() - m.mean_x;
  const MatrixD cy = yd.array() - m.mean_y;
  const auto n = static_cast<double>(xd.size());
  m.var_x = cx.squaredNorm() / n;
  m.var_y = cy.squaredNorm() / n;
  m.cov = (cx.array() * cy.array()).sum() / n;
  return m;
}
}  // namespace detail

/// Whole-image structural similarity from global means, variances and the
/// covariance. Symmetric in (x, y); 1.0 for identical inputs.
template <typename DA, typename DB>
double ssim(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y,
            const SsimParams& p = {}) {
  const auto m = detail::whole_image_moments(x, y);
  const double c1 = p.c1();
  const double c2 = p.c2();
  return ((2.0 * m.mean_x * m.mean_y + c1) * (2.0 * m.cov + c2)) /
         ((m.mean_x * m.mean_x + m.mean_y * m.mean_y + c1) * (m.var_x + m.var_y + c2));
}

/// Sliding-window SSIM variant: mean of the whole-image statistic over square
/// windows tiling both inputs.
template <typename DA, typename DB>
double ssim_windowed(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y,
                     Index window, const SsimParams& p = {}) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("metric inputs must share one shape");
  }
  if (window < 1 || window > x.rows() || window > x.cols()) {
    throw std::invalid_argument("ssim window does not fit the inputs");
  }
  double acc = 0.0;
  Index count = 0;
  for (Index r = 0; r + window <= x.rows(); r += window) {
    for (Index c = 0; c + window <= x.cols(); c += window) {
      acc += ssim(x.derived().block(r, c, window, window).eval(),
                  y.derived().block(r, c, window, window).eval(), p);
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

template <typename DA, typename DB>
double mse(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw std::invalid_argument("metric inputs must share one shape");
  }
  return (x.template cast<double>() - y.template cast<double>()).array().square().mean();
}

/// Peak signal-to-noise ratio in dB; nullopt marks the infinite-PSNR case of
/// identical inputs.
template <typename DA, typename DB>
std::optional<double> psnr(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y,
                           double peak = 1.0) {
  const double m = mse(x, y);
  if (m <= 0.0) return std::nullopt;
  return 10.0 * std::log10(peak * peak / m);
}

/// Before/after comparison record for one (gt, noisy, denoised) triple.
struct MetricsReport {
  double psnr_noisy = 0.0;
  double psnr_denoised = 0.0;
  double ssim_noisy = 0.0;
  double ssim_denoised = 0.0;
  double psnr_improvement = 0.0;
  double ssim_improvement = 0.0;
  bool psnr_noisy_finite = true;
  bool psnr_denoised_finite = true;
  bool ssim_out_of_range = false;  // raw Eq.-4 value escaped [0,1]; reported, never clamped

  std::string model_tag;
  std::string arch_tag;
  double snr_db = 0.0;
  std::string activity;
};

MetricsReport improvement(const MatrixF& gt, const MatrixF& noisy, const MatrixF& denoised,
                          const SsimParams& params = {});

}  // namespace mds
