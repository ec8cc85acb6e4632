#include "mds/metrics.hpp"

#include <limits>

namespace mds {

MetricsReport improvement(const MatrixF& gt, const MatrixF& noisy, const MatrixF& denoised,
                          const SsimParams& params) {
  MetricsReport r;
  const auto pn = psnr(gt, noisy);
  const auto pd = psnr(gt, denoised);
  r.psnr_noisy_finite = pn.has_value();
  r.psnr_denoised_finite = pd.has_value();
  r.psnr_noisy = pn.value_or(std::numeric_limits<double>::infinity());
  r.psnr_denoised = pd.value_or(std::numeric_limits<double>::infinity());
  r.ssim_noisy = ssim(gt, noisy, params);
  r.ssim_denoised = ssim(gt, denoised, params);
  r.psnr_improvement = r.psnr_denoised - r.psnr_noisy;
  r.ssim_improvement = r.ssim_denoised - r.ssim_noisy;
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  r.ssim_out_of_range = !in01(r.ssim_noisy) || !in01(r.ssim_denoised);
  return r;
}

}  // namespace mds
