#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mds/types.hpp"

namespace mds {

struct RectPlacement {
  Index f0 = 0, f1 = 0;  // half-open row range
  Index t0 = 0, t1 = 0;  // half-open column range
  double intensity = 0.0;
};

/// Structured environmental noise: AR(1)-correlated background plus narrow
/// high-energy rectangles and a low-Doppler band gradient.
struct NaturalNoiseParams {
  double rho_f = 0.7;            // lag-1 correlation along the Doppler axis
  double rho_t = 0.9;            // lag-1 correlation along the time axis
  double background_std = 0.05;
  double background_mean = 0.12; // noise floor; keeps [0,1] clipping off the bulk
  int min_rects = 1;
  int max_rects = 4;
  Index rect_f_min = 4, rect_f_max = 10;    // rectangle height in Doppler bins
  Index rect_t_min = 20, rect_t_max = 60;   // rectangle width in time bins
  double rect_intensity_min = 0.3;
  double rect_intensity_max = 0.6;
  double band_peak = 0.15;       // gradient peak at the bottom Doppler row
  Index band_rows = 12;          // rows the gradient decays over

  void validate() const;
};

struct SimShape {
  Index doppler_bins = 128;
  Index time_bins = 256;
};

inline constexpr double kDopplerStepHz = 1.0;
inline constexpr double kTimeStepS = 0.025;

/// Hand-authored canonical motion template for one activity class.
MotionTemplate activity_template(Activity a);

/// Jitters component amplitudes and oscillation phases within +-10%.
/// synthesize_clean applies this internally; it is exposed so oracles can
/// reconstruct the exact rendered trajectories.
MotionTemplate perturb_template(const MotionTemplate& tmpl, std::uint64_t seed);

/// Renders a clean spectrogram: per column, the sum of each active component's
/// Gaussian ridge, clipped to [0,1]. Zero outside every component support.
Spectrogram synthesize_clean(const MotionTemplate& tmpl, SimShape shape, std::uint64_t seed);

/// Noise-only field, deterministic per seed, values in [0,1]. When
/// `placements_out` is non-null the rectangle placement log is returned.
Spectrogram synthesize_natural_noise(SimShape shape, const NaturalNoiseParams& params,
                                     std::uint64_t seed,
                                     std::vector<RectPlacement>* placements_out = nullptr);

struct ComposeOptions {
  NaturalNoiseParams noise;
  bool lead_in = true;            // idle segment before the first activity
  bool tail = true;               // idle segment after the last activity
  double max_duration_s = 120.0;
};

/// Concatenates activity segments separated by `idle_gap_s` idle segments and
/// adds one natural-noise field over the whole duration.
MeasuredRecording compose_recording(const std::vector<std::pair<MotionTemplate, Activity>>& activities,
                                    double idle_gap_s, const ComposeOptions& opts,
                                    std::uint64_t seed);

/// The noise field compose_recording added, regenerated from the same seed.
Spectrogram compose_noise_field(SimShape shape, const NaturalNoiseParams& params,
                                std::uint64_t recording_seed);

}  // namespace mds
