#include "mds/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "mds/rng.hpp"

namespace mds {

void NaturalNoiseParams::validate() const {
  if (rho_f < 0.0 || rho_f >= 1.0 || rho_t < 0.0 || rho_t >= 1.0) {
    throw std::invalid_argument("AR(1) coefficients must lie in [0,1)");
  }
  if (background_std < 0.0) throw std::invalid_argument("background std must be >= 0");
  if (min_rects < 0 || max_rects < min_rects) throw std::invalid_argument("bad rectangle count range");
  if (rect_f_min < 1 || rect_f_max < rect_f_min || rect_t_min < 1 || rect_t_max < rect_t_min) {
    throw std::invalid_argument("bad rectangle extent range");
  }
  if (rect_intensity_min < 0.0 || rect_intensity_max < rect_intensity_min) {
    throw std::invalid_argument("bad rectangle intensity range");
  }
  if (band_peak < 0.0 || band_rows < 0) throw std::invalid_argument("bad band gradient");
}

namespace {

void check_shape(SimShape shape) {
  if (shape.doppler_bins < kPatchRows || shape.time_bins < kPatchCols) {
    throw std::invalid_argument("shape must accommodate at least one 100x28 patch window");
  }
}

MotionComponent comp(double amp, double f0, double f1, double osc_amp, double osc_freq,
                     double phase, double spread, double t0, double t1) {
  MotionComponent c;
  c.amplitude = amp;
  c.f_start_hz = f0;
  c.f_end_hz = f1;
  c.osc_amp_hz = osc_amp;
  c.osc_freq_hz = osc_freq;
  c.osc_phase_rad = phase;
  c.doppler_spread_hz = spread;
  c.t_start_s = t0;
  c.t_end_s = t1;
  return c;
}

}  // namespace

MotionTemplate activity_template(Activity a) {
  MotionTemplate t;
  switch (a) {
    case Activity::SitDown: {
      // Torso dips to negative Doppler and settles; limbs flail mid-motion.
      const double d = 5.5;
      t.duration_s = d;
      t.components = {
          comp(1.0, 0.0, 0.0, -26.0, 0.5 / d, 0.0, 3.0, 0.0, d),
          comp(0.40, -8.0, -12.0, 9.0, 1.3, 0.7, 2.5, 0.15 * d, 0.65 * d),
          comp(0.30, 10.0, 6.0, 6.0, 1.9, 0.2, 2.0, 0.1 * d, 0.8 * d),
      };
      break;
    }
    case Activity::StandUp: {
      const double d = 5.0;
      t.duration_s = d;
      t.components = {
          comp(1.0, 0.0, 0.0, 27.0, 0.5 / d, 0.0, 3.0, 0.0, d),
          comp(0.40, 9.0, 13.0, 8.0, 1.4, 1.1, 2.5, 0.2 * d, 0.7 * d),
          comp(0.28, -9.0, -5.0, 5.0, 2.1, 0.5, 2.0, 0.1 * d, 0.85 * d),
      };
      break;
    }
    case Activity::SitToWalk: {
      const double d = 6.5;
      t.duration_s = d;
      t.components = {
          comp(1.0, 2.0, 14.0, 7.0, 0.8, 0.0, 3.0, 0.0, d),
          comp(0.50, 18.0, 26.0, 14.0, 1.1, 0.9, 3.0, 0.35 * d, d),
          comp(0.32, -6.0, -14.0, 8.0, 1.6, 0.3, 2.5, 0.4 * d, d),
          comp(0.25, 30.0, 34.0, 5.0, 2.2, 1.5, 2.0, 0.55 * d, 0.95 * d),
      };
      break;
    }
    case Activity::WalkToSit: {
      const double d = 6.5;
      t.duration_s = d;
      t.components = {
          comp(1.0, 12.0, -8.0, 6.0, 0.7, 0.4, 3.0, 0.0, d),
          comp(0.50, 24.0, 12.0, 13.0, 1.2, 0.0, 3.0, 0.0, 0.6 * d),
          comp(0.35, -16.0, -20.0, 7.0, 1.5, 1.2, 2.5, 0.05 * d, 0.55 * d),
          comp(0.28, -24.0, -10.0, 5.0, 0.9, 0.8, 2.5, 0.55 * d, d),
      };
      break;
    }
    case Activity::WalkToFall: {
      const double d = 6.0;
      t.duration_s = d;
      t.components = {
          comp(1.0, 8.0, 8.0, 6.0, 1.0, 0.0, 3.0, 0.0, 0.55 * d),
          comp(1.0, -6.0, -44.0, 0.0, 0.0, 0.0, 4.0, 0.5 * d, 0.72 * d),
          comp(0.45, 20.0, 24.0, 10.0, 1.3, 0.6, 3.0, 0.05 * d, 0.5 * d),
          comp(0.35, -2.0, -1.0, 1.5, 0.6, 0.0, 1.5, 0.7 * d, d),
      };
      break;
    }
    case Activity::StandFromFloor: {
      const double d = 7.0;
      t.duration_s = d;
      t.components = {
          comp(1.0, -2.0, 30.0, 4.0, 0.4, 0.0, 3.5, 0.0, 0.6 * d),
          comp(1.0, 16.0, 10.0, 9.0, 1.0, 0.3, 3.0, 0.55 * d, d),
          comp(0.38, -12.0, -4.0, 6.0, 1.7, 1.0, 2.5, 0.1 * d, 0.5 * d),
          comp(0.30, 36.0, 28.0, 6.0, 1.4, 0.2, 2.5, 0.6 * d, 0.95 * d),
      };
      break;
    }
  }
  t.validate();
  return t;
}

MotionTemplate perturb_template(const MotionTemplate& tmpl, std::uint64_t seed) {
  if (seed == 0) return tmpl;
  MotionTemplate out = tmpl;
  Rng rng(derive_seed(seed, "template-jitter"));
  for (auto& c : out.components) {
    const double da = 0.1 * rng.uniform(-1.0, 1.0);
    c.amplitude = std::clamp(c.amplitude * (1.0 + da), 1e-3, 1.0);
    c.osc_phase_rad += 0.1 * 2.0 * M_PI * rng.uniform(-1.0, 1.0);
  }
  return out;
}

Spectrogram synthesize_clean(const MotionTemplate& tmpl, SimShape shape, std::uint64_t seed) {
  check_shape(shape);
  tmpl.validate();
  const MotionTemplate jit = perturb_template(tmpl, seed);

  Spectrogram s = make_spectrogram(shape.doppler_bins, shape.time_bins, kDopplerStepHz, kTimeStepS);
  const double f_lo = s.doppler_axis[0];
  const double f_hi = s.doppler_axis[shape.doppler_bins - 1];

  Eigen::ArrayXd column(shape.doppler_bins);
  const Eigen::ArrayXd freqs = s.doppler_axis.array();
  for (Index t = 0; t < shape.time_bins; ++t) {
    const double time = s.time_axis[t];
    column.setZero();
    for (const auto& c : jit.components) {
      if (time < c.t_start_s || time > c.t_end_s) continue;
      const double fc = c.center_hz(time);
      if (fc < f_lo || fc > f_hi) {
        throw std::out_of_range("component trajectory exits the Doppler axis range");
      }
      const double inv2s2 = 1.0 / (2.0 * c.doppler_spread_hz * c.doppler_spread_hz);
      column += c.amplitude * (-(freqs - fc).square() * inv2s2).exp();
    }
    s.data.col(t) = column.min(1.0).max(0.0).cast<float>();
  }
  return s;
}

Spectrogram synthesize_natural_noise(SimShape shape, const NaturalNoiseParams& params,
                                     std::uint64_t seed,
                                     std::vector<RectPlacement>* placements_out) {
  check_shape(shape);
  params.validate();
  const Index F = shape.doppler_bins;
  const Index T = shape.time_bins;
  Rng rng(derive_seed(seed, "natural-noise"));

  // AR(1) background, time axis first then Doppler axis; innovations are
  // scaled so the stationary marginal variance stays at 1 before background_std.
  MatrixD x(F, T);
  for (Index f = 0; f < F; ++f) {
    for (Index t = 0; t < T; ++t) x(f, t) = rng.normal();
  }
  if (params.rho_t > 0.0) {
    const double k = std::sqrt(1.0 - params.rho_t * params.rho_t);
    for (Index f = 0; f < F; ++f) {
      for (Index t = 1; t < T; ++t) x(f, t) = params.rho_t * x(f, t - 1) + k * x(f, t);
    }
  }
  if (params.rho_f > 0.0) {
    const double k = std::sqrt(1.0 - params.rho_f * params.rho_f);
    for (Index t = 0; t < T; ++t) {
      for (Index f = 1; f < F; ++f) x(f, t) = params.rho_f * x(f - 1, t) + k * x(f, t);
    }
  }
  x = (x.array() * params.background_std + params.background_mean).matrix();

  // Narrow high-energy rectangles at random positions.
  const int n_rects = params.max_rects > 0
                          ? static_cast<int>(rng.uniform_int(params.min_rects, params.max_rects))
                          : 0;
  std::vector<RectPlacement> rects;
  for (int i = 0; i < n_rects; ++i) {
    RectPlacement r;
    const Index h = std::min<Index>(rng.uniform_int(params.rect_f_min, params.rect_f_max), F);
    const Index w = std::min<Index>(rng.uniform_int(params.rect_t_min, params.rect_t_max), T);
    r.f0 = rng.uniform_int(0, F - h);
    r.t0 = rng.uniform_int(0, T - w);
    r.f1 = r.f0 + h;
    r.t1 = r.t0 + w;
    r.intensity = rng.uniform(params.rect_intensity_min, params.rect_intensity_max);
    x.block(r.f0, r.t0, h, w).array() += r.intensity;
    rects.push_back(r);
  }

  // Interference gradient over the lowest Doppler rows.
  if (params.band_peak > 0.0 && params.band_rows > 0) {
    for (Index f = 0; f < std::min(params.band_rows, F); ++f) {
      const double g = params.band_peak *
                       (1.0 - static_cast<double>(f) / static_cast<double>(params.band_rows));
      x.row(f).array() += g;
    }
  }

  Spectrogram s = make_spectrogram(F, T, kDopplerStepHz, kTimeStepS);
  s.data = x.array().min(1.0).max(0.0).cast<float>();
  if (placements_out) *placements_out = std::move(rects);
  return s;
}

MeasuredRecording compose_recording(
    const std::vector<std::pair<MotionTemplate, Activity>>& activities, double idle_gap_s,
    const ComposeOptions& opts, std::uint64_t seed) {
  if (activities.empty()) throw std::invalid_argument("compose_recording needs at least one activity");
  if (idle_gap_s <= 0.0) throw std::invalid_argument("idle gap must be positive");
  opts.noise.validate();

  const auto gap_cols = static_cast<Index>(std::lround(idle_gap_s / kTimeStepS));
  if (gap_cols < 1) throw std::invalid_argument("idle gap shorter than one time bin");

  std::vector<Index> act_cols(activities.size());
  Index total = 0;
  for (std::size_t i = 0; i < activities.size(); ++i) {
    activities[i].first.validate();
    act_cols[i] = static_cast<Index>(std::lround(activities[i].first.duration_s / kTimeStepS));
    if (act_cols[i] < 1) throw std::invalid_argument("activity shorter than one time bin");
    total += act_cols[i];
  }
  const Index n_gaps = static_cast<Index>(activities.size()) - 1 + (opts.lead_in ? 1 : 0) +
                       (opts.tail ? 1 : 0);
  total += n_gaps * gap_cols;
  if (static_cast<double>(total) * kTimeStepS > opts.max_duration_s) {
    throw std::length_error("composed recording exceeds the configured maximum duration");
  }

  const SimShape shape{128, total};
  MeasuredRecording rec;
  rec.seed = seed;
  rec.spectrogram = make_spectrogram(shape.doppler_bins, total, kDopplerStepHz, kTimeStepS);
  MatrixF clean = MatrixF::Zero(shape.doppler_bins, total);

  Index cur = 0;
  auto push_idle = [&](Index cols) {
    rec.idle_intervals.push_back({static_cast<double>(cur) * kTimeStepS,
                                  static_cast<double>(cur + cols) * kTimeStepS});
    cur += cols;
  };
  if (opts.lead_in) push_idle(gap_cols);
  for (std::size_t i = 0; i < activities.size(); ++i) {
    if (i > 0) push_idle(gap_cols);
    const auto seg_seed = derive_seed(seed, "activity", i);
    const Spectrogram seg = synthesize_clean(activities[i].first,
                                             SimShape{shape.doppler_bins, act_cols[i]}, seg_seed);
    clean.middleCols(cur, act_cols[i]) = seg.data;
    rec.activity_intervals.push_back({static_cast<double>(cur) * kTimeStepS,
                                      static_cast<double>(cur + act_cols[i]) * kTimeStepS,
                                      activities[i].second});
    cur += act_cols[i];
  }
  if (opts.tail) push_idle(gap_cols);

  const Spectrogram noise = compose_noise_field(shape, opts.noise, seed);
  rec.spectrogram.data = (clean + noise.data).array().min(1.0f).max(0.0f);
  rec.validate();
  return rec;
}

Spectrogram compose_noise_field(SimShape shape, const NaturalNoiseParams& params,
                                std::uint64_t recording_seed) {
  return synthesize_natural_noise(shape, params, derive_seed(recording_seed, "noise"));
}

}  // namespace mds
