#include "mds/types.hpp"

#include <array>
#include <cmath>

namespace mds {

double Spectrogram::duration() const {
  if (time_axis.size() == 0) return 0.0;
  if (time_axis.size() == 1) return time_axis[0];
  const double step = time_axis[1] - time_axis[0];
  return time_axis[time_axis.size() - 1] + step;
}

void Spectrogram::validate() const {
  if (data.rows() < kPatchRows || data.cols() < kPatchCols) {
    throw std::invalid_argument("spectrogram smaller than one patch window: " +
                                std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (doppler_axis.size() != data.rows() || time_axis.size() != data.cols()) {
    throw std::invalid_argument("spectrogram axis sizes do not match data shape");
  }
  for (Index i = 1; i < doppler_axis.size(); ++i) {
    if (!(doppler_axis[i] > doppler_axis[i - 1])) {
      throw std::invalid_argument("doppler_axis must be strictly increasing");
    }
  }
  for (Index i = 1; i < time_axis.size(); ++i) {
    if (!(time_axis[i] > time_axis[i - 1])) {
      throw std::invalid_argument("time_axis must be strictly increasing");
    }
  }
  if (!data.allFinite()) throw std::invalid_argument("spectrogram contains non-finite values");
  if (data.minCoeff() < 0.0f || data.maxCoeff() > 1.0f) {
    throw std::invalid_argument("spectrogram values outside [0,1]");
  }
}

Spectrogram make_spectrogram(Index doppler_bins, Index time_bins, double doppler_step_hz,
                             double time_step_s) {
  Spectrogram s;
  s.data = MatrixF::Zero(doppler_bins, time_bins);
  s.doppler_axis.resize(doppler_bins);
  for (Index f = 0; f < doppler_bins; ++f) {
    s.doppler_axis[f] = (static_cast<double>(f) - static_cast<double>(doppler_bins / 2)) *
                        doppler_step_hz;
  }
  s.time_axis.resize(time_bins);
  for (Index t = 0; t < time_bins; ++t) s.time_axis[t] = static_cast<double>(t) * time_step_s;
  return s;
}

namespace {
const std::array<std::string, kActivityCount> kActivityNames = {
    "sit-down", "stand-up", "sit-to-walk", "walk-to-sit", "walk-to-fall", "stand-from-floor"};
}

const std::string& activity_name(Activity a) {
  return kActivityNames.at(static_cast<std::size_t>(a));
}

Activity activity_from_name(const std::string& name) {
  for (int i = 0; i < kActivityCount; ++i) {
    if (kActivityNames[static_cast<std::size_t>(i)] == name) return static_cast<Activity>(i);
  }
  throw std::invalid_argument("unknown activity name: " + name);
}

Activity activity_from_id(int class_id) {
  if (class_id < 0 || class_id >= kActivityCount) {
    throw std::invalid_argument("activity class_id out of range: " + std::to_string(class_id));
  }
  return static_cast<Activity>(class_id);
}

double MotionComponent::center_hz(double t) const {
  const double span = t_end_s - t_start_s;
  const double u = span > 0.0 ? (t - t_start_s) / span : 0.0;
  return f_start_hz + (f_end_hz - f_start_hz) * u +
         osc_amp_hz * std::sin(2.0 * M_PI * osc_freq_hz * (t - t_start_s) + osc_phase_rad);
}

void MotionTemplate::validate() const {
  if (duration_s <= 0.0) throw std::invalid_argument("template duration must be positive");
  for (const auto& c : components) {
    if (c.amplitude <= 0.0 || c.amplitude > 1.0) {
      throw std::invalid_argument("component amplitude must lie in (0,1]");
    }
    if (!(c.t_start_s < c.t_end_s) || c.t_end_s > duration_s || c.t_start_s < 0.0) {
      throw std::invalid_argument("component support must satisfy 0 <= t0 < t1 <= duration");
    }
    if (c.doppler_spread_hz <= 0.0) {
      throw std::invalid_argument("component doppler spread must be positive");
    }
  }
}

void MeasuredRecording::validate() const {
  spectrogram.validate();
  const double dur = spectrogram.duration();
  const double eps = 1e-9;
  auto in_range = [&](double a, double b) { return a >= -eps && b <= dur + eps && a < b + eps; };
  for (const auto& iv : activity_intervals) {
    if (!in_range(iv.start_s, iv.end_s)) throw std::invalid_argument("activity interval out of range");
  }
  for (const auto& iv : idle_intervals) {
    if (!in_range(iv.start_s, iv.end_s)) throw std::invalid_argument("idle interval out of range");
  }
  // Pairwise disjointness over the union of both interval sets.
  std::vector<TimeInterval> all;
  for (const auto& iv : activity_intervals) all.push_back({iv.start_s, iv.end_s});
  for (const auto& iv : idle_intervals) all.push_back(iv);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const double lo = std::max(all[i].start_s, all[j].start_s);
      const double hi = std::min(all[i].end_s, all[j].end_s);
      if (hi - lo > eps) throw std::invalid_argument("recording intervals overlap");
    }
  }
}

namespace {
const std::array<std::string, 4> kPatchKindNames = {"extracted", "generated", "awgn", "mix"};
}

const std::string& patch_kind_name(PatchKind k) {
  return kPatchKindNames.at(static_cast<std::size_t>(k));
}

PatchKind patch_kind_from_name(const std::string& name) {
  for (std::size_t i = 0; i < kPatchKindNames.size(); ++i) {
    if (kPatchKindNames[i] == name) return static_cast<PatchKind>(i);
  }
  throw std::invalid_argument("unknown patch kind: " + name);
}

void NoisePatch::validate() const {
  if (data.rows() != kPatchRows || data.cols() != kPatchCols) {
    throw std::invalid_argument("noise patch must be exactly 100x28");
  }
  if (!data.allFinite()) throw std::invalid_argument("noise patch contains non-finite values");
  if (kind == PatchKind::Extracted && !origin.has_value()) {
    throw std::invalid_argument("extracted patch must record its origin");
  }
}

}  // namespace mds
