#include "mds/extract.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mds {

void IdleDetectorConfig::validate() const {
  if (energy_percentile <= 0.0 || energy_percentile >= 100.0) {
    throw std::invalid_argument("energy percentile must lie in (0,100)");
  }
  if (exclusion_margin < 0) throw std::invalid_argument("exclusion margin must be >= 0");
}

namespace {

double time_step(const Spectrogram& s) {
  return s.time_axis.size() > 1 ? s.time_axis[1] - s.time_axis[0] : 1.0;
}

Index to_col(double t, double dt) { return static_cast<Index>(std::lround(t / dt)); }

}  // namespace

std::vector<TimeInterval> detect_idle(const MeasuredRecording& recording,
                                      const IdleDetectorConfig& cfg) {
  cfg.validate();
  const double dt = time_step(recording.spectrogram);
  const double margin_s = static_cast<double>(cfg.exclusion_margin) * dt;

  std::vector<TimeInterval> raw;
  if (cfg.use_ground_truth_intervals) {
    raw = recording.idle_intervals;
  } else {
    const MatrixF& d = recording.spectrogram.data;
    const Index t_bins = d.cols();
    VectorD energy(t_bins);
    for (Index t = 0; t < t_bins; ++t) energy[t] = d.col(t).cast<double>().squaredNorm();

    VectorD sorted = energy;
    std::sort(sorted.begin(), sorted.end());
    const double rank = cfg.energy_percentile / 100.0 * static_cast<double>(t_bins - 1);
    const auto lo = static_cast<Index>(std::floor(rank));
    const auto hi = std::min<Index>(lo + 1, t_bins - 1);
    const double threshold = sorted[lo] + (rank - std::floor(rank)) * (sorted[hi] - sorted[lo]);

    Index run_start = -1;
    for (Index t = 0; t <= t_bins; ++t) {
      const bool idle = t < t_bins && energy[t] <= threshold;
      if (idle && run_start < 0) run_start = t;
      if (!idle && run_start >= 0) {
        raw.push_back({static_cast<double>(run_start) * dt, static_cast<double>(t) * dt});
        run_start = -1;
      }
    }
  }

  std::vector<TimeInterval> out;
  for (const auto& iv : raw) {
    const TimeInterval shrunk{iv.start_s + margin_s, iv.end_s - margin_s};
    if (shrunk.length() > 0.0) out.push_back(shrunk);
  }
  return out;
}

std::vector<NoisePatch> extract_patches(const MeasuredRecording& recording,
                                        const std::vector<TimeInterval>& intervals,
                                        Index f_stride, Index t_stride) {
  if (f_stride < 1 || t_stride < 1) throw std::invalid_argument("strides must be >= 1");
  const Spectrogram& s = recording.spectrogram;
  const double dt = time_step(s);
  const Index f_bins = s.rows();
  const Index t_bins = s.cols();

  std::vector<NoisePatch> patches;
  for (const auto& iv : intervals) {
    const Index c0 = to_col(iv.start_s, dt);
    const Index c1 = to_col(iv.end_s, dt);
    if (c0 < 0 || c1 > t_bins) throw std::invalid_argument("interval outside recording bounds");
    const Index width = c1 - c0;
    if (width < kPatchCols || f_bins < kPatchRows) continue;
    for (Index f = 0; f + kPatchRows <= f_bins; f += f_stride) {
      for (Index t = 0; t + kPatchCols <= width; t += t_stride) {
        NoisePatch p;
        p.data = s.data.block(f, c0 + t, kPatchRows, kPatchCols);
        p.kind = PatchKind::Extracted;
        p.origin = PatchOrigin{recording.id, f, c0 + t};
        patches.push_back(std::move(p));
      }
    }
  }
  return patches;
}

}  // namespace mds
