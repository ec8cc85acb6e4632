#pragma once

#include <vector>

#include "mds/types.hpp"

namespace mds {

struct IdleDetectorConfig {
  double energy_percentile = 30.0;   // in (0,100)
  Index exclusion_margin = 0;        // time bins shaved off each interval end
  bool use_ground_truth_intervals = true;

  void validate() const;
};

/// Idle-period detection. Ground-truth mode returns the recording's stored
/// intervals shrunk by the margin; energy mode returns maximal runs of columns
/// whose total energy is at or below the percentile threshold.
std::vector<TimeInterval> detect_idle(const MeasuredRecording& recording,
                                      const IdleDetectorConfig& cfg);

/// Slides the (100, 28) window over every interval with the given stride and
/// copies out the covered sub-rectangles. Patches are ordered by
/// (interval index, f-offset, t-offset).
std::vector<NoisePatch> extract_patches(const MeasuredRecording& recording,
                                        const std::vector<TimeInterval>& intervals,
                                        Index f_stride = 14, Index t_stride = 14);

}  // namespace mds
