#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mds {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using MatrixF = Matrix2<float>;
using MatrixD = Matrix2<double>;
using VectorF = Eigen::VectorXf;
using VectorD = Eigen::VectorXd;

/// Noise patch window shared by the extractor, the generator and the denoisers.
inline constexpr Index kPatchRows = 100;
inline constexpr Index kPatchCols = 28;

/// dB window used when magnitudes were mapped to the normalized [0,1] scale.
struct ScaleMeta {
  double db_floor = -60.0;
  double db_ceiling = 0.0;
};

/// 2D time-frequency magnitude field in normalized units [0,1].
/// Rows are Doppler bins (axis strictly increasing), columns are time bins.
struct Spectrogram {
  MatrixF data;
  VectorD doppler_axis;  // Hz per Doppler bin, size == data.rows()
  VectorD time_axis;     // seconds per time bin, size == data.cols()
  ScaleMeta scale;

  Index rows() const { return data.rows(); }
  Index cols() const { return data.cols(); }
  double duration() const;

  /// Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;
};

/// Uniformly sampled axes: Doppler bins centered on 0 Hz, time bins starting at 0 s.
Spectrogram make_spectrogram(Index doppler_bins, Index time_bins,
                             double doppler_step_hz = 1.0, double time_step_s = 0.025);

enum class Activity : int {
  SitDown = 0,
  StandUp = 1,
  SitToWalk = 2,
  WalkToSit = 3,
  WalkToFall = 4,
  StandFromFloor = 5,
};

inline constexpr int kActivityCount = 6;

const std::string& activity_name(Activity a);
Activity activity_from_name(const std::string& name);
Activity activity_from_id(int class_id);

/// One body-part contribution: a Gaussian Doppler ridge whose center follows
/// a linear ramp plus a sinusoid over its time support.
struct MotionComponent {
  double amplitude = 1.0;         // in (0,1]
  double f_start_hz = 0.0;        // ridge center at t_start
  double f_end_hz = 0.0;          // ridge center at t_end
  double osc_amp_hz = 0.0;        // sinusoidal excursion around the ramp
  double osc_freq_hz = 0.0;       // cycles per second
  double osc_phase_rad = 0.0;
  double doppler_spread_hz = 2.0; // Gaussian sigma of the ridge
  double t_start_s = 0.0;
  double t_end_s = 0.0;

  /// Ridge center frequency at time t (valid inside [t_start_s, t_end_s]).
  double center_hz(double t) const;
};

struct MotionTemplate {
  std::vector<MotionComponent> components;
  double duration_s = 0.0;

  void validate() const;
};

struct TimeInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  double length() const { return end_s - start_s; }
};

struct ActivityInterval {
  double start_s = 0.0;
  double end_s = 0.0;
  Activity label = Activity::SitDown;
};

/// Stand-in for a field capture: activity segments separated by idle segments,
/// with environmental noise over the whole duration.
struct MeasuredRecording {
  Spectrogram spectrogram;
  std::vector<ActivityInterval> activity_intervals;
  std::vector<TimeInterval> idle_intervals;
  std::uint64_t seed = 0;
  int id = 0;

  void validate() const;
};

enum class PatchKind { Extracted, Generated, Awgn, Mix };

const std::string& patch_kind_name(PatchKind k);
PatchKind patch_kind_from_name(const std::string& name);

struct PatchOrigin {
  int recording_id = 0;
  Index f_offset = 0;
  Index t_offset = 0;
};

/// Fixed-size (kPatchRows x kPatchCols) noise field, extracted or synthesized.
struct NoisePatch {
  MatrixF data;
  PatchKind kind = PatchKind::Extracted;
  std::optional<PatchOrigin> origin;

  void validate() const;
};

}  // namespace mds
