#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evstar/events.hpp"
#include "evstar/geometry.hpp"

namespace evstar {

struct Star {
  Vec3 direction = Vec3::UnitZ();  // unit vector, inertial frame
  double brightness = 1.0;         // carried as metadata; does not modulate rates
};

struct StarScene {
  std::vector<Star> stars;
  CameraIntrinsics intrinsics;
  SensorSize sensor;
};

/// Piecewise-constant angular velocity. The attitude R*(t) maps inertial
/// directions into the camera frame, starts at the identity, and is the
/// left-composition of per-segment exponentials:
///   R*(t) = exp(rotvec((t - t_k) * omega_k)) * R*(t_k).
struct MotionSegment {
  std::int64_t duration_us = 0;
  Vec3 omega_rad_s = Vec3::Zero();
};

struct MotionProfile {
  std::vector<MotionSegment> segments;

  std::int64_t total_duration_us() const;
  /// Attitude at t (clamped to [0, total duration]).
  Mat3 attitude_at(std::int64_t t_us) const;

  /// Single segment covering the whole duration.
  static MotionProfile constant(std::int64_t duration_us, const Vec3& omega_rad_s);
};

/// Exact attitude source plus the sample grid emitted alongside event files.
struct GroundTruth {
  MotionProfile profile;
  std::int64_t dt_us = 50'000;
  std::vector<std::int64_t> sample_times_us;

  Mat3 attitude_at(std::int64_t t_us) const { return profile.attitude_at(t_us); }
  /// Relative rotation R*(alpha) * R*(beta)^T — the map the window estimators recover.
  Mat3 relative(std::int64_t alpha_us, std::int64_t beta_us) const;
};

/// Stars sampled uniformly on the spherical cap of half-angle fov_deg/2 about
/// the optical axis (+z at t = 0); brightness uniform in the given range.
StarScene generate_scene(int n_stars, double fov_deg,
                         std::pair<double, double> brightness_range,
                         std::uint64_t seed, const CameraIntrinsics& intrinsics,
                         const SensorSize& sensor);

struct SimParams {
  double duration_s = 45.0;
  double event_rate_per_star_hz = 200.0;
  double pixel_noise_sigma = 0.5;  // pixels
  double outlier_ratio = 0.05;     // fraction of the final stream that is noise
  std::int64_t gt_dt_us = 50'000;
};

struct SimOutput {
  std::vector<Event> events;  // sorted by time
  GroundTruth gt;
  std::int64_t n_signal = 0;
  std::int64_t n_outliers = 0;
};

/// Per star, a Poisson event process at the given rate while the star projects
/// in-sensor; pixel positions get Gaussian noise, polarities alternate per
/// star. Outliers are injected uniformly over sensor x time so that they make
/// up outlier_ratio of the stream. Deterministic per seed.
SimOutput generate_events(const StarScene& scene, const MotionProfile& profile,
                          const SimParams& params, std::uint64_t seed);

}  // namespace evstar
