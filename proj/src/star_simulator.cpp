#include "evstar/star_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evstar/rng.hpp"

namespace evstar {

std::int64_t MotionProfile::total_duration_us() const {
  std::int64_t total = 0;
  for (const MotionSegment& seg : segments) total += seg.duration_us;
  return total;
}

Mat3 MotionProfile::attitude_at(std::int64_t t_us) const {
  Mat3 r = Mat3::Identity();
  std::int64_t remaining = std::max<std::int64_t>(t_us, 0);
  for (const MotionSegment& seg : segments) {
    const std::int64_t dt = std::min(remaining, seg.duration_us);
    if (dt > 0) {
      const double dt_s = static_cast<double>(dt) * 1e-6;
      r = rotation_from_rotvec(dt_s * seg.omega_rad_s) * r;
    }
    remaining -= dt;
    if (remaining <= 0) break;
  }
  return r;
}

MotionProfile MotionProfile::constant(std::int64_t duration_us, const Vec3& omega_rad_s) {
  if (duration_us <= 0) throw std::invalid_argument("segment duration must be positive");
  MotionProfile profile;
  profile.segments.push_back(MotionSegment{duration_us, omega_rad_s});
  return profile;
}

Mat3 GroundTruth::relative(std::int64_t alpha_us, std::int64_t beta_us) const {
  return profile.attitude_at(alpha_us) * profile.attitude_at(beta_us).transpose();
}

StarScene generate_scene(int n_stars, double fov_deg,
                         std::pair<double, double> brightness_range,
                         std::uint64_t seed, const CameraIntrinsics& intrinsics,
                         const SensorSize& sensor) {
  if (n_stars < 1) throw std::invalid_argument("need at least one star");
  if (!(fov_deg > 0.0) || fov_deg > 90.0)
    throw std::invalid_argument("fov_deg must be in (0, 90]");
  if (!(brightness_range.first > 0.0) || brightness_range.second < brightness_range.first)
    throw std::invalid_argument("brightness range must be positive and ordered");

  Rng rng(seed);
  StarScene scene;
  scene.intrinsics = intrinsics;
  scene.sensor = sensor;
  scene.stars.reserve(static_cast<std::size_t>(n_stars));
  const double half_angle = deg_to_rad(fov_deg) / 2.0;
  for (int i = 0; i < n_stars; ++i) {
    Star star;
    star.direction = rng.cap_vector(half_angle);
    star.brightness = rng.uniform(brightness_range.first, brightness_range.second);
    scene.stars.push_back(star);
  }
  return scene;
}

namespace {

bool in_sensor(const Vec2& p, const SensorSize& sensor) {
  return p.x() >= 0.0 && p.x() < static_cast<double>(sensor.width) &&
         p.y() >= 0.0 && p.y() < static_cast<double>(sensor.height);
}

}  // namespace

SimOutput generate_events(const StarScene& scene, const MotionProfile& profile,
                          const SimParams& params, std::uint64_t seed) {
  if (!(params.duration_s > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(params.event_rate_per_star_hz > 0.0))
    throw std::invalid_argument("event rate must be positive");
  if (params.outlier_ratio < 0.0 || params.outlier_ratio >= 1.0)
    throw std::invalid_argument("outlier_ratio must be in [0, 1)");
  if (params.gt_dt_us <= 0) throw std::invalid_argument("gt_dt_us must be positive");
  if (scene.stars.empty()) throw std::invalid_argument("scene has no stars");

  const auto duration_us = static_cast<std::int64_t>(std::llround(params.duration_s * 1e6));
  Rng rng(seed);
  SimOutput out;

  for (const Star& star : scene.stars) {
    double t_s = 0.0;
    int polarity = 1;
    while (true) {
      t_s += rng.exponential(params.event_rate_per_star_hz);
      if (t_s >= params.duration_s) break;
      const auto t_us = static_cast<std::int64_t>(std::llround(t_s * 1e6));
      if (t_us >= duration_us) break;
      const Vec3 ray = profile.attitude_at(t_us) * star.direction;
      if (!(ray.z() > 0.0)) continue;  // star behind the camera: no event
      const Vec2 pixel = project(ray, scene.intrinsics);
      if (!in_sensor(pixel, scene.sensor)) continue;  // star outside the sensor
      const Vec2 noisy = pixel + params.pixel_noise_sigma * Vec2(rng.gaussian(), rng.gaussian());
      if (!in_sensor(noisy, scene.sensor)) continue;
      out.events.push_back(Event{t_us, noisy.x(), noisy.y(), polarity});
      polarity = -polarity;
      ++out.n_signal;
    }
  }

  const auto n_outliers = static_cast<std::int64_t>(std::llround(
      params.outlier_ratio / (1.0 - params.outlier_ratio) *
      static_cast<double>(out.n_signal)));
  for (std::int64_t i = 0; i < n_outliers; ++i) {
    Event e;
    e.t_us = static_cast<std::int64_t>(rng.uniform_index(static_cast<std::uint64_t>(duration_us)));
    e.x = rng.uniform(0.0, static_cast<double>(scene.sensor.width));
    e.y = rng.uniform(0.0, static_cast<double>(scene.sensor.height));
    e.polarity = rng.uniform_index(2) == 0 ? 1 : -1;
    out.events.push_back(e);
  }
  out.n_outliers = n_outliers;

  std::stable_sort(out.events.begin(), out.events.end(),
                   [](const Event& a, const Event& b) { return a.t_us < b.t_us; });

  out.gt.profile = profile;
  out.gt.dt_us = params.gt_dt_us;
  for (std::int64_t t = 0; t <= duration_us; t += params.gt_dt_us)
    out.gt.sample_times_us.push_back(t);
  return out;
}

}  // namespace evstar
