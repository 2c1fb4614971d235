#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "evstar/geometry.hpp"
#include "evstar/star_simulator.hpp"

using namespace evstar;

namespace {

const CameraIntrinsics kCam{300.0, 300.0, 120.0, 90.0};
const SensorSize kSensor{240, 180};

bool same_events(const std::vector<Event>& a, const std::vector<Event>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].t_us != b[i].t_us || a[i].x != b[i].x || a[i].y != b[i].y ||
        a[i].polarity != b[i].polarity)
      return false;
  return true;
}

}  // namespace

TEST_CASE("constant-rate profiles integrate to the expected rotations") {
  const Vec3 omega = deg_to_rad(4.0) * Vec3::UnitY();
  const MotionProfile profile = MotionProfile::constant(2'000'000, omega);
  CHECK(profile.total_duration_us() == 2'000'000);
  CHECK((profile.attitude_at(0) - Mat3::Identity()).norm() < 1e-15);
  CHECK(angular_distance(profile.attitude_at(500'000),
                         exp_rotation(deg_to_rad(2.0), Vec3::UnitY())) < 1e-12);
  // Beyond the profile the attitude clamps to its final value.
  CHECK(angular_distance(profile.attitude_at(9'000'000), profile.attitude_at(2'000'000)) <
        1e-15);
  CHECK(angular_distance(profile.attitude_at(-5), Mat3::Identity()) < 1e-15);
  CHECK_THROWS_AS(MotionProfile::constant(0, omega), std::invalid_argument);
}

TEST_CASE("segments compose left-to-right in time") {
  const Vec3 w1 = deg_to_rad(10.0) * Vec3::UnitZ();
  const Vec3 w2 = deg_to_rad(6.0) * Vec3::UnitX();
  MotionProfile profile;
  profile.segments.push_back(MotionSegment{1'000'000, w1});
  profile.segments.push_back(MotionSegment{1'000'000, w2});
  // Half a second into the second segment: later rotation applied on the left.
  const Mat3 expected = rotation_from_rotvec(0.5 * w2) * rotation_from_rotvec(1.0 * w1);
  CHECK(angular_distance(profile.attitude_at(1'500'000), expected) < 1e-12);
}

TEST_CASE("ground truth exposes the window estimators' target map") {
  const MotionProfile profile =
      MotionProfile::constant(1'000'000, deg_to_rad(4.0) * Vec3::UnitY());
  GroundTruth gt;
  gt.profile = profile;
  CHECK((gt.relative(300'000, 300'000) - Mat3::Identity()).norm() < 1e-15);
  CHECK(angular_distance(gt.relative(0, 700'000),
                         profile.attitude_at(700'000).transpose()) < 1e-12);
  // relative(alpha, beta) maps rays seen at beta to rays seen at alpha.
  const Vec3 dir = Vec3(0.1, -0.05, 1.0).normalized();
  const Vec3 seen_alpha = profile.attitude_at(200'000) * dir;
  const Vec3 seen_beta = profile.attitude_at(600'000) * dir;
  CHECK((gt.relative(200'000, 600'000) * seen_beta - seen_alpha).norm() < 1e-12);
}

TEST_CASE("scenes sample the field-of-view cap with ordered brightness") {
  const StarScene scene = generate_scene(200, 30.0, {0.25, 2.5}, 5, kCam, kSensor);
  REQUIRE(scene.stars.size() == 200);
  const double cos_half = std::cos(deg_to_rad(15.0));
  for (const Star& star : scene.stars) {
    CHECK(star.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(star.direction.z() >= cos_half - 1e-12);
    CHECK(star.brightness >= 0.25);
    CHECK(star.brightness <= 2.5);
  }
  const StarScene again = generate_scene(200, 30.0, {0.25, 2.5}, 5, kCam, kSensor);
  CHECK((again.stars[77].direction - scene.stars[77].direction).norm() == 0.0);
  const StarScene other = generate_scene(200, 30.0, {0.25, 2.5}, 6, kCam, kSensor);
  CHECK((other.stars[0].direction - scene.stars[0].direction).norm() > 0.0);

  CHECK_THROWS_AS(generate_scene(0, 30.0, {0.5, 1.0}, 5, kCam, kSensor),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(5, 180.0, {0.5, 1.0}, 5, kCam, kSensor),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(5, 30.0, {1.0, 0.5}, 5, kCam, kSensor),
                  std::invalid_argument);
}

TEST_CASE("event streams are deterministic, sorted, in-sensor and in-window") {
  const StarScene scene = generate_scene(10, 25.0, {0.5, 1.0}, 21, kCam, kSensor);
  const MotionProfile profile =
      MotionProfile::constant(2'000'000, deg_to_rad(4.0) * Vec3::UnitY());
  SimParams params;
  params.duration_s = 2.0;
  params.event_rate_per_star_hz = 500.0;
  const SimOutput a = generate_events(scene, profile, params, 100);
  const SimOutput b = generate_events(scene, profile, params, 100);
  const SimOutput c = generate_events(scene, profile, params, 101);
  CHECK(same_events(a.events, b.events));
  CHECK_FALSE(same_events(a.events, c.events));
  REQUIRE(!a.events.empty());
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    const Event& e = a.events[i];
    if (i > 0) CHECK(e.t_us >= a.events[i - 1].t_us);
    CHECK(e.t_us >= 0);
    CHECK(e.t_us < 2'000'000);
    CHECK(e.x >= 0.0);
    CHECK(e.x < 240.0);
    CHECK(e.y >= 0.0);
    CHECK(e.y < 180.0);
    CHECK((e.polarity == 1 || e.polarity == -1));
  }
}

TEST_CASE("the outlier fraction of the stream matches the request") {
  const StarScene scene = generate_scene(10, 25.0, {0.5, 1.0}, 22, kCam, kSensor);
  const MotionProfile profile = MotionProfile::constant(1'000'000, Vec3::Zero());
  SimParams params;
  params.duration_s = 1.0;
  params.event_rate_per_star_hz = 1000.0;
  params.outlier_ratio = 0.05;
  const SimOutput out = generate_events(scene, profile, params, 9);
  REQUIRE(out.n_signal > 5000);
  CHECK(out.n_signal + out.n_outliers == static_cast<std::int64_t>(out.events.size()));
  const double ratio = static_cast<double>(out.n_outliers) /
                       static_cast<double>(out.events.size());
  CHECK(ratio == doctest::Approx(0.05).epsilon(0.02));

  SimParams clean = params;
  clean.outlier_ratio = 0.0;
  CHECK(generate_events(scene, profile, clean, 9).n_outliers == 0);
}

TEST_CASE("ground-truth samples cover the stream on the requested grid") {
  const StarScene scene = generate_scene(3, 25.0, {0.5, 1.0}, 1, kCam, kSensor);
  const MotionProfile profile = MotionProfile::constant(1'000'000, Vec3::Zero());
  SimParams params;
  params.duration_s = 1.0;
  params.event_rate_per_star_hz = 100.0;
  params.gt_dt_us = 50'000;
  const SimOutput out = generate_events(scene, profile, params, 2);
  REQUIRE(out.gt.sample_times_us.size() == 21);
  CHECK(out.gt.sample_times_us.front() == 0);
  CHECK(out.gt.sample_times_us.back() == 1'000'000);
  CHECK(out.gt.dt_us == 50'000);
}

TEST_CASE("event generation validates its parameters") {
  const StarScene scene = generate_scene(3, 25.0, {0.5, 1.0}, 1, kCam, kSensor);
  const MotionProfile profile = MotionProfile::constant(1'000'000, Vec3::Zero());
  SimParams params;
  params.duration_s = 1.0;
  SimParams bad = params;
  bad.duration_s = 0.0;
  CHECK_THROWS_AS(generate_events(scene, profile, bad, 1), std::invalid_argument);
  bad = params;
  bad.event_rate_per_star_hz = -1.0;
  CHECK_THROWS_AS(generate_events(scene, profile, bad, 1), std::invalid_argument);
  bad = params;
  bad.outlier_ratio = 1.0;
  CHECK_THROWS_AS(generate_events(scene, profile, bad, 1), std::invalid_argument);
  bad = params;
  bad.gt_dt_us = 0;
  CHECK_THROWS_AS(generate_events(scene, profile, bad, 1), std::invalid_argument);
  StarScene empty = scene;
  empty.stars.clear();
  CHECK_THROWS_AS(generate_events(empty, profile, params, 1), std::invalid_argument);
}
