#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "evstar/geometry.hpp"
#include "evstar/motion_compensation.hpp"
#include "evstar/star_simulator.hpp"

using namespace evstar;

namespace {

const CameraIntrinsics kCam{300.0, 300.0, 120.0, 90.0};
const SensorSize kSensor{240, 180};

EventChunk clean_rotating_chunk(double omega_deg_s, std::uint64_t seed, double rate) {
  StarScene scene = generate_scene(10, 30.0, {0.5, 1.0}, seed, kCam, kSensor);
  MotionProfile profile = MotionProfile::constant(100000, deg_to_rad(omega_deg_s) * Vec3(0, 1, 0));
  SimParams sp;
  sp.duration_s = 0.1;
  sp.event_rate_per_star_hz = rate;
  sp.pixel_noise_sigma = 0.0;
  sp.outlier_ratio = 0.0;
  const SimOutput sim = generate_events(scene, profile, sp, seed + 1);
  EventChunk chunk;
  chunk.window = TimeWindow{0, 100000};
  chunk.sensor = kSensor;
  chunk.events = sim.events;
  return chunk;
}

}  // namespace

TEST_CASE("warping leaves events at the window start untouched") {
  WarpParams params;
  params.window = TimeWindow{0, 100000};
  params.angle = deg_to_rad(30.0);
  params.axis = Vec3::UnitY();
  const Event e{0, 37.5, 112.25, 1};
  const auto p = warp_event(e, params, kCam);
  REQUIRE(p.has_value());
  CHECK((*p - Vec2(37.5, 112.25)).norm() < 1e-9);
}

TEST_CASE("zero-angle warp is the identity for every event") {
  WarpParams params;
  params.window = TimeWindow{0, 50000};
  const Event e{30000, 200.0, 40.0, -1};
  const auto p = warp_event(e, params, kCam);
  REQUIRE(p.has_value());
  CHECK((*p - Vec2(200.0, 40.0)).norm() < 1e-9);
}

TEST_CASE("a full-window event is warped by the whole rotation") {
  WarpParams params;
  params.window = TimeWindow{0, 100000};
  params.angle = deg_to_rad(2.0);
  params.axis = Vec3::UnitZ();
  const Event e{100000, 150.0, 60.0, 1};
  const auto p = warp_event(e, params, kCam);
  REQUIRE(p.has_value());
  const Vec2 expected =
      project(exp_rotation(params.angle, params.axis) * backproject(Vec2(150.0, 60.0), kCam), kCam);
  CHECK((*p - expected).norm() < 1e-9);
}

TEST_CASE("warps that push the ray behind the camera return nothing") {
  WarpParams params;
  params.window = TimeWindow{0, 100000};
  params.angle = kPi;
  params.axis = Vec3::UnitX();
  const Event e{100000, 120.0, 90.0, 1};  // optical axis flipped by 180 degrees
  CHECK_FALSE(warp_event(e, params, kCam).has_value());
}

TEST_CASE("variance ignores constant offsets and matches a hand value") {
  CompensatedImage image;
  image.h = Eigen::MatrixXd::Zero(2, 2);
  image.h << 0.0, 1.0, 1.0, 0.0;
  CHECK(variance_contrast(image) == doctest::Approx(0.25).epsilon(1e-12));

  CompensatedImage shifted = image;
  shifted.h.array() += 7.5;
  CHECK(variance_contrast(shifted) == doctest::Approx(variance_contrast(image)).epsilon(1e-12));
}

TEST_CASE("polarity-weighted accumulation cancels alternating events") {
  EventChunk chunk;
  chunk.window = TimeWindow{0, 1000};
  chunk.sensor = SensorSize{60, 60};
  for (int i = 0; i < 10; ++i) chunk.events.push_back(Event{i * 100, 30.0, 30.0, i % 2 ? -1 : 1});
  WarpParams params;
  params.window = chunk.window;
  const CompensatedImage signed_image = render_h_image(chunk, params, kCam, 1.0, true);
  const CompensatedImage unsigned_image = render_h_image(chunk, params, kCam, 1.0, false);
  CHECK(variance_contrast(signed_image) < 1e-12);
  CHECK(variance_contrast(unsigned_image) > 1e-3);
}

TEST_CASE("true warp sharpens a moving star field") {
  const EventChunk chunk = clean_rotating_chunk(8.0, 31, 300);
  WarpParams still;
  still.window = chunk.window;
  WarpParams truth = still;
  truth.angle = deg_to_rad(0.8);  // 8 deg/s for 100 ms
  truth.axis = Vec3::UnitY();
  const double var_still = variance_contrast(render_h_image(chunk, still, kCam, 1.0, false));
  const double var_truth = variance_contrast(render_h_image(chunk, truth, kCam, 1.0, false));
  CHECK(var_truth > var_still);
}

TEST_CASE("contrast maximisation stays at zero for a static scene") {
  const EventChunk chunk = clean_rotating_chunk(0.0, 47, 300);
  const CmResult res = cm_estimate(chunk, kCam);
  CHECK(res.rotvec.norm() < deg_to_rad(0.05));
  CHECK(angular_distance_deg(res.rel.r, Mat3::Identity()) < 0.05);
}

TEST_CASE("contrast maximisation recovers a known rotation") {
  const EventChunk chunk = clean_rotating_chunk(4.0, 53, 500);
  const CmResult res = cm_estimate(chunk, kCam);
  const Mat3 truth = exp_rotation(deg_to_rad(0.4), Vec3::UnitY());
  CHECK(angular_distance_deg(res.rel.r, truth) < 0.1);
  CHECK(res.iterations > 0);
  CHECK((res.rel.r - rotation_from_rotvec(res.rotvec)).norm() < 1e-12);
  // Accepted line-search steps never decrease the objective.
  for (std::size_t i = 1; i < res.objective_history.size(); ++i)
    CHECK(res.objective_history[i] >= res.objective_history[i - 1] - 1e-12);
  CHECK(res.rel.window.beta_us == chunk.window.beta_us);
}

TEST_CASE("16-bit image files carry the PGM header and scaling sidecar") {
  CompensatedImage image;
  image.h = Eigen::MatrixXd::Zero(4, 6);
  image.h(1, 2) = 2.5;
  image.h(3, 5) = -1.0;
  const auto dir = std::filesystem::temp_directory_path();
  const std::string pgm = (dir / "evstar_test_image.pgm").string();
  const std::string sidecar = (dir / "evstar_test_image.txt").string();
  write_pgm16(pgm, sidecar, image);

  std::ifstream in(pgm, std::ios::binary);
  REQUIRE(in.good());
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == 6);
  CHECK(h == 4);
  CHECK(maxval == 65535);

  std::ifstream side(sidecar);
  REQUIRE(side.good());
  std::string text((std::istreambuf_iterator<char>(side)), std::istreambuf_iterator<char>());
  CHECK(text.find("min") != std::string::npos);
  CHECK(text.find("max") != std::string::npos);
  std::filesystem::remove(pgm);
  std::filesystem::remove(sidecar);
}
