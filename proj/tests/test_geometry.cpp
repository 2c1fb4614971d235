#include <doctest.h>

#include <cmath>

#include "evstar/errors.hpp"
#include "evstar/geometry.hpp"
#include "evstar/rng.hpp"

using namespace evstar;

namespace {

const CameraIntrinsics kCam{300.0, 320.0, 120.5, 89.5};

}  // namespace

TEST_CASE("intrinsics matrix layout") {
  const Mat3 k = kCam.matrix();
  CHECK(k(0, 0) == 300.0);
  CHECK(k(1, 1) == 320.0);
  CHECK(k(0, 2) == 120.5);
  CHECK(k(1, 2) == 89.5);
  CHECK(k(2, 2) == 1.0);
  CHECK(k(1, 0) == 0.0);
  CHECK(k(0, 1) == 0.0);
  CHECK(k(2, 0) == 0.0);
  CHECK(k(2, 1) == 0.0);
}

TEST_CASE("exp_rotation matches hand values") {
  // 90 degrees about z sends x to y.
  const Mat3 r = exp_rotation(kPi / 2.0, Vec3::UnitZ());
  CHECK((r * Vec3::UnitX() - Vec3::UnitY()).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(is_rotation(r));
  CHECK(exp_rotation(0.0, Vec3::UnitX()).isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("exp/log round trip across the angle range") {
  Rng rng(42);
  for (int i = 0; i < 200; ++i) {
    double angle;
    switch (i % 4) {
      case 0: angle = rng.uniform(0.0, kPi); break;
      case 1: angle = rng.uniform(0.0, 1e-6); break;          // near zero
      case 2: angle = kPi - rng.uniform(0.0, 1e-6); break;    // near pi
      default: angle = rng.uniform(0.1, kPi - 0.1); break;
    }
    const Vec3 axis = rng.unit_vector();
    const Mat3 r = exp_rotation(angle, axis);
    const AxisAngle back = log_rotation(r);
    CHECK(back.angle >= 0.0);
    CHECK(back.angle <= kPi + 1e-12);
    const Mat3 rebuilt = exp_rotation(back.angle, back.axis);
    CHECK((rebuilt - r).norm() < 1e-9);
  }
}

TEST_CASE("log of the identity reports zero angle and the fixed axis") {
  const AxisAngle aa = log_rotation(Mat3::Identity());
  CHECK(aa.angle == 0.0);
  CHECK(aa.axis == Vec3::UnitX());
}

TEST_CASE("rotation_from_rotvec agrees with exp_rotation and rotvec_of inverts it") {
  Rng rng(7);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w = rng.uniform(0.0, kPi) * rng.unit_vector();
    const Mat3 r = rotation_from_rotvec(w);
    CHECK((r - exp_rotation(w.norm(), Vec3(w.normalized()))).norm() < 1e-12);
    CHECK((rotvec_of(r) - w).norm() < 1e-9);
  }
  CHECK(rotation_from_rotvec(Vec3::Zero()).isApprox(Mat3::Identity(), 1e-15));
}

TEST_CASE("angular_distance identity, symmetry, left-invariance, hand value") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Mat3 a = rng.rotation_with_angle(rng.uniform(0.0, kPi - 0.01));
    const Mat3 b = rng.rotation_with_angle(rng.uniform(0.0, kPi - 0.01));
    const Mat3 q = rng.rotation_with_angle(rng.uniform(0.0, kPi - 0.01));
    CHECK(angular_distance(a, a) < 1e-9);
    CHECK(std::abs(angular_distance(a, b) - angular_distance(b, a)) < 1e-9);
    CHECK(std::abs(angular_distance(q * a, q * b) - angular_distance(a, b)) < 1e-9);
  }
  const Mat3 r10 = exp_rotation(deg_to_rad(10.0), Vec3::UnitZ());
  CHECK(angular_distance_deg(Mat3::Identity(), r10) == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("backproject and project round trip") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec2 pixel(rng.uniform(0.0, 240.0), rng.uniform(0.0, 180.0));
    const Vec3 ray = backproject(pixel, kCam);
    CHECK(ray.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ray.z() > 0.0);
    const Vec2 back = project(ray, kCam);
    CHECK((back - pixel).norm() < 1e-9);
  }
  // The principal point backprojects to the optical axis.
  const Vec3 axis = backproject(Vec2(kCam.cx, kCam.cy), kCam);
  CHECK((axis - Vec3::UnitZ()).norm() < 1e-12);
}

TEST_CASE("project rejects rays without positive depth") {
  CHECK_THROWS_AS(project(Vec3(0, 0, -1), kCam), ProjectionError);
  CHECK_THROWS_AS(project(Vec3(1, 0, 0), kCam), ProjectionError);
}

TEST_CASE("is_rotation and project_to_rotation") {
  Rng rng(19);
  const Mat3 r = rng.rotation_with_angle(1.0);
  CHECK(is_rotation(r));
  CHECK_FALSE(is_rotation(Mat3(2.0 * r)));
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_FALSE(is_rotation(reflection));

  // Exact rotations are fixed points of the projection.
  CHECK((project_to_rotation(r) - r).norm() < 1e-12);
  // Perturbed rotations project back to a rotation close to the original.
  Mat3 noisy = r;
  noisy(0, 1) += 1e-3;
  const Mat3 projected = project_to_rotation(noisy);
  CHECK(is_rotation(projected));
  CHECK(angular_distance(projected, r) < 1e-2);
  // Reflections are mapped to rotations (determinant fix).
  CHECK(is_rotation(project_to_rotation(reflection)));
}

TEST_CASE("degree/radian conversions invert each other") {
  CHECK(deg_to_rad(180.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(rad_to_deg(deg_to_rad(33.25)) == doctest::Approx(33.25).epsilon(1e-15));
}
