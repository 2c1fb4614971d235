#pragma once

#include <Eigen/Dense>

namespace evstar {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rotation as angle in [0, pi] plus unit axis.
struct AxisAngle {
  double angle = 0.0;
  Vec3 axis = Vec3::UnitX();
};

/// Pinhole camera, pixel units.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  Mat3 matrix() const;
};

bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Rodrigues formula; requires unit axis and angle in [0, pi].
Mat3 exp_rotation(double angle, const Vec3& axis);

/// Rodrigues formula for an arbitrary rotation vector (no magnitude restriction).
Mat3 rotation_from_rotvec(const Vec3& w);

/// Inverse of exp_rotation. angle = 0 reports axis (1,0,0); near pi the axis is
/// recovered from the dominant column of the symmetric part, which stays stable
/// where the skew part vanishes.
AxisAngle log_rotation(const Mat3& r);

Vec3 rotvec_of(const Mat3& r);

/// Geodesic angle between two rotations, radians. Computed through the
/// Frobenius chord 2*asin(|r1 - r2|_F / (2*sqrt(2))), clamped against rounding.
double angular_distance(const Mat3& r1, const Mat3& r2);
double angular_distance_deg(const Mat3& r1, const Mat3& r2);

/// Unit ray through pixel (x, y).
Vec3 backproject(const Vec2& pixel, const CameraIntrinsics& k);

/// Image-plane point of a camera-frame ray. Throws ProjectionError when the
/// ray has zero or negative depth.
Vec2 project(const Vec3& ray, const CameraIntrinsics& k);

/// Nearest rotation matrix in the Frobenius sense (SVD projection with a
/// determinant fix for reflections).
Mat3 project_to_rotation(const Mat3& m);

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace evstar
