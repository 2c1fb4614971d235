#include "evstar/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evstar/errors.hpp"

namespace evstar {

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).norm() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

static Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return s;
}

Mat3 exp_rotation(double angle, const Vec3& axis) {
  if (angle < 0.0 || angle > kPi + 1e-12)
    throw std::invalid_argument("exp_rotation: angle outside [0, pi]");
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("exp_rotation: axis is not unit length");
  const Mat3 k = skew(axis);
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

Mat3 rotation_from_rotvec(const Vec3& w) {
  const double theta = w.norm();
  if (theta < 1e-12) {
    // Second-order series keeps the result orthonormal to machine precision.
    const Mat3 k = skew(w);
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const Mat3 k = skew(w / theta);
  return Mat3::Identity() + std::sin(theta) * k + (1.0 - std::cos(theta)) * k * k;
}

AxisAngle log_rotation(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(c);
  Vec3 v(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));  // 2 sin(angle) * axis

  AxisAngle out;
  out.angle = angle;
  const double vn = v.norm();
  if (angle < 1e-7) {
    out.axis = vn > 1e-300 ? Vec3(v / vn) : Vec3::UnitX();
    if (angle == 0.0) out.axis = Vec3::UnitX();
    return out;
  }
  if (angle < kPi - 1e-4) {
    out.axis = v / vn;
    return out;
  }
  // Near pi the skew part degenerates; (r + r^T)/2 = c*I + (1-c)*a*a^T exposes
  // the axis through its dominant column.
  const Mat3 m = ((r + r.transpose()) * 0.5 - c * Mat3::Identity()) / (1.0 - c);
  int col = 0;
  m.diagonal().maxCoeff(&col);
  Vec3 a = m.col(col);
  a.normalize();
  if (vn > 1e-9) {
    if (v.dot(a) < 0.0) a = -a;
  } else {
    // Exactly pi: sign is arbitrary, pick a canonical one.
    int imax = 0;
    a.cwiseAbs().maxCoeff(&imax);
    if (a(imax) < 0.0) a = -a;
  }
  out.axis = a;
  return out;
}

Vec3 rotvec_of(const Mat3& r) {
  const AxisAngle aa = log_rotation(r);
  return aa.angle * aa.axis;
}

double angular_distance(const Mat3& r1, const Mat3& r2) {
  const double chord = (r1 - r2).norm() / (2.0 * std::sqrt(2.0));
  return 2.0 * std::asin(std::clamp(chord, 0.0, 1.0));
}

double angular_distance_deg(const Mat3& r1, const Mat3& r2) {
  return rad_to_deg(angular_distance(r1, r2));
}

Vec3 backproject(const Vec2& pixel, const CameraIntrinsics& k) {
  Vec3 ray((pixel.x() - k.cx) / k.fx, (pixel.y() - k.cy) / k.fy, 1.0);
  ray.normalize();
  return ray;
}

Vec2 project(const Vec3& ray, const CameraIntrinsics& k) {
  if (ray.z() <= 0.0) throw ProjectionError("project: ray has non-positive depth");
  return Vec2(k.fx * ray.x() / ray.z() + k.cx, k.fy * ray.y() / ray.z() + k.cy);
}

Mat3 project_to_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

}  // namespace evstar
