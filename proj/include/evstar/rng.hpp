#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "evstar/geometry.hpp"

namespace evstar {

/// Deterministic random source: a fixed engine plus fixed transform algorithms,
/// so identical seeds give identical byte streams regardless of how the
/// standard library implements its distribution objects.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(expand_seed(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling keeps the result unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return draw % n;
  }

  /// Exponential with the given rate via inverse CDF.
  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  /// Standard normal via Box-Muller (pairs cached).
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Unit vector uniform on the sphere.
  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(s * std::cos(phi), s * std::sin(phi), z);
  }

  /// Uniform on the spherical cap of the given half-angle about +z.
  Vec3 cap_vector(double half_angle_rad) {
    const double z = uniform(std::cos(half_angle_rad), 1.0);
    const double phi = uniform(0.0, 2.0 * kPi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec3(s * std::cos(phi), s * std::sin(phi), z);
  }

  /// Random rotation with the given angle about a uniform random axis.
  Mat3 rotation_with_angle(double angle_rad) {
    return rotation_from_rotvec(angle_rad * unit_vector());
  }

 private:
  // splitmix64 expansion decorrelates small consecutive seeds.
  static std::uint64_t expand_seed(std::uint64_t seed) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace evstar
