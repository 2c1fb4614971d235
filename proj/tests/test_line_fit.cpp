#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "evstar/line_fit.hpp"
#include "evstar/rng.hpp"

using namespace evstar;

namespace {

// Independent batch oracle: mean by plain summation, principal direction and
// singular values from Eigen's own symmetric eigen-solver over the scatter.
struct BatchFit {
  Vec3 mean = Vec3::Zero();
  Vec3 direction = Vec3::UnitX();
  Vec3 singular_values = Vec3::Zero();
  Mat3 scatter = Mat3::Zero();
};

BatchFit batch_fit(const std::vector<Vec3>& points) {
  BatchFit fit;
  for (const Vec3& p : points) fit.mean += p;
  fit.mean /= static_cast<double>(points.size());
  for (const Vec3& p : points) {
    const Vec3 d = p - fit.mean;
    fit.scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(fit.scatter);
  fit.direction = eig.eigenvectors().col(2);  // Eigen orders ascending
  for (int i = 0; i < 3; ++i)
    fit.singular_values[i] = std::sqrt(std::max(0.0, eig.eigenvalues()[2 - i]));
  return fit;
}

double direction_angle(const Vec3& a, const Vec3& b) {
  const double c = std::min(1.0, std::abs(a.normalized().dot(b.normalized())));
  return std::acos(c);
}

// Point stream mixing a dominant line with isotropic noise (and a few pure
// noise points), the shape the accumulator cells see.
std::vector<Vec3> line_mixture(Rng& rng, int n) {
  const Vec3 anchor(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50));
  const Vec3 dir = rng.unit_vector();
  const double noise = rng.uniform(0.0, 0.5);
  std::vector<Vec3> points;
  points.reserve(n);
  for (int i = 0; i < n; ++i) {
    if (rng.uniform() < 0.1) {
      points.push_back(anchor + Vec3(rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-20, 20)));
    } else {
      points.push_back(anchor + rng.uniform(-30.0, 30.0) * dir +
                       noise * Vec3(rng.gaussian(), rng.gaussian(), rng.gaussian()));
    }
  }
  return points;
}

}  // namespace

TEST_CASE("incremental line fits match the batch oracle on random streams") {
  Rng rng(12345);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng.uniform_index(198));
    const std::vector<Vec3> points = line_mixture(rng, n);
    const BatchFit oracle = batch_fit(points);

    LineFitState svd_fit;
    ScatterFit scatter_fit;
    for (const Vec3& p : points) {
      ++svd_fit.votes;
      update_line_fit(svd_fit, p);
      scatter_fit.add(p);
    }

    CHECK(svd_fit.votes == n);
    CHECK(scatter_fit.votes == n);
    CHECK((svd_fit.mean - oracle.mean).norm() < 1e-9);
    CHECK((scatter_fit.mean - oracle.mean).norm() < 1e-9);
    CHECK((scatter_fit.m2 - oracle.scatter).norm() < 1e-9 * (1.0 + oracle.scatter.norm()));

    // Direction comparisons are meaningful only when the top singular value
    // is separated; the mixture construction guarantees a dominant line.
    if (oracle.singular_values[0] > 1.5 * oracle.singular_values[1]) {
      CHECK(direction_angle(svd_fit.direction(), oracle.direction) < 1e-6);
      CHECK(direction_angle(scatter_fit.direction(), oracle.direction) < 1e-6);
    }
    CHECK((svd_fit.sigma - oracle.singular_values).norm() <
          1e-7 * (1.0 + oracle.singular_values.norm()));
  }
}

TEST_CASE("first point initialises the fit exactly") {
  LineFitState fit;
  ++fit.votes;
  update_line_fit(fit, Vec3(3, -4, 5));
  CHECK(fit.mean == Vec3(3, -4, 5));
  CHECK(fit.sigma.norm() == 0.0);

  ScatterFit scatter;
  scatter.add(Vec3(3, -4, 5));
  CHECK(scatter.mean == Vec3(3, -4, 5));
  CHECK(scatter.m2.norm() == 0.0);
}

TEST_CASE("repeated identical points keep zero scatter") {
  ScatterFit scatter;
  for (int i = 0; i < 10; ++i) scatter.add(Vec3(1, 2, 3));
  CHECK((scatter.mean - Vec3(1, 2, 3)).norm() < 1e-14);
  CHECK(scatter.m2.norm() < 1e-12);

  LineFitState fit;
  for (int i = 0; i < 10; ++i) {
    ++fit.votes;
    update_line_fit(fit, Vec3(1, 2, 3));
  }
  CHECK((fit.mean - Vec3(1, 2, 3)).norm() < 1e-14);
  CHECK(fit.sigma.norm() < 1e-12);
}

TEST_CASE("eig_sym3 orders eigenvalues descending with orthonormal vectors") {
  Rng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec3 a(rng.gaussian(), rng.gaussian(), rng.gaussian());
    const Vec3 b(rng.gaussian(), rng.gaussian(), rng.gaussian());
    const Mat3 m = a * a.transpose() + b * b.transpose();
    const SymmetricEig3 eig = eig_sym3(m);
    CHECK(eig.values[0] >= eig.values[1]);
    CHECK(eig.values[1] >= eig.values[2]);
    CHECK((eig.vectors * eig.vectors.transpose() - Mat3::Identity()).norm() < 1e-12);
    CHECK((m * eig.vectors - eig.vectors * eig.values.asDiagonal()).norm() <
          1e-10 * (1.0 + m.norm()));
  }
}

TEST_CASE("exact line through points is recovered exactly") {
  const Vec3 anchor(5, -2, 1);
  const Vec3 dir = Vec3(1, 2, 2).normalized();
  ScatterFit fit;
  for (int i = 0; i < 25; ++i) fit.add(anchor + 0.5 * i * dir);
  CHECK(direction_angle(fit.direction(), dir) < 1e-10);
}
