#pragma once

#include "evstar/geometry.hpp"

namespace evstar {

/// Eigendecomposition of a symmetric 3x3 matrix: values descending, columns of
/// `vectors` are the matching orthonormal eigenvectors.
struct SymmetricEig3 {
  Vec3 values = Vec3::Zero();
  Mat3 vectors = Mat3::Identity();
};

/// Cyclic Jacobi rotations; accurate to machine precision and cheap enough for
/// per-event use.
SymmetricEig3 eig_sym3(const Mat3& a);

/// Streaming orthogonal line fit of 3-D points.
///
/// Maintains the exact left singular decomposition of the mean-adjusted data
/// matrix seen so far: `basis` holds the singular directions (principal first)
/// and `sigma` the singular values, both updated one point at a time. A batch
/// PCA over the same points reproduces `mean`, `basis.col(0)` and `sigma` up
/// to rounding, which is what makes the fit usable for exact re-derivation of
/// anything computed from it.
struct LineFitState {
  int votes = 0;  // number of points folded in, maintained by the caller
  Vec3 mean = Vec3::Zero();
  Mat3 basis = Mat3::Identity();
  Vec3 sigma = Vec3::Zero();

  Vec3 direction() const { return basis.col(0); }
};

/// Folds `z` into the fit. `state.votes` must already count `z` (increment
/// first, then call). The first point initialises mean = z, basis = I,
/// sigma = 0; later points update the decomposition through the rank-one
/// extension [diag(sigma) | w] with w the basis-projected, sqrt((n-1)/n)
/// scaled innovation. A point equal to the current mean contributes a zero
/// innovation and leaves the decomposition unchanged.
void update_line_fit(LineFitState& state, const Vec3& z);

/// Scatter-accumulating line fit. Keeps the exact running mean and the scatter
/// matrix (sum of outer products of mean-adjusted points); folding a point is
/// a handful of arithmetic, and the principal direction is only decomposed out
/// when asked for. Produces the same fit as LineFitState / batch PCA over the
/// same points, which makes it the cheap per-cell state for vote accumulation.
struct ScatterFit {
  int votes = 0;
  Vec3 mean = Vec3::Zero();
  Mat3 m2 = Mat3::Zero();

  void add(const Vec3& z) {
    ++votes;
    const Vec3 diff = z - mean;
    const double n = static_cast<double>(votes);
    mean += diff / n;
    // (z - new mean) = ((n-1)/n) * diff exactly, so the scatter gains a
    // symmetric rank-one term.
    m2.noalias() += ((n - 1.0) / n) * (diff * diff.transpose());
  }

  Vec3 direction() const { return eig_sym3(m2).vectors.col(0); }
};

}  // namespace evstar
