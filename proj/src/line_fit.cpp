#include "evstar/line_fit.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace evstar {

SymmetricEig3 eig_sym3(const Mat3& a_in) {
  Mat3 a = a_in;
  Mat3 v = Mat3::Identity();

  for (int sweep = 0; sweep < 32; ++sweep) {
    const double off = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
    const double scale = std::abs(a(0, 0)) + std::abs(a(1, 1)) + std::abs(a(2, 2));
    if (off <= 1e-15 * (scale + 1e-300)) break;
    static constexpr int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pq : pairs) {
      const int p = pq[0], q = pq[1];
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      double t;
      if (std::abs(theta) > 1e150) {
        t = 0.5 / theta;
      } else {
        t = 1.0 / (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        if (theta < 0.0) t = -t;
      }
      const double c = 1.0 / std::sqrt(1.0 + t * t);
      const double s = t * c;

      const double app = a(p, p), aqq = a(q, q);
      a(p, p) = app - t * apq;
      a(q, q) = aqq + t * apq;
      a(p, q) = a(q, p) = 0.0;
      const int r = 3 - p - q;
      const double arp = a(r, p), arq = a(r, q);
      a(r, p) = a(p, r) = c * arp - s * arq;
      a(r, q) = a(q, r) = s * arp + c * arq;
      for (int i = 0; i < 3; ++i) {
        const double vip = v(i, p), viq = v(i, q);
        v(i, p) = c * vip - s * viq;
        v(i, q) = s * vip + c * viq;
      }
    }
  }

  SymmetricEig3 out;
  out.values = a.diagonal();
  out.vectors = v;
  // Selection sort, descending.
  for (int i = 0; i < 2; ++i) {
    int imax = i;
    for (int j = i + 1; j < 3; ++j)
      if (out.values(j) > out.values(imax)) imax = j;
    if (imax != i) {
      std::swap(out.values(i), out.values(imax));
      out.vectors.col(i).swap(out.vectors.col(imax));
    }
  }
  return out;
}

void update_line_fit(LineFitState& state, const Vec3& z) {
  if (state.votes <= 0)
    throw std::invalid_argument("update_line_fit: votes must already count the new point");
  if (state.votes == 1) {
    state.mean = z;
    state.basis = Mat3::Identity();
    state.sigma = Vec3::Zero();
    return;
  }
  const double n = static_cast<double>(state.votes);
  const double ratio = (n - 1.0) / n;
  const Vec3 diff = z - state.mean;
  state.mean += diff / n;

  // basis spans R^3, so the innovation has no component outside it and the
  // augmented system reduces to the 3x4 matrix [diag(sigma) | w]. Its left
  // singular factors are the eigenpairs of diag(sigma)^2 + w w^T.
  const Vec3 w = state.basis.transpose() * (std::sqrt(ratio) * diff);
  Mat3 gram = state.sigma.cwiseProduct(state.sigma).asDiagonal();
  gram += w * w.transpose();
  const SymmetricEig3 eig = eig_sym3(gram);
  state.sigma = eig.values.cwiseMax(0.0).cwiseSqrt();
  state.basis = state.basis * eig.vectors;
}

}  // namespace evstar
