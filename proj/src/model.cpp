#include "relaxbc/model.hpp"

#include <cmath>

namespace relaxbc {

Mat SpectralModel::Finv() const {
  return T * lambda.cwiseInverse().asDiagonal() * Tinv;
}

SpectralModel build_model(const Mat& T, const Vec& lambda, const Vec& a) {
  const int n = static_cast<int>(lambda.size());
  require(n >= 1, errc::invalid_argument, "model needs at least one mode");
  require(T.rows() == n && T.cols() == n, errc::invalid_argument,
          "eigenvector matrix shape mismatch");
  require(a.size() == n, errc::invalid_argument, "relaxation speed count mismatch");

  for (int j = 0; j < n; ++j)
    require(lambda(j) != 0.0, errc::non_characteristic,
            "wave speed " + std::to_string(j) + " vanishes");
  int l = 0;
  while (l < n && lambda(l) > 0.0) ++l;
  for (int j = l; j < n; ++j)
    require(lambda(j) < 0.0, errc::ordering,
            "wave speeds must be ordered (+...+, -...-)");
  for (int j = 0; j < n; ++j)
    require(a(j) > 0.0, errc::relaxation_speed,
            "relaxation speed squared " + std::to_string(j) + " must be positive");

  SpectralModel m;
  m.n = n;
  m.l = l;
  m.T = T;
  auto inv = invert_checked(T, kCondLimit, "eigenvector matrix");
  m.Tinv = inv.inverse;
  m.condT = inv.cond;
  m.lambda = lambda;
  m.a = a;
  m.F = T * lambda.asDiagonal() * m.Tinv;
  m.Abar = T * a.asDiagonal() * m.Tinv;
  return m;
}

SubcharStatus subcharacteristic_status(const SpectralModel& m) {
  bool weak = false;
  for (int j = 0; j < m.n; ++j) {
    double lam2 = m.lambda(j) * m.lambda(j);
    double tol = 1e-12 * std::max(1.0, std::max(m.a(j), lam2));
    double diff = m.a(j) - lam2;
    if (diff < -tol) return SubcharStatus::violated;
    if (diff <= tol) weak = true;
  }
  return weak ? SubcharStatus::weak : SubcharStatus::strict;
}

Mat relaxation_coefficient_matrix(const SpectralModel& m) {
  const int n = m.n;
  Mat A(2 * n, 2 * n);
  A.topLeftCorner(n, n) = m.F;
  A.topRightCorner(n, n) = Mat::Identity(n, n);
  A.bottomLeftCorner(n, n) = m.Abar - m.F * m.F;
  A.bottomRightCorner(n, n) = -m.F;
  return A;
}

void validate_given_bc(const SpectralModel& m, const GivenBoundaryCondition& g) {
  require(g.Bhat.rows() == m.l && g.Bhat.cols() == m.n, errc::invalid_given_bc,
          "given boundary matrix must be l x n");
  require(g.bhat.dim() == m.l, errc::invalid_given_bc,
          "given boundary signal must have l components");
  if (m.l == 0) return;
  require(numerical_rank(g.Bhat) == m.l, errc::invalid_given_bc,
          "given boundary matrix must have full row rank");
  Mat BR = g.Bhat * m.R1U();
  double cond = cond_estimate(BR);
  require(cond < kCondLimit, errc::invalid_given_bc,
          "given boundary matrix times incoming eigenvectors must be invertible");
}

}  // namespace relaxbc
