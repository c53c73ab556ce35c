#pragma once

#include "relaxbc/linalg.hpp"
#include "relaxbc/signal.hpp"

namespace relaxbc {

/// Spectral description of the hyperbolic part: F = T diag(lambda) T^-1 and
/// the relaxation speeds squared a_j attached to the same eigenvectors,
/// Abar = T diag(a) T^-1.  Wave speeds are ordered (+...+, -...-) and l
/// counts the positive ones.
struct SpectralModel {
  int n = 0;
  int l = 0;
  Mat T;
  Mat Tinv;
  Vec lambda;
  Vec a;
  Mat F;
  Mat Abar;
  double condT = 1.0;

  Mat R1U() const { return T.leftCols(l); }
  Mat R1S() const { return T.rightCols(n - l); }
  Mat L1U() const { return Tinv.topRows(l); }
  Mat L1S() const { return Tinv.bottomRows(n - l); }
  Vec lambda_minus() const { return lambda.tail(n - l); }
  Vec sqrt_a() const { return a.cwiseSqrt(); }
  Mat Finv() const;  // T diag(1/lambda) T^-1
};

enum class SubcharStatus { strict, weak, violated };

/// Validates and assembles the model.  Throws:
///  - errc::singular_matrix when cond(T) exceeds 1e12,
///  - errc::non_characteristic when some wave speed vanishes,
///  - errc::ordering when positive speeds do not all precede negative ones,
///  - errc::relaxation_speed when some a_j <= 0.
SpectralModel build_model(const Mat& T, const Vec& lambda, const Vec& a);

/// Per-mode comparison of a_j against lambda_j^2 (tolerance 1e-12 relative).
SubcharStatus subcharacteristic_status(const SpectralModel& m);

/// The 2n x 2n coefficient matrix [[F, I], [Abar - F^2, -F]] of the
/// first-order system; its eigenvalues are +-sqrt(a_j).
Mat relaxation_coefficient_matrix(const SpectralModel& m);

/// Boundary data prescribed for the equilibrium problem: Bhat (l x n, full
/// rank with Bhat * R1U invertible) and the signal bhat.
struct GivenBoundaryCondition {
  Mat Bhat;
  SmoothSignal bhat;
};

/// Throws errc::invalid_given_bc on shape/rank violations.
void validate_given_bc(const SpectralModel& m, const GivenBoundaryCondition& g);

}  // namespace relaxbc
