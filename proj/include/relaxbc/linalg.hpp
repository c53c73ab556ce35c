#pragma once

#include <Eigen/Dense>
#include <complex>

#include "relaxbc/errors.hpp"

namespace relaxbc {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

/// Condition-number cap used everywhere a matrix inversion may be refused.
inline constexpr double kCondLimit = 1e12;

struct InverseResult {
  Mat inverse;
  double cond;  // 1-norm condition estimate
};

/// Partially pivoted inversion with a condition estimate; throws
/// errc::singular_matrix when cond exceeds `cond_limit`.
InverseResult invert_checked(const Mat& m, double cond_limit = kCondLimit,
                             const char* what = "matrix");

/// 1-norm condition estimate (no refusal).
double cond_estimate(const Mat& m);

/// Rank with tolerance relative to the largest singular value.
int numerical_rank(const Mat& m, double rel_tol = 1e-10);

enum class AnnihilatorPolicy {
  svd,            // complement of the column space from a full SVD (default)
  householder_qr  // trailing columns of the full Householder Q
};

/// Rows form an orthonormal basis of the space annihilating col(z):
/// result * z = 0, result has full row rank rows(z) - cols(z).
/// Requires z to have full column rank.
Mat left_annihilator(const Mat& z, AnnihilatorPolicy policy = AnnihilatorPolicy::svd);

/// Deterministic xorshift32 generator with uniform helpers; used by the
/// property-style tests and sampling code.  Not stdlib distributions: their
/// output is implementation-defined and would break frozen test values.
class Rng {
public:
  explicit Rng(unsigned seed) : state_(seed ? seed : 1u) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (next() * (1.0 / 4294967296.0));
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(next() % static_cast<unsigned>(hi - lo + 1));
  }

private:
  unsigned next() {
    // xorshift32; implementation-defined stdlib distributions avoided on purpose
    unsigned x = state_;
    x ^= x << 13;
    x ^= x >> 17;
    x ^= x << 5;
    return state_ = x;
  }
  unsigned state_;
};

}  // namespace relaxbc
