#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "doctest.h"
#include "relaxbc/model.hpp"

using namespace relaxbc;

namespace {

SpectralModel two_wave() {
  Vec lambda(2), a(2);
  lambda << 1.0, -1.0;
  a << 4.0, 4.0;
  return build_model(Mat::Identity(2, 2), lambda, a);
}

}  // namespace

TEST_CASE("build_model assembles F and Abar from the spectral data") {
  Mat T(2, 2);
  T << 1.0, 1.0, 0.0, 1.0;
  Vec lambda(2), a(2);
  lambda << 2.0, -3.0;
  a << 9.0, 16.0;
  const SpectralModel m = build_model(T, lambda, a);
  CHECK(m.l == 1);
  CHECK((m.T * m.Tinv - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((m.F * T.col(0) - 2.0 * T.col(0)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m.F * T.col(1) + 3.0 * T.col(1)).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((m.Abar * T.col(1) - 16.0 * T.col(1)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((m.F * m.Abar - m.Abar * m.F).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((m.Finv() * m.F - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("build_model rejects bad spectral data") {
  Vec lambda(2), a(2);
  lambda << 1.0, -1.0;
  a << 4.0, 4.0;

  SUBCASE("zero speed") {
    lambda(1) = 0.0;
    try {
      build_model(Mat::Identity(2, 2), lambda, a);
      FAIL("expected non_characteristic error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::non_characteristic);
    }
  }
  SUBCASE("unordered speeds") {
    lambda << -1.0, 1.0;
    try {
      build_model(Mat::Identity(2, 2), lambda, a);
      FAIL("expected ordering error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::ordering);
    }
  }
  SUBCASE("non-positive relaxation speed") {
    a(0) = 0.0;
    try {
      build_model(Mat::Identity(2, 2), lambda, a);
      FAIL("expected relaxation speed error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::relaxation_speed);
    }
  }
  SUBCASE("singular eigenvector matrix") {
    Mat T(2, 2);
    T << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(build_model(T, lambda, a), Error);
  }
}

TEST_CASE("subcharacteristic status classifies strict, weak and violated") {
  Vec lambda(2), a(2);
  lambda << 1.0, -2.0;
  a << 4.0, 5.0;
  CHECK(subcharacteristic_status(build_model(Mat::Identity(2, 2), lambda, a)) ==
        SubcharStatus::strict);
  a << 1.0, 5.0;  // a_1 = lambda_1^2
  CHECK(subcharacteristic_status(build_model(Mat::Identity(2, 2), lambda, a)) ==
        SubcharStatus::weak);
  a << 0.5, 5.0;
  CHECK(subcharacteristic_status(build_model(Mat::Identity(2, 2), lambda, a)) ==
        SubcharStatus::violated);
}

TEST_CASE("coefficient matrix has eigenvalues +-sqrt(a_j)") {
  Mat T(2, 2);
  T << 2.0, -1.0, 1.0, 3.0;
  Vec lambda(2), a(2);
  lambda << 1.5, -0.5;
  a << 6.0, 2.0;
  const SpectralModel m = build_model(T, lambda, a);
  const Mat A = relaxation_coefficient_matrix(m);

  Eigen::EigenSolver<Mat> es(A);
  std::vector<double> got(4);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::abs(es.eigenvalues()(i).imag()) < 1e-9);
    got[static_cast<size_t>(i)] = es.eigenvalues()(i).real();
  }
  std::sort(got.begin(), got.end());
  std::vector<double> want{-std::sqrt(6.0), -std::sqrt(2.0), std::sqrt(2.0), std::sqrt(6.0)};
  for (size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-9));

  // A^2 = blockdiag(Abar, Abar), which is what makes the blockwise inverse valid
  const Mat A2 = A * A;
  CHECK((A2.topLeftCorner(2, 2) - m.Abar).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((A2.bottomRightCorner(2, 2) - m.Abar).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(A2.topRightCorner(2, 2).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(A2.bottomLeftCorner(2, 2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("given boundary condition validation") {
  const SpectralModel m = two_wave();  // n = 2, l = 1

  GivenBoundaryCondition g;
  g.Bhat = Mat::Zero(1, 2);
  g.Bhat << 1.0, 1.0;
  g.bhat = SmoothSignal::zero(1);
  CHECK_NOTHROW(validate_given_bc(m, g));

  SUBCASE("wrong row count") {
    g.Bhat = Mat::Identity(2, 2);
    CHECK_THROWS_AS(validate_given_bc(m, g), Error);
  }
  SUBCASE("wrong signal dimension") {
    g.bhat = SmoothSignal::zero(2);
    CHECK_THROWS_AS(validate_given_bc(m, g), Error);
  }
  SUBCASE("Bhat R1U singular") {
    g.Bhat << 0.0, 1.0;  // annihilates the incoming eigenvector
    try {
      validate_given_bc(m, g);
      FAIL("expected invalid_given_bc");
    } catch (const Error& e) {
      CHECK(e.code() == errc::invalid_given_bc);
    }
  }
}
