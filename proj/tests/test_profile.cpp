#include <cmath>

#include "doctest.h"
#include "relaxbc/profile.hpp"

using namespace relaxbc;

TEST_CASE("gaussian bump evaluates and differentiates analytically") {
  const double amp = 1.5, c = 5.0, beta = 2.0;
  const SmoothProfile p = SmoothProfile::gaussian_bump(2, 1, amp, c, beta);
  CHECK(p.eval(0, 4.0) == 0.0);
  for (double x : {3.0, 5.0, 6.2}) {
    const double y = x - c;
    CHECK(p.eval(1, x) == doctest::Approx(amp * std::exp(-beta * y * y)).epsilon(1e-14));
  }
  const SmoothProfile d1 = p.derivative();
  const SmoothProfile d2 = d1.derivative();
  for (double x : {3.7, 5.0, 6.1}) {
    const double y = x - c;
    const double g = amp * std::exp(-beta * y * y);
    CHECK(d1.eval(1, x) == doctest::Approx(-2.0 * beta * y * g).epsilon(1e-13));
    CHECK(d2.eval(1, x) ==
          doctest::Approx((4.0 * beta * beta * y * y - 2.0 * beta) * g).epsilon(1e-13));
  }
}

TEST_CASE("x_max bounds the numerical support of profile and derivatives") {
  SmoothProfile p = SmoothProfile::gaussian_bump(1, 0, 3.0, 4.0, 0.5);
  ProfileTerm t;
  t.poly = {0.0, 0.0, 2.0};  // 2 (x-1)^2 e^{-3(x-1)^2}
  t.center = 1.0;
  t.beta = 3.0;
  p.add_term(0, t);
  const double xm = p.x_max();
  CHECK(xm > 4.0);
  SmoothProfile d = p;
  for (int k = 0; k < 4; ++k) {
    CHECK(std::abs(d.eval(0, xm)) < 1e-25);
    CHECK(std::abs(d.eval(0, xm + 2.0)) < 1e-25);
    d = d.derivative();
  }
}

TEST_CASE("profile rejects non-positive width") {
  SmoothProfile p(1);
  ProfileTerm t;
  t.poly = {1.0};
  t.beta = 0.0;
  CHECK_THROWS_AS(p.add_term(0, t), Error);
}

TEST_CASE("matrix application and stack") {
  const SmoothProfile p = SmoothProfile::gaussian_bump(2, 0, 1.0, 0.0, 1.0);
  Mat m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  const SmoothProfile swapped = m * p;
  CHECK(swapped.eval(1, 0.3) == doctest::Approx(p.eval(0, 0.3)));
  CHECK(swapped.eval(0, 0.3) == 0.0);

  const ProfileStack st(p, 2);
  CHECK(st.depth() == 2);
  CHECK(st.eval1(0, 0.5, 1) == doctest::Approx(p.derivative().eval(0, 0.5)));
}
