#include <cmath>

#include "doctest.h"
#include "relaxbc/bc_construct.hpp"
#include "relaxbc/compat.hpp"
#include "relaxbc/model.hpp"

using namespace relaxbc;

namespace {

SpectralModel p1() {
  Vec lambda(2), a(2);
  lambda << 1.0, -1.0;
  a << 4.0, 4.0;
  return build_model(Mat::Identity(2, 2), lambda, a);
}

SmoothProfile near_boundary_bump() {
  SmoothProfile u0 = SmoothProfile::gaussian_bump(2, 0, 1.0, 0.5, 2.0);
  u0 += SmoothProfile::gaussian_bump(2, 1, -0.8, 0.7, 3.0);
  return u0;
}

}  // namespace

TEST_CASE("initial data and correction jets for a frozen scalar example") {
  // F = 1, Abar = 4, u0 = -e^{-x^2}: u0(0) = -1, u0''(0) = 2, u0''''(0) = -12
  Vec lambda(1), a(1);
  lambda << 1.0;
  a << 4.0;
  const SpectralModel m = build_model(Mat::Identity(1, 1), lambda, a);
  const SmoothProfile u0 = SmoothProfile::gaussian_bump(1, 0, -1.0, 0.0, 1.0);

  const RelaxationInitialData data = build_initial_data(m, u0);
  CHECK(data.p1.eval(0, 0.0) == doctest::Approx(0.0));
  CHECK(data.p2.eval(0, 0.0) == doctest::Approx(-12.0));  // -2 F (A - F^2) u0''(0)

  const Mat tj = transport_jet(m, u0, 3);
  CHECK(tj(0, 0) == doctest::Approx(-1.0));
  CHECK(tj(0, 1) == doctest::Approx(0.0));
  CHECK(tj(0, 2) == doctest::Approx(2.0));

  Mat Bu = Mat::Ones(1, 1);
  Mat Bp = 0.5 * Mat::Ones(1, 1);
  const auto [b1, b2] = correction_data(m, Bu, Bp, u0);
  const SignalStack s1(b1, 2), s2(b2, 2);
  // first-order corner values: 0, Bu*6 + Bp*6, 0
  CHECK(s1.eval1(0, 0.0, 0) == doctest::Approx(0.0));
  CHECK(s1.eval1(0, 0.0, 1) == doctest::Approx(9.0));
  CHECK(s1.eval1(0, 0.0, 2) == doctest::Approx(0.0));
  // second-order corner values: Bp*(-12), 0, Bp*4*72
  CHECK(s2.eval1(0, 0.0, 0) == doctest::Approx(-6.0));
  CHECK(s2.eval1(0, 0.0, 1) == doctest::Approx(0.0));
  CHECK(s2.eval1(0, 0.0, 2) == doctest::Approx(144.0));
}

TEST_CASE("prescribed-condition compatibility residuals") {
  const SpectralModel m = p1();
  const SmoothProfile u0 = near_boundary_bump();
  GivenBoundaryCondition g;
  g.Bhat = Mat(1, 2);
  g.Bhat << 1.0, 1.0;

  SUBCASE("matched jet leaves no residual") {
    g.bhat = SmoothSignal::from_jet(compatible_bhat_jet(m, g.Bhat, u0));
    const Vec res = check_given_compat(m, g, u0);
    CHECK(res.maxCoeff() < 1e-12);
  }
  SUBCASE("zero data misses by the corner trace") {
    g.bhat = SmoothSignal::zero(1);
    const Vec res = check_given_compat(m, g, u0);
    CHECK(res(0) == doctest::Approx(std::abs(u0.eval(0, 0.0) + u0.eval(1, 0.0))).epsilon(1e-12));
    CHECK(res(1) > 0.0);
  }
}

TEST_CASE("full corner conditions hold for compatible preset data") {
  const SpectralModel m = p1();
  const SmoothProfile u0 = near_boundary_bump();
  GivenBoundaryCondition g;
  g.Bhat = Mat(1, 2);
  g.Bhat << 1.0, 1.0;
  g.bhat = SmoothSignal::from_jet(compatible_bhat_jet(m, g.Bhat, u0));

  // outgoing-reflection family has nonzero C, so the layer datum matters
  PresetParams params;
  params.Bu11t = Mat::Ones(1, 1);
  const Mat C = m.R1S() * Mat(m.lambda_minus().asDiagonal());
  params.D = SmoothSignal::from_jet(compatible_D_jet(m, C, u0));
  ConstructedBC bc = preset_bc(m, g, PresetFamily::gen_clambda, params);
  attach_compatible_data(m, &bc, u0);

  Vec eps(3);
  eps << 1.0, 1e-2, 1e-4;
  const CompatibilityReport rep = verify_relaxation_compat(m, g, bc, u0, eps);
  CHECK(rep.given_compat.maxCoeff() < 1e-12);
  CHECK(rep.b0_compat.maxCoeff() < 1e-12);
  CHECK(rep.b1_compat.maxCoeff() < 1e-12);
  CHECK(rep.b2_compat.maxCoeff() < 1e-12);
  CHECK(rep.D_compat.maxCoeff() < 1e-12);
  CHECK(rep.max_residual < 1e-10);

  // the assembled generator check is exact in eps, not just asymptotic
  for (int e = 0; e < eps.size(); ++e)
    for (int i = 0; i < 3; ++i) CHECK(rep.assembled(e, i) < 1e-10);
}

TEST_CASE("incompatible layer datum shows up in every dependent residual") {
  const SpectralModel m = p1();
  const SmoothProfile u0 = near_boundary_bump();
  GivenBoundaryCondition g;
  g.Bhat = Mat(1, 2);
  g.Bhat << 1.0, 1.0;
  g.bhat = SmoothSignal::from_jet(compatible_bhat_jet(m, g.Bhat, u0));

  PresetParams params;
  params.Bu11t = Mat::Ones(1, 1);  // D left zero although C != 0
  ConstructedBC bc = preset_bc(m, g, PresetFamily::gen_clambda, params);
  attach_compatible_data(m, &bc, u0);

  Vec eps(1);
  eps << 1e-2;
  const CompatibilityReport rep = verify_relaxation_compat(m, g, bc, u0, eps);
  CHECK(rep.D_compat.maxCoeff() > 1e-3);
  CHECK(rep.b0_compat.maxCoeff() > 1e-3);
  CHECK(rep.assembled.cwiseAbs().maxCoeff() > 1e-3);
  CHECK(rep.max_residual > 1e-3);
}

TEST_CASE("compatibility for the incoming-only family reduces to the prescribed one") {
  Vec lambda(2), a(2);
  lambda << 2.0, 1.0;
  a << 5.0, 3.0;
  const SpectralModel m = build_model(Mat::Identity(2, 2), lambda, a);
  const SmoothProfile u0 = near_boundary_bump();
  GivenBoundaryCondition g;
  g.Bhat = Mat::Identity(2, 2);
  g.bhat = SmoothSignal::from_jet(compatible_bhat_jet(m, g.Bhat, u0));

  PresetParams params;
  params.Bp = 0.05 * Mat::Identity(2, 2);
  ConstructedBC bc = preset_bc(m, g, PresetFamily::l_eq_n, params);
  attach_compatible_data(m, &bc, u0);

  Vec eps(2);
  eps << 1.0, 1e-3;
  const CompatibilityReport rep = verify_relaxation_compat(m, g, bc, u0, eps);
  CHECK(rep.max_residual < 1e-10);
}
