#include "relaxbc/compat.hpp"

#include <algorithm>

#include "relaxbc/errors.hpp"

namespace relaxbc {

namespace {

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

// (u; p) profiles concatenated into one 2n-dimensional profile.
SmoothProfile stack_profiles(const SmoothProfile& u, const SmoothProfile& p) {
  SmoothProfile w(u.dim() + p.dim());
  for (int c = 0; c < u.dim(); ++c)
    for (const auto& t : u.terms(c)) w.add_term(c, t);
  for (int c = 0; c < p.dim(); ++c)
    for (const auto& t : p.terms(c)) w.add_term(u.dim() + c, t);
  return w;
}

}  // namespace

RelaxationInitialData build_initial_data(const SpectralModel& m, const SmoothProfile& u0) {
  require(u0.dim() == m.n, errc::invalid_argument, "initial profile has wrong dimension");
  const Mat G = m.Abar - m.F * m.F;
  RelaxationInitialData out;
  out.u0 = u0;
  out.p1 = (-G) * u0.derivative();
  out.p2 = Mat(-2.0 * m.F * G) * u0.derivative().derivative();
  return out;
}

Mat transport_jet(const SpectralModel& m, const SmoothProfile& u0, int orders) {
  require(orders >= 1, errc::invalid_argument, "transport jet needs at least one column");
  Mat jet(m.n, orders);
  SmoothProfile w = u0;
  jet.col(0) = w(0.0);
  for (int i = 1; i < orders; ++i) {
    w = (-m.F) * w.derivative();
    jet.col(i) = w(0.0);
  }
  return jet;
}

Mat compatible_bhat_jet(const SpectralModel& m, const Mat& Bhat, const SmoothProfile& u0,
                        int orders) {
  return Bhat * transport_jet(m, u0, orders);
}

Vec check_given_compat(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                       const SmoothProfile& u0, int order) {
  validate_given_bc(m, gbc);
  require(order >= 0 && order <= 3, errc::invalid_argument, "compatibility order must be in 0..3");
  const Mat want = compatible_bhat_jet(m, gbc.Bhat, u0, order + 1);
  const SignalStack bhat(gbc.bhat, order);
  Vec res(order + 1);
  for (int i = 0; i <= order; ++i) res(i) = inf_norm(want.col(i) - bhat.eval(0.0, i));
  return res;
}

Mat compatible_D_jet(const SpectralModel& m, const Mat& C, const SmoothProfile& u0) {
  require(C.rows() == m.n && C.cols() == m.n - m.l, errc::invalid_argument,
          "C must be n x (n-l)");
  const Mat tj = transport_jet(m, u0, 3);
  // (0, C) T^{-1} w = C (T^{-1} w restricted to the outgoing block)
  return -C * (m.L1S() * tj);
}

Vec check_D_compat(const SpectralModel& m, const Mat& C, const SmoothSignal& D,
                   const SmoothProfile& u0) {
  const Mat want = compatible_D_jet(m, C, u0);
  const SignalStack ds(D, 2);
  Vec res(3);
  for (int i = 0; i < 3; ++i) res(i) = inf_norm(want.col(i) - ds.eval(0.0, i));
  return res;
}

std::pair<SmoothSignal, SmoothSignal> correction_data(const SpectralModel& m, const Mat& Bu,
                                                      const Mat& Bp, const SmoothProfile& u0) {
  require(u0.dim() == m.n, errc::invalid_argument, "initial profile has wrong dimension");
  const Mat G = m.Abar - m.F * m.F;
  const Mat FG = m.F * G;
  const ProfileStack su(u0, 4);
  const Vec u1 = su.eval(0.0, 1), u2 = su.eval(0.0, 2), u3 = su.eval(0.0, 3),
            u4 = su.eval(0.0, 4);
  const Vec p02 = -2.0 * FG * u2;
  const Vec p02x = -2.0 * FG * u3;
  const Vec p02xx = -2.0 * FG * u4;

  // corner values of the eps-order part of d_t^i (u, p)(0, 0)
  Mat b1_jet(m.n, 3), b2_jet(m.n, 3);
  b1_jet.col(0) = Bp * (-G * u1);
  b1_jet.col(1) = Bu * (G * u2) + Bp * (-FG * u2 - p02);
  b1_jet.col(2) = Bu * p02x + Bp * (-m.Abar * (G * u3) - 2.0 * m.F * p02x);
  // eps^2-order part
  b2_jet.col(0) = Bp * p02;
  b2_jet.col(1) = Bu * (-p02x) + Bp * (m.F * p02x);
  b2_jet.col(2) = Bp * (m.Abar * p02xx);

  return {SmoothSignal::from_jet(b1_jet), SmoothSignal::from_jet(b2_jet)};
}

void attach_compatible_data(const SpectralModel& m, ConstructedBC* bc, const SmoothProfile& u0) {
  auto [b1, b2] = correction_data(m, bc->Bu, bc->Bp, u0);
  bc->b1 = std::move(b1);
  bc->b2 = std::move(b2);
}

CompatibilityReport verify_relaxation_compat(const SpectralModel& m,
                                             const GivenBoundaryCondition& gbc,
                                             const ConstructedBC& bc, const SmoothProfile& u0,
                                             const Vec& eps_samples) {
  CompatibilityReport rep;
  rep.given_compat = check_given_compat(m, gbc, u0);
  rep.D_compat = m.l < m.n ? check_D_compat(m, bc.C, bc.D, u0) : Vec::Zero(3);

  const Mat tj = transport_jet(m, u0, 3);
  const SignalStack s0(bc.b0, 2), s1(bc.b1, 2), s2(bc.b2, 2);
  rep.b0_compat.resize(3);
  for (int i = 0; i < 3; ++i) rep.b0_compat(i) = inf_norm(bc.Bu * tj.col(i) - s0.eval(0.0, i));

  const Mat G = m.Abar - m.F * m.F;
  const Mat FG = m.F * G;
  const ProfileStack su(u0, 4);
  const Vec u1 = su.eval(0.0, 1), u2 = su.eval(0.0, 2), u3 = su.eval(0.0, 3),
            u4 = su.eval(0.0, 4);
  const Vec p02 = -2.0 * FG * u2;
  const Vec p02x = -2.0 * FG * u3;
  const Vec p02xx = -2.0 * FG * u4;
  rep.b1_compat.resize(3);
  rep.b2_compat.resize(3);
  rep.b1_compat(0) = inf_norm(bc.Bp * (-G * u1) - s1.eval(0.0, 0));
  rep.b1_compat(1) = inf_norm(bc.Bu * (G * u2) + bc.Bp * (-FG * u2 - p02) - s1.eval(0.0, 1));
  rep.b1_compat(2) =
      inf_norm(bc.Bu * p02x + bc.Bp * (-m.Abar * (G * u3) - 2.0 * m.F * p02x) - s1.eval(0.0, 2));
  rep.b2_compat(0) = inf_norm(bc.Bp * p02 - s2.eval(0.0, 0));
  rep.b2_compat(1) = inf_norm(bc.Bu * (-p02x) + bc.Bp * (m.F * p02x) - s2.eval(0.0, 1));
  rep.b2_compat(2) = inf_norm(bc.Bp * (m.Abar * p02xx) - s2.eval(0.0, 2));

  // Assembled check: apply the exact generator to the initial profiles and
  // compare with the time jets of b_eps; independent of the jet formulas.
  const RelaxationInitialData data = build_initial_data(m, u0);
  const Mat A = relaxation_coefficient_matrix(m);
  Mat B(m.n, 2 * m.n);
  B.leftCols(m.n) = bc.Bu;
  B.rightCols(m.n) = bc.Bp;

  rep.eps_samples = eps_samples;
  rep.assembled.resize(eps_samples.size(), 3);
  for (int e = 0; e < eps_samples.size(); ++e) {
    const double eps = eps_samples(e);
    require(eps > 0.0, errc::invalid_argument, "epsilon samples must be positive");
    Mat S_over_eps = Mat::Zero(2 * m.n, 2 * m.n);
    S_over_eps.bottomRightCorner(m.n, m.n) = -(1.0 / eps) * Mat::Identity(m.n, m.n);

    SmoothProfile p_eps = data.p1.scaled(eps);
    p_eps += data.p2.scaled(eps * eps);
    SmoothProfile w = stack_profiles(data.u0, p_eps);

    const SmoothSignal b_eps = bc.b0 + bc.b1.scaled(eps) + bc.b2.scaled(eps * eps);
    const SignalStack bs(b_eps, 2);
    for (int i = 0; i < 3; ++i) {
      if (i > 0) {
        SmoothProfile next = (-A) * w.derivative();
        next += S_over_eps * w;
        w = next;
      }
      rep.assembled(e, i) = inf_norm(B * w(0.0) - bs.eval(0.0, i));
    }
  }

  rep.max_residual = std::max({inf_norm(rep.given_compat), inf_norm(rep.b0_compat),
                               inf_norm(rep.b1_compat), inf_norm(rep.b2_compat),
                               inf_norm(rep.D_compat),
                               rep.assembled.size() == 0 ? 0.0
                                                         : rep.assembled.cwiseAbs().maxCoeff()});
  return rep;
}

}  // namespace relaxbc
