#pragma once

#include "relaxbc/bc_construct.hpp"
#include "relaxbc/model.hpp"
#include "relaxbc/profile.hpp"
#include "relaxbc/signal.hpp"

namespace relaxbc {

/// Leading-order outer solution of the relaxed problem on the half line:
/// u0_bar solves the equilibrium transport system u_t + F u_x = 0 with the
/// prescribed condition Bhat u(0,t) = bhat(t) and initial profile u0, by
/// exact characteristics in the diagonalizing coordinates.  p1_bar is the
/// first-order outer pressure -(Abar - F^2) u0_bar_x; the leading pressure
/// vanishes identically.
class OuterEquilibrium {
 public:
  OuterEquilibrium(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                   const SmoothProfile& u0);

  const SpectralModel& model() const { return m_; }

  /// Scalar diagonal component j of T^{-1} u0_bar with jx spatial and jt time
  /// derivatives applied, jx + jt <= 3.  On the characteristic x = lambda_j t
  /// the incoming components report the interior-side value.
  double w(int j, double x, double t, int jx = 0, int jt = 0) const;

  /// d_x^jx d_t^jt u0_bar(x, t), jx + jt <= 3.
  Vec u0_bar(double x, double t, int jx = 0, int jt = 0) const;

  /// d_x^jx d_t^jt p1_bar(x, t), jx + jt <= 2.
  Vec p1_bar(double x, double t, int jx = 0, int jt = 0) const;

  /// Boundary trace derivative d_t^order w_j(0, t), order <= 3.
  double trace_w(int j, double t, int order) const;

 private:
  // incoming trace vector (H alpha^- + J)(t) and its t-derivatives
  Vec incoming_trace(double t, int order) const;

  SpectralModel m_;
  SmoothProfile phi_;  // T^{-1} u0
  ProfileStack phi_s_;
  SmoothSignal J_;  // (Bhat R1U)^{-1} bhat
  SignalStack J_s_;
  Mat H_;
};

OuterEquilibrium solve_u0(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                          const SmoothProfile& u0);

/// Row spaces splitting the order-eps boundary condition into the part that
/// determines the outer trace (Bhat1 rows annihilate the layer coupling
/// G = (Bp - Bu F^{-1}) R1S) and the part that determines the layer strength
/// (Bhat2 rows, on which G acts invertibly).  Both bases are orthonormal and
/// stacked they form an orthogonal n x n matrix.
struct ReductionMatrices {
  Mat Bhat1;  // l x n, Bhat1 G = 0
  Mat Bhat2;  // (n-l) x n
  Mat G;      // n x (n-l)
  Mat K;      // Bhat2 G, invertible
  Mat Kinv;
  Mat G1;  // Bhat1 Bu R1U, invertible
  Mat G1inv;
  double condK = 0.0;
  double condG1 = 0.0;
};

ReductionMatrices reduction_matrices(const SpectralModel& m, const Mat& Bu, const Mat& Bp);

/// Two-term inner-outer decomposition of the relaxation solution for the
/// constructed boundary condition: outer fields (u0_bar, u1_bar, p1_bar) and
/// boundary-layer fields (mu0, mu1, nu0, nu1) in the stretched variable
/// xi = x / eps, with
///   u_eps = u0_bar + eps u1_bar + mu0 + eps mu1,
///   p_eps =          eps p1_bar + nu0 + eps nu1.
/// All evaluators are closed-form (characteristics, decaying exponentials and
/// resonant xi e^{r xi} profiles) and pure; batch evaluation is reentrant.
class AsymptoticSolution {
 public:
  AsymptoticSolution(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                     const ConstructedBC& bc, const SmoothProfile& u0);

  const SpectralModel& model() const { return m_; }
  const OuterEquilibrium& outer() const { return outer_; }
  const ReductionMatrices& reduction() const { return red_; }

  Vec u0_bar(double x, double t, int jx = 0, int jt = 0) const {
    return outer_.u0_bar(x, t, jx, jt);
  }
  Vec p1_bar(double x, double t, int jx = 0, int jt = 0) const {
    return outer_.p1_bar(x, t, jx, jt);
  }

  /// d_x^jx d_t^jt u1_bar(x, t), jx + jt <= 1.  u1_bar solves the first-order
  /// outer system u_t + F u_x = -p1_bar_x with zero initial data; its source
  /// is constant along each diagonal characteristic, so the Duhamel integral
  /// is evaluated exactly.
  Vec u1_bar(double x, double t, int jx = 0, int jt = 0) const;

  /// Boundary trace d_t^order u1_bar(0, t), order <= 1.
  Vec trace_u1(double t, int order = 0) const;

  /// Layer strength coefficients: nu0(0, t) = R1S alpha(t), order <= 2.
  Vec alpha(double t, int order = 0) const;
  /// nu1(0, t) = R1S zeta(t), order <= 1.
  Vec zeta(double t, int order = 0) const;

  /// Layer fields at (xi, t); dxi + dt <= 2 for nu0/mu0, dxi, dt <= 1 for
  /// nu1/mu1.  All vanish identically when l = n.
  Vec nu0(double xi, double t, int dxi = 0, int dt = 0) const;
  Vec mu0(double xi, double t, int dxi = 0, int dt = 0) const;
  Vec nu1(double xi, double t, int dxi = 0, int dt = 0) const;
  Vec mu1(double xi, double t, int dxi = 0, int dt = 0) const;

  /// Closed-form tail integral of mu0_t from xi to infinity (the secular part
  /// of mu1), and its value at xi = 0 entering the first-order boundary data.
  Vec mu0t_tail(double xi, double t, int order = 0) const;

  /// Assembled two-term solution (u_eps; p_eps)(x, t), 2n components.
  Vec eval(double x, double t, double eps) const;

  /// Relaxation operator applied to the assembled solution by analytic
  /// differentiation: rows (u_t + F u_x + p_x; p_t + (Abar-F^2) u_x - F p_x
  /// + p/eps).
  Vec residual(double x, double t, double eps) const;

  /// The same residual from its closed form eps (0; y) + eps (mu1_t; nu1_t)
  /// with y = p1_bar_t + (Abar - F^2) u1_bar_x - F p1_bar_x.
  Vec predicted_residual(double x, double t, double eps) const;

  /// L2 norm over [0, x_max] of |residual(., t, eps)| on a composite grid
  /// with n_layer extra points resolving the boundary layer.
  double residual_l2(double t, double eps, double x_max, int n_interior = 2000,
                     int n_layer = 400) const;

  /// Max over sampled t of |R1S alpha(t) - (C alpha^-(t) + D(t))|_inf: the
  /// layer strength solved from the reduced boundary condition must agree
  /// with the outgoing-reflection form used by the construction.
  double reflection_mismatch() const { return reflection_mismatch_; }

 private:
  double hatw(int j, double x, double t, int jx, int jt) const;  // diag comps of u1_bar
  double source_coeff(int j, double y) const;   // (a_j - lambda_j^2) phi_j''(y)
  double source_trace(int j, double tau, int order) const;  // boundary-branch source
  Vec beta_minus(double t, int order) const;    // outgoing u1 trace components
  Vec beta_plus(double t, int order) const;     // incoming u1 trace via G1 solve
  Vec first_order_rhs(double t, int order) const;
  void check_reflection_consistency(const ConstructedBC& bc);

  SpectralModel m_;
  OuterEquilibrium outer_;
  ReductionMatrices red_;
  Mat Bu_, Bp_;
  SmoothSignal b0_, b1_;
  SignalStack b0_s_, b1_s_;
  Mat BpG_;     // Bp (Abar - F^2)
  Mat BuFinv_;  // Bu F^{-1}
  Vec r_;       // layer decay rates lambda_j / a_j, j > l stored at j-l
  Vec tail_w_;  // tail integral weights a_j / lambda_j^2
  Vec sec_w_;   // secular mu1 weights a_j / lambda_j^3
  double reflection_mismatch_ = 0.0;
};

}  // namespace relaxbc
