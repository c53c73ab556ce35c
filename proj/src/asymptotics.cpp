#include "relaxbc/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "relaxbc/errors.hpp"

namespace relaxbc {

namespace {

double ipow(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

OuterEquilibrium::OuterEquilibrium(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                                   const SmoothProfile& u0)
    : m_(m),
      phi_(m.Tinv * u0),
      phi_s_(phi_, 4),
      J_(m.l > 0 ? trace_J(m, gbc.Bhat, gbc.bhat) : SmoothSignal::zero(0)),
      J_s_(J_, 4),
      H_(m.l > 0 ? coupling_H(m, gbc.Bhat) : Mat::Zero(0, m.n)) {
  require(u0.dim() == m.n, errc::invalid_argument, "initial profile has wrong dimension");
  validate_given_bc(m, gbc);
}

Vec OuterEquilibrium::incoming_trace(double t, int order) const {
  Vec am(m_.n - m_.l);
  for (int k = m_.l; k < m_.n; ++k) {
    const double lam = m_.lambda(k);
    am(k - m_.l) = ipow(-lam, order) * phi_s_.eval1(k, -lam * t, order);
  }
  return H_ * am + J_s_.eval(t, order);
}

double OuterEquilibrium::w(int j, double x, double t, int jx, int jt) const {
  require(x >= 0.0 && t >= 0.0, errc::invalid_argument,
          "equilibrium solution evaluated outside the quarter plane");
  require(jx >= 0 && jt >= 0 && jx + jt <= 3, errc::invalid_argument,
          "derivative order above 3");
  const double lam = m_.lambda(j);
  if (j >= m_.l || x >= lam * t) {
    const double y = x - lam * t;
    return ipow(-lam, jt) * phi_s_.eval1(j, y, jx + jt);
  }
  const double tau = t - x / lam;
  return ipow(-1.0 / lam, jx) * incoming_trace(tau, jx + jt)(j);
}

Vec OuterEquilibrium::u0_bar(double x, double t, int jx, int jt) const {
  Vec wv(m_.n);
  for (int j = 0; j < m_.n; ++j) wv(j) = w(j, x, t, jx, jt);
  return m_.T * wv;
}

Vec OuterEquilibrium::p1_bar(double x, double t, int jx, int jt) const {
  require(jx + jt <= 2, errc::invalid_argument, "derivative order above 2");
  return -(m_.Abar - m_.F * m_.F) * u0_bar(x, t, jx + 1, jt);
}

double OuterEquilibrium::trace_w(int j, double t, int order) const {
  if (j < m_.l) return incoming_trace(t, order)(j);
  const double lam = m_.lambda(j);
  return ipow(-lam, order) * phi_s_.eval1(j, -lam * t, order);
}

OuterEquilibrium solve_u0(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                          const SmoothProfile& u0) {
  return OuterEquilibrium(m, gbc, u0);
}

ReductionMatrices reduction_matrices(const SpectralModel& m, const Mat& Bu, const Mat& Bp) {
  require(Bu.rows() == m.n && Bu.cols() == m.n && Bp.rows() == m.n && Bp.cols() == m.n,
          errc::invalid_argument, "boundary blocks must be n x n");
  ReductionMatrices red;
  red.G = (Bp - Bu * m.Finv()) * m.R1S();
  if (m.l == m.n) {
    red.Bhat1 = Mat::Identity(m.n, m.n);
    red.Bhat2 = Mat::Zero(0, m.n);
    red.K = Mat::Zero(0, 0);
    red.Kinv = Mat::Zero(0, 0);
    red.condK = 1.0;
  } else {
    Eigen::JacobiSVD<Mat> svd(red.G, Eigen::ComputeFullU);
    const Vec sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > 1e-10 * sv(0)) ++rank;
    if (rank != m.n - m.l)
      fail(errc::reduction_failure,
           "layer coupling matrix has defective rank " + std::to_string(rank) + ", expected " +
               std::to_string(m.n - m.l) + ": boundary condition cannot be reduced");
    const Mat U = svd.matrixU();
    red.Bhat2 = U.leftCols(m.n - m.l).transpose();
    red.Bhat1 = U.rightCols(m.l).transpose();
    red.K = red.Bhat2 * red.G;
    try {
      const auto inv = invert_checked(red.K, kCondLimit, "reduced layer operator");
      red.Kinv = inv.inverse;
      red.condK = inv.cond;
    } catch (const Error&) {
      fail(errc::reduction_failure, "reduced layer operator is numerically singular");
    }
  }
  if (m.l == 0) {
    red.G1 = Mat::Zero(0, 0);
    red.G1inv = Mat::Zero(0, 0);
    red.condG1 = 1.0;
  } else {
    red.G1 = red.Bhat1 * Bu * m.R1U();
    try {
      const auto inv = invert_checked(red.G1, kCondLimit, "reduced outer operator");
      red.G1inv = inv.inverse;
      red.condG1 = inv.cond;
    } catch (const Error&) {
      fail(errc::reduction_failure, "reduced outer trace operator is numerically singular");
    }
  }
  return red;
}

AsymptoticSolution::AsymptoticSolution(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                                       const ConstructedBC& bc, const SmoothProfile& u0)
    : m_(m),
      outer_(m, gbc, u0),
      red_(reduction_matrices(m, bc.Bu, bc.Bp)),
      Bu_(bc.Bu),
      Bp_(bc.Bp),
      b0_(bc.b0),
      b1_(bc.b1.dim() == m.n ? bc.b1 : SmoothSignal::zero(m.n)),
      b0_s_(b0_, 4),
      b1_s_(b1_, 4),
      BpG_(Bp_ * (m.Abar - m.F * m.F)),
      BuFinv_(Bu_ * m.Finv()),
      r_(m.n - m.l),
      tail_w_(m.n - m.l),
      sec_w_(m.n - m.l) {
  require(b0_.dim() == m.n, errc::invalid_argument, "leading boundary signal has wrong dimension");
  for (int k = m_.l; k < m_.n; ++k) {
    const double lam = m_.lambda(k), a = m_.a(k);
    r_(k - m_.l) = lam / a;
    tail_w_(k - m_.l) = a / (lam * lam);
    sec_w_(k - m_.l) = a / (lam * lam * lam);
  }
  check_reflection_consistency(bc);
}

void AsymptoticSolution::check_reflection_consistency(const ConstructedBC& bc) {
  if (m_.l == m_.n) return;
  if (bc.C.rows() != m_.n || bc.C.cols() != m_.n - m_.l) return;  // custom assembly, skip
  const SignalStack ds(bc.D.dim() == m_.n ? bc.D : SmoothSignal::zero(m_.n), 0);
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double t = 0.25 * i;
    Vec am(m_.n - m_.l);
    for (int k = m_.l; k < m_.n; ++k) am(k - m_.l) = outer_.trace_w(k, t, 0);
    const Vec lhs = m_.R1S() * alpha(t);
    const Vec rhs = bc.C * am + ds.eval(t, 0);
    const double dev = (lhs - rhs).cwiseAbs().maxCoeff();
    worst = std::max(worst, dev);
  }
  reflection_mismatch_ = worst;
}

Vec AsymptoticSolution::alpha(double t, int order) const {
  if (m_.l == m_.n) return Vec::Zero(0);
  const Vec rhs = b0_s_.eval(t, order) - Bu_ * outer_.u0_bar(0.0, t, 0, order);
  return red_.Kinv * (red_.Bhat2 * rhs);
}

Vec AsymptoticSolution::mu0t_tail(double xi, double t, int order) const {
  Vec acc = Vec::Zero(m_.n);
  if (m_.l == m_.n) return acc;
  const Vec ad = alpha(t, order + 1);
  for (int k = m_.l; k < m_.n; ++k)
    acc += tail_w_(k - m_.l) * ad(k - m_.l) * std::exp(r_(k - m_.l) * xi) * m_.T.col(k);
  return acc;
}

Vec AsymptoticSolution::first_order_rhs(double t, int order) const {
  return b1_s_.eval(t, order) + BpG_ * outer_.u0_bar(0.0, t, 1, order) -
         BuFinv_ * mu0t_tail(0.0, t, order);
}

double AsymptoticSolution::source_coeff(int j, double y) const {
  const double lam = m_.lambda(j);
  return (m_.a(j) - lam * lam) * outer_.w(j, y, 0.0, 2, 0);
}

double AsymptoticSolution::source_trace(int j, double tau, int order) const {
  const double lam = m_.lambda(j);
  return (m_.a(j) - lam * lam) / (lam * lam) * outer_.trace_w(j, tau, 2 + order);
}

Vec AsymptoticSolution::beta_minus(double t, int order) const {
  Vec out(m_.n - m_.l);
  for (int k = m_.l; k < m_.n; ++k) {
    const double lam = m_.lambda(k), y = -lam * t, f = m_.a(k) - lam * lam;
    const double s2 = outer_.w(k, y, 0.0, 2, 0);
    if (order == 0) {
      out(k - m_.l) = t * f * s2;
    } else {
      const double s3 = outer_.w(k, y, 0.0, 3, 0);
      out(k - m_.l) = f * (s2 - lam * t * s3);
    }
  }
  return out;
}

Vec AsymptoticSolution::beta_plus(double t, int order) const {
  if (m_.l == 0) return Vec::Zero(0);
  const Vec g = red_.Bhat1 * first_order_rhs(t, order);
  const Vec rhs = g - red_.Bhat1 * (Bu_ * (m_.R1S() * beta_minus(t, order)));
  return red_.G1inv * rhs;
}

Vec AsymptoticSolution::trace_u1(double t, int order) const {
  Vec wv(m_.n);
  wv.head(m_.l) = beta_plus(t, order);
  wv.tail(m_.n - m_.l) = beta_minus(t, order);
  return m_.T * wv;
}

Vec AsymptoticSolution::zeta(double t, int order) const {
  if (m_.l == m_.n) return Vec::Zero(0);
  const Vec rhs = first_order_rhs(t, order) - Bu_ * trace_u1(t, order);
  return red_.Kinv * (red_.Bhat2 * rhs);
}

double AsymptoticSolution::hatw(int j, double x, double t, int jx, int jt) const {
  const double lam = m_.lambda(j);
  if (j >= m_.l || x >= lam * t) {
    const double y = x - lam * t;
    if (jx == 0 && jt == 0) return t * source_coeff(j, y);
    const double f = m_.a(j) - lam * lam;
    const double s3 = f * outer_.w(j, y, 0.0, 3, 0);
    if (jx == 1) return t * s3;
    return source_coeff(j, y) - lam * t * s3;
  }
  const double tau = t - x / lam, sig = x / lam;
  if (jx == 0 && jt == 0) return beta_plus(tau, 0)(j) + sig * source_trace(j, tau, 0);
  if (jx == 1)
    return (-beta_plus(tau, 1)(j) + source_trace(j, tau, 0) - sig * source_trace(j, tau, 1)) /
           lam;
  return beta_plus(tau, 1)(j) + sig * source_trace(j, tau, 1);
}

Vec AsymptoticSolution::u1_bar(double x, double t, int jx, int jt) const {
  require(x >= 0.0 && t >= 0.0, errc::invalid_argument,
          "first-order outer solution evaluated outside the quarter plane");
  require(jx >= 0 && jt >= 0 && jx + jt <= 1, errc::invalid_argument,
          "derivative order above 1");
  Vec hw(m_.n);
  for (int j = 0; j < m_.n; ++j) hw(j) = hatw(j, x, t, jx, jt);
  return m_.T * hw;
}

Vec AsymptoticSolution::nu0(double xi, double t, int dxi, int dt) const {
  Vec acc = Vec::Zero(m_.n);
  if (m_.l == m_.n) return acc;
  const Vec a = alpha(t, dt);
  for (int k = m_.l; k < m_.n; ++k) {
    const double r = r_(k - m_.l);
    acc += a(k - m_.l) * ipow(r, dxi) * std::exp(r * xi) * m_.T.col(k);
  }
  return acc;
}

Vec AsymptoticSolution::mu0(double xi, double t, int dxi, int dt) const {
  return -m_.Finv() * nu0(xi, t, dxi, dt);
}

Vec AsymptoticSolution::nu1(double xi, double t, int dxi, int dt) const {
  Vec acc = Vec::Zero(m_.n);
  if (m_.l == m_.n) return acc;
  require(dxi <= 1 && dt <= 1, errc::invalid_argument, "derivative order above 1");
  const Vec z = zeta(t, dt);
  const Vec ad = alpha(t, dt + 1);
  for (int k = m_.l; k < m_.n; ++k) {
    const int i = k - m_.l;
    const double r = r_(i), c = ad(i) / m_.lambda(k), e = std::exp(r * xi);
    const double base = (z(i) + c * xi) * e;
    acc += (dxi == 0 ? base : c * e + r * base) * m_.T.col(k);
  }
  return acc;
}

Vec AsymptoticSolution::mu1(double xi, double t, int dxi, int dt) const {
  Vec acc = -m_.Finv() * nu1(xi, t, dxi, dt);
  if (m_.l == m_.n) return acc;
  const Vec ad = alpha(t, dt + 1);
  for (int k = m_.l; k < m_.n; ++k) {
    const int i = k - m_.l;
    acc += sec_w_(i) * ad(i) * ipow(r_(i), dxi) * std::exp(r_(i) * xi) * m_.T.col(k);
  }
  return acc;
}

Vec AsymptoticSolution::eval(double x, double t, double eps) const {
  require(eps > 0.0, errc::invalid_argument, "relaxation rate must be positive");
  const double xi = x / eps;
  Vec out(2 * m_.n);
  out.head(m_.n) =
      outer_.u0_bar(x, t) + eps * u1_bar(x, t) + mu0(xi, t) + eps * mu1(xi, t);
  out.tail(m_.n) = eps * outer_.p1_bar(x, t) + nu0(xi, t) + eps * nu1(xi, t);
  return out;
}

Vec AsymptoticSolution::residual(double x, double t, double eps) const {
  require(eps > 0.0, errc::invalid_argument, "relaxation rate must be positive");
  const double xi = x / eps;
  const Vec u_t =
      outer_.u0_bar(x, t, 0, 1) + eps * u1_bar(x, t, 0, 1) + mu0(xi, t, 0, 1) +
      eps * mu1(xi, t, 0, 1);
  const Vec u_x = outer_.u0_bar(x, t, 1, 0) + eps * u1_bar(x, t, 1, 0) +
                  mu0(xi, t, 1, 0) / eps + mu1(xi, t, 1, 0);
  const Vec p_t = eps * outer_.p1_bar(x, t, 0, 1) + nu0(xi, t, 0, 1) + eps * nu1(xi, t, 0, 1);
  const Vec p_x = eps * outer_.p1_bar(x, t, 1, 0) + nu0(xi, t, 1, 0) / eps + nu1(xi, t, 1, 0);
  const Vec pv = eps * outer_.p1_bar(x, t) + nu0(xi, t) + eps * nu1(xi, t);
  Vec out(2 * m_.n);
  out.head(m_.n) = u_t + m_.F * u_x + p_x;
  out.tail(m_.n) = p_t + (m_.Abar - m_.F * m_.F) * u_x - m_.F * p_x + pv / eps;
  return out;
}

Vec AsymptoticSolution::predicted_residual(double x, double t, double eps) const {
  const double xi = x / eps;
  const Vec y = outer_.p1_bar(x, t, 0, 1) + (m_.Abar - m_.F * m_.F) * u1_bar(x, t, 1, 0) -
                m_.F * outer_.p1_bar(x, t, 1, 0);
  Vec out(2 * m_.n);
  out.head(m_.n) = eps * mu1(xi, t, 0, 1);
  out.tail(m_.n) = eps * (y + nu1(xi, t, 0, 1));
  return out;
}

double AsymptoticSolution::residual_l2(double t, double eps, double x_max, int n_interior,
                                       int n_layer) const {
  require(x_max > 0.0 && n_interior >= 2, errc::invalid_argument, "degenerate residual grid");
  std::vector<double> xs;
  xs.reserve(static_cast<size_t>(n_interior + n_layer + 2));
  for (int i = 0; i <= n_interior; ++i) xs.push_back(x_max * i / n_interior);
  if (m_.l < m_.n && n_layer > 0) {
    double width = 0.0;
    for (int k = m_.l; k < m_.n; ++k) width = std::max(width, m_.a(k) / -m_.lambda(k));
    const double x_layer = std::min(x_max, 40.0 * eps * width);
    for (int i = 0; i < n_layer; ++i) xs.push_back(x_layer * (i + 1) / n_layer);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double acc = 0.0;
  double prev_x = xs[0], prev_v = residual(xs[0], t, eps).squaredNorm();
  for (size_t i = 1; i < xs.size(); ++i) {
    const double v = residual(xs[i], t, eps).squaredNorm();
    acc += 0.5 * (v + prev_v) * (xs[i] - prev_x);
    prev_x = xs[i];
    prev_v = v;
  }
  return std::sqrt(acc);
}

}  // namespace relaxbc
