#include "relaxbc/bc_construct.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "relaxbc/errors.hpp"
#include "relaxbc/gkc.hpp"

namespace relaxbc {

namespace {

double inf_norm(const Mat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_radius(const Mat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// The layer datum must take values in span R1S; checked by sampling since the
// signal type has no basis representation.
void check_layer_datum(const SpectralModel& m, const SmoothSignal& D) {
  if (D.structurally_zero()) return;
  require(D.dim() == m.n, errc::invalid_layer_datum, "layer datum has wrong dimension");
  if (m.l == 0) return;
  const Mat L1U = m.L1U();
  double scale = 0.0, worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double t = 0.5 * i;
    const Vec v = D(t);
    scale = std::max(scale, inf_norm(v));
    worst = std::max(worst, inf_norm(L1U * v));
  }
  require(worst <= 1e-10 * (1.0 + scale), errc::invalid_layer_datum,
          "layer datum leaves the span of the outgoing eigenvectors");
}

SmoothSignal datum_or_zero(const SpectralModel& m, const SmoothSignal& D) {
  if (D.dim() == 0) return SmoothSignal::zero(m.n);
  return D;
}

// Returns `given` after a shape check, or the fallback when absent; an empty
// fallback marks the parameter as required.
Mat block_or(const Mat& given, int rows, int cols, const Mat& fallback, const char* name) {
  if (rows == 0 || cols == 0) return Mat::Zero(rows, cols);
  std::ostringstream os;
  if (given.size() == 0) {
    os << name << " is required (" << rows << " x " << cols << ")";
    require(fallback.size() != 0, errc::invalid_argument, os.str());
    return fallback;
  }
  os << name << " must be " << rows << " x " << cols;
  require(given.rows() == rows && given.cols() == cols, errc::invalid_argument, os.str());
  return given;
}

void warn_if(std::vector<std::string>* w, bool bad, const std::string& msg) {
  if (bad) w->push_back(msg);
}

// Hypothesis shared by the block-triangular families and the incoming-only
// family: spectral radius of the u-to-p coupling small against the fastest
// incoming relaxation speed, with a scalar relaxation when there is a single
// incoming mode.
void check_coupling_radius(const SpectralModel& m, const Mat& coupling, int modes,
                           std::vector<std::string>* warnings) {
  if (modes == 0) return;
  const double sr = spectral_radius(coupling);
  double smax = 0.0;
  for (int j = 0; j < modes; ++j) smax = std::max(smax, std::sqrt(m.a(j)));
  const double bound = 1.0 / ((std::sqrt(2.0) + 1.0) * smax);
  if (sr < bound) return;
  if (modes == 1) {
    // one incoming mode: the sharp scalar condition replaces the radius bound
    const double delta = coupling(0, 0);
    const double lo = 1.0 / (m.lambda(0) - std::sqrt(m.a(0)));  // negative
    if (delta > lo) return;
    std::ostringstream os;
    os << "coupling " << delta << " is not above the sharp scalar bound " << lo;
    warnings->push_back(os.str());
    return;
  }
  std::ostringstream os;
  os << "coupling spectral radius " << sr << " reaches the admissible bound " << bound;
  warnings->push_back(os.str());
}

}  // namespace

Mat coupling_H(const SpectralModel& m, const Mat& Bhat) {
  if (m.l == 0) return Mat::Zero(0, m.n);
  const Mat G0 = Bhat * m.R1U();
  const InverseResult inv = invert_checked(G0, kCondLimit, "Bhat R1U");
  return -inv.inverse * (Bhat * m.R1S());
}

SmoothSignal trace_J(const SpectralModel& m, const Mat& Bhat, const SmoothSignal& bhat) {
  if (m.l == 0) return SmoothSignal::zero(0);
  const Mat G0 = Bhat * m.R1U();
  const InverseResult inv = invert_checked(G0, kCondLimit, "Bhat R1U");
  return inv.inverse * bhat;
}

Mat build_Z(const SpectralModel& m, const Mat& H, const Mat& Ctilde) {
  const int n = m.n, l = m.l, k = n - l;
  require(H.rows() == l && H.cols() == k, errc::invalid_argument, "H must be l x (n-l)");
  require(Ctilde.rows() == k && Ctilde.cols() == k, errc::invalid_argument,
          "Ctilde must be (n-l) x (n-l)");
  Mat Z(2 * n - l, k);
  Z.topRows(n) = m.R1U() * H + m.R1S() - m.Finv() * (m.R1S() * Ctilde);
  Z.bottomRows(k) = Ctilde;
  return Z;
}

Mat complete_annihilator(const Mat& Z, AnnihilatorPolicy policy) {
  if (Z.cols() > 0)
    require(numerical_rank(Z) == Z.cols(), errc::degenerate_construction,
            "annihilated block lost column rank");
  return left_annihilator(Z, policy);
}

AssembledB assemble_B(const SpectralModel& m, const Mat& Bbar, const Mat& BpU_free) {
  const int n = m.n, l = m.l;
  require(Bbar.rows() == n && Bbar.cols() == 2 * n - l, errc::invalid_argument,
          "Bbar must be n x (2n-l)");
  const Mat BpU = block_or(BpU_free, n, l, Mat::Zero(n, l), "BpU_free");
  AssembledB out;
  out.Bu = Bbar.leftCols(n);
  out.Bp = BpU * m.L1U() + Bbar.rightCols(n - l) * m.L1S();
  Mat full(n, 2 * n);
  full.leftCols(n) = out.Bu;
  full.rightCols(n) = out.Bp;
  require(numerical_rank(full) == n, errc::degenerate_construction,
          "assembled boundary matrix lost row rank");
  return out;
}

SmoothSignal build_b0(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const SmoothSignal& J,
                      const SmoothSignal& D) {
  SmoothSignal b0 = (Bu * m.R1U()) * J;
  if (b0.dim() == 0) b0 = SmoothSignal::zero(m.n);
  b0 += (Mat(Bp - Bu * m.Finv())) * D;
  return b0;
}

double check_constraint(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const Mat& H,
                        const Mat& Ctilde) {
  const int n = m.n, l = m.l, k = n - l;
  if (k == 0) return 0.0;
  const Mat But = Bu * m.T;
  const Mat Bpt = Bp * m.T;
  const Mat LmInv = m.lambda_minus().cwiseInverse().asDiagonal();
  const Mat res = Bpt.rightCols(k) * Ctilde +
                  But.leftCols(l) * H +
                  But.rightCols(k) * (Mat::Identity(k, k) - LmInv * Ctilde);
  return inf_norm(res);
}

namespace {

// Shared tail: records coupling data, validates the constraint and rank,
// builds b0.  Expects Bu/Bp already final.
ConstructedBC finish(const SpectralModel& m, const GivenBoundaryCondition& gbc, Mat Bu, Mat Bp,
                     const Mat& Ctilde, const SmoothSignal& D, std::string family,
                     std::vector<std::string> warnings) {
  ConstructedBC out;
  out.Bu = std::move(Bu);
  out.Bp = std::move(Bp);
  out.Ctilde = Ctilde;
  out.C = m.R1S() * Ctilde;
  out.D = datum_or_zero(m, D);
  check_layer_datum(m, out.D);
  out.H = coupling_H(m, gbc.Bhat);
  out.J = trace_J(m, gbc.Bhat, gbc.bhat);
  out.Z = build_Z(m, out.H, Ctilde);
  out.Bbar = Mat(m.n, 2 * m.n - m.l);
  out.Bbar.leftCols(m.n) = out.Bu;
  out.Bbar.rightCols(m.n - m.l) = out.Bp * m.R1S();

  const double res = check_constraint(m, out.Bu, out.Bp, out.H, Ctilde);
  const double scale = std::max({1.0, inf_norm(out.Bu), inf_norm(out.Bp)});
  require(res <= 1e-10 * scale, errc::constraint_violation,
          "solvability constraint violated by the assembled boundary matrix");

  Mat full(m.n, 2 * m.n);
  full.leftCols(m.n) = out.Bu;
  full.rightCols(m.n) = out.Bp;
  require(numerical_rank(full) == m.n, errc::degenerate_construction,
          "boundary matrix lost row rank");

  out.b0 = build_b0(m, out.Bu, out.Bp, out.J, out.D);
  out.b1 = SmoothSignal::zero(m.n);
  out.b2 = SmoothSignal::zero(m.n);
  out.family = std::move(family);
  out.warnings = std::move(warnings);
  return out;
}

}  // namespace

ConstructedBC construct_bc(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                           const ConstructionParams& params) {
  validate_given_bc(m, gbc);
  const int n = m.n, l = m.l, k = n - l;

  if (l == n) {
    require(params.Ctilde.size() == 0, errc::invalid_argument,
            "no outgoing modes: Ctilde must be empty");
    require(params.D.structurally_zero(), errc::invalid_layer_datum,
            "no outgoing modes: layer datum must be zero");
    const Mat Bp = block_or(params.BpU_free, n, n, Mat::Zero(n, n), "BpU_free");
    ConstructedBC out =
        finish(m, gbc, gbc.Bhat, Bp, Mat::Zero(0, 0), SmoothSignal::zero(n), "custom", {});
    out.b0 = gbc.bhat;  // exact: Bu R1U J = Bhat T (Bhat T)^{-1} bhat
    return out;
  }

  const Mat Ctilde = block_or(params.Ctilde, k, k, Mat::Zero(k, k), "Ctilde");
  const SmoothSignal D = datum_or_zero(m, params.D);
  check_layer_datum(m, D);

  const Mat H = coupling_H(m, gbc.Bhat);
  const Mat Z = build_Z(m, H, Ctilde);
  const Mat Bbar = complete_annihilator(Z, params.annihilator_policy);
  const AssembledB ab = assemble_B(m, Bbar, params.BpU_free);
  return finish(m, gbc, ab.Bu, ab.Bp, Ctilde, D, "custom", {});
}

std::string preset_family_name(PresetFamily f) {
  switch (f) {
    case PresetFamily::l_eq_n: return "l_eq_n";
    case PresetFamily::n1_pos: return "n1_pos";
    case PresetFamily::n1_neg: return "n1_neg";
    case PresetFamily::n2_l1_czero: return "n2_l1_czero";
    case PresetFamily::n2_l1_cnonzero: return "n2_l1_cnonzero";
    case PresetFamily::gen_czero: return "gen_czero";
    case PresetFamily::gen_clambda: return "gen_clambda";
  }
  return "unknown";
}

std::optional<PresetFamily> preset_family_from_name(const std::string& name) {
  for (PresetFamily f : {PresetFamily::l_eq_n, PresetFamily::n1_pos, PresetFamily::n1_neg,
                         PresetFamily::n2_l1_czero, PresetFamily::n2_l1_cnonzero,
                         PresetFamily::gen_czero, PresetFamily::gen_clambda})
    if (preset_family_name(f) == name) return f;
  return std::nullopt;
}

namespace {

ConstructedBC preset_l_eq_n(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                            const PresetParams& p) {
  require(m.l == m.n, errc::invalid_argument, "family needs all speeds incoming");
  require(p.D.structurally_zero(), errc::invalid_layer_datum,
          "no outgoing modes: layer datum must be zero");
  const Mat Bp = block_or(p.Bp, m.n, m.n, Mat::Zero(m.n, m.n), "Bp");
  std::vector<std::string> warnings;
  // rho(Bp) = rho(T^-1 Bp T); the triangular alternative is checked in the
  // diagonalizing coordinates.
  const double sr = spectral_radius(Bp);
  const double bound = 1.0 / ((std::sqrt(2.0) + 1.0) * m.sqrt_a().maxCoeff());
  if (sr >= bound) {
    const Mat Bpt = m.Tinv * Bp * m.T;
    const double tol = 1e-12 * (1.0 + inf_norm(Bpt));
    const bool upper = inf_norm(Mat(Bpt.triangularView<Eigen::StrictlyLower>())) <= tol;
    const bool lower = inf_norm(Mat(Bpt.triangularView<Eigen::StrictlyUpper>())) <= tol;
    if (upper || lower) {
      for (int j = 0; j < m.n; ++j) {
        const double lo = 1.0 / (m.lambda(j) - std::sqrt(m.a(j)));  // negative
        if (!(Bpt(j, j) > lo)) {
          std::ostringstream os;
          os << "diagonal coupling " << Bpt(j, j) << " at mode " << j
             << " is not above the admissible bound " << lo;
          warnings.push_back(os.str());
        }
      }
    } else {
      std::ostringstream os;
      os << "coupling spectral radius " << sr << " reaches the admissible bound " << bound
         << " and the coupling is not triangular in characteristic coordinates";
      warnings.push_back(os.str());
    }
  }
  ConstructedBC out = finish(m, gbc, gbc.Bhat, Bp, Mat::Zero(0, 0), SmoothSignal::zero(m.n),
                             preset_family_name(PresetFamily::l_eq_n), std::move(warnings));
  out.b0 = gbc.bhat;
  return out;
}

ConstructedBC preset_n1_pos(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                            const PresetParams& p) {
  require(m.n == 1 && m.l == 1, errc::invalid_argument, "family needs n = 1 with incoming speed");
  const Mat Bp = block_or(p.Bp, 1, 1, Mat::Zero(1, 1), "Bp");
  const double F = m.lambda(0), s = std::sqrt(m.a(0));
  std::vector<std::string> warnings;
  // admissible iff 1/Bp lies outside [F - sqrt(a), 0], i.e. Bp > 1/(F - sqrt(a))
  warn_if(&warnings, !(Bp(0, 0) > 1.0 / (F - s)),
          "reflection coefficient reaches the inadmissible interval");
  const Mat Bu = Mat::Identity(1, 1);
  return finish(m, gbc, Bu, Bp, Mat::Zero(0, 0), SmoothSignal::zero(1),
                preset_family_name(PresetFamily::n1_pos), std::move(warnings));
}

ConstructedBC preset_n1_neg(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                            const PresetParams& p) {
  require(m.n == 1 && m.l == 0, errc::invalid_argument, "family needs n = 1 with outgoing speed");
  require(p.Ctilde.size() == 1, errc::invalid_argument, "family needs a scalar Ctilde");
  const double F = m.lambda(0), s = std::sqrt(m.a(0));
  const double Ct = p.Ctilde(0, 0);
  std::vector<std::string> warnings;
  warn_if(&warnings, !(Ct > F - F * F / s),
          "layer reflection coefficient reaches the inadmissible interval");
  Mat Bu(1, 1), Bp(1, 1);
  if (std::abs(Ct - F) <= 1e-12 * (1.0 + std::abs(F))) {
    Bu << 1.0;
    Bp << 0.0;
  } else {
    const double bp = block_or(p.Bp, 1, 1, Mat::Ones(1, 1), "Bp")(0, 0);
    Bp << bp;
    Bu << F * Ct / (Ct - F) * bp;
  }
  return finish(m, gbc, Bu, Bp, p.Ctilde, p.D, preset_family_name(PresetFamily::n1_neg),
                std::move(warnings));
}

double col_det(const Mat& c1, const Mat& c2) { return c1(0, 0) * c2(1, 0) - c1(1, 0) * c2(0, 0); }

ConstructedBC preset_n2_czero(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                              const PresetParams& p) {
  require(m.n == 2 && m.l == 1, errc::invalid_argument, "family needs n = 2, l = 1");
  const Mat Bu1 = block_or(p.Bu1t, 2, 1, Mat(), "Bu1t");
  const Mat Bp1 = block_or(p.Bp1t, 2, 1, Mat::Zero(2, 1), "Bp1t");
  Mat e2(2, 1);
  e2 << 0.0, 1.0;
  const Mat Bp2 = block_or(p.Bp2t, 2, 1, e2, "Bp2t");
  const double h = coupling_H(m, gbc.Bhat)(0, 0);
  Mat But(2, 2), Bpt(2, 2);
  But.col(0) = Bu1;
  But.col(1) = -h * Bu1;
  Bpt.col(0) = Bp1;
  Bpt.col(1) = Bp2;

  std::vector<std::string> warnings;
  const double lead = col_det(Bu1, Bp2);
  const double scale = std::max(1.0, std::max(inf_norm(Bu1), inf_norm(Bp2)));
  warn_if(&warnings, std::abs(lead) <= 1e-10 * scale,
          "leading 2 x 2 determinant is singular");
  if (Bp1.norm() > 0.0) {
    // Kreiss determinant = lead * q2 + det(Bp1, -h Bu1 + Bp2 q2) * q1; warn
    // when the perturbation term can reach the leading one.
    const double qmax1 = (std::sqrt(2.0) + 1.0) * std::sqrt(m.a(0));
    const double qmax2 = (std::sqrt(2.0) + 1.0) * std::sqrt(m.a(1));
    const double qmin2 = min_abs_q_estimate(m.a(1), m.lambda(1));
    const double first_inf = std::abs(lead) * qmin2;
    const double second_sup =
        qmax1 * Bp1.norm() * (std::abs(h) * Bu1.norm() + Bp2.norm() * qmax2);
    warn_if(&warnings, second_sup >= 0.99 * first_inf,
            "u-to-p coupling on the incoming mode is large enough to cancel the "
            "leading determinant");
  }
  const Mat Tinv = m.Tinv;
  return finish(m, gbc, But * Tinv, Bpt * Tinv, Mat::Zero(1, 1), p.D,
                preset_family_name(PresetFamily::n2_l1_czero), std::move(warnings));
}

ConstructedBC preset_n2_cnonzero(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                                 const PresetParams& p) {
  require(m.n == 2 && m.l == 1, errc::invalid_argument, "family needs n = 2, l = 1");
  require(p.Ctilde.size() == 1 && p.Ctilde(0, 0) != 0.0, errc::invalid_argument,
          "family needs a nonzero scalar Ctilde");
  const Mat Bu1 = block_or(p.Bu1t, 2, 1, Mat(), "Bu1t");
  const Mat Bu2 = block_or(p.Bu2t, 2, 1, Mat(), "Bu2t");
  const Mat Bp1 = block_or(p.Bp1t, 2, 1, Mat::Zero(2, 1), "Bp1t");
  const double Ct = p.Ctilde(0, 0);
  const double lam2 = m.lambda(1);
  const double h = coupling_H(m, gbc.Bhat)(0, 0);
  const Mat Bp2 = -Bu1 * (h / Ct) + Bu2 * ((Ct - lam2) / (lam2 * Ct));
  Mat But(2, 2), Bpt(2, 2);
  But.col(0) = Bu1;
  But.col(1) = Bu2;
  Bpt.col(0) = Bp1;
  Bpt.col(1) = Bp2;

  std::vector<std::string> warnings;
  const double du = col_det(Bu1, Bu2);
  warn_if(&warnings, std::abs(du) <= 1e-10 * std::max(1.0, std::max(Bu1.norm(), Bu2.norm())),
          "u block is singular");
  const double lo = lam2 - lam2 * lam2 / std::sqrt(m.a(1));
  warn_if(&warnings, !((Ct > lo && Ct < 0.0) || Ct > 0.0),
          "layer reflection coefficient reaches the inadmissible interval");
  if (Bp1.norm() > 0.0) {
    // Determinant with Bp1 = 0: det(Bu1, Bu2 + Bp2 q2); sampled minimum over
    // the parameter boundary bounds it from below, the Bp1 column perturbs it
    // by at most qmax1 |Bp1| |Bu2 + Bp2 q2|.
    const double qmax1 = (std::sqrt(2.0) + 1.0) * std::sqrt(m.a(0));
    double m0 = std::numeric_limits<double>::infinity();
    double wmax = 0.0;
    const int samples = 128;
    for (int i = 0; i <= samples; ++i) {
      const double phi = i / static_cast<double>(samples) * (std::acos(-1.0) / 2);
      for (double sign : {1.0, -1.0}) {
        FrequencyPoint fp;
        fp.eta = std::cos(phi);
        fp.xi0 = cplx(1e-10, sign * std::sin(phi));
        const cplx q2 = q_value(m.a(1), m.lambda(1), fp);
        const Eigen::Vector2cd w = Bu2.cast<cplx>() + Bp2.cast<cplx>() * q2;
        const cplx d = Bu1(0, 0) * w(1) - Bu1(1, 0) * w(0);
        m0 = std::min(m0, std::abs(d));
        wmax = std::max(wmax, w.norm());
      }
    }
    warn_if(&warnings, qmax1 * Bp1.norm() * wmax >= 0.99 * m0,
            "u-to-p coupling on the incoming mode is large enough to cancel the "
            "leading determinant");
  }
  return finish(m, gbc, But * m.Tinv, Bpt * m.Tinv, p.Ctilde, p.D,
                preset_family_name(PresetFamily::n2_l1_cnonzero), std::move(warnings));
}

ConstructedBC preset_gen_czero(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                               const PresetParams& p) {
  require(m.l < m.n, errc::invalid_argument, "family needs an outgoing mode");
  const int n = m.n, l = m.l, k = n - l;
  const Mat Bu11 = block_or(p.Bu11t, l, l, Mat(), "Bu11t");
  const Mat Bp11 = block_or(p.Bp11t, l, l, Mat::Zero(l, l), "Bp11t");
  const Mat Bp22 = block_or(p.Bp22t, k, k, Mat::Identity(k, k), "Bp22t");
  const Mat Bp12 = block_or(p.star, l, k, Mat::Zero(l, k), "star");
  const Mat H = coupling_H(m, gbc.Bhat);

  Mat But = Mat::Zero(n, n), Bpt = Mat::Zero(n, n);
  But.topLeftCorner(l, l) = Bu11;
  But.topRightCorner(l, k) = -Bu11 * H;
  Bpt.topLeftCorner(l, l) = Bp11;
  Bpt.topRightCorner(l, k) = Bp12;
  Bpt.bottomRightCorner(k, k) = Bp22;

  std::vector<std::string> warnings;
  warn_if(&warnings, cond_estimate(Bp22) >= kCondLimit, "p block on outgoing modes is singular");
  if (l > 0) {
    if (cond_estimate(Bu11) >= kCondLimit) {
      warnings.push_back("u block on incoming modes is singular");
    } else {
      check_coupling_radius(m, invert_checked(Bu11).inverse * Bp11, l, &warnings);
    }
  }
  return finish(m, gbc, But * m.Tinv, Bpt * m.Tinv, Mat::Zero(k, k), p.D,
                preset_family_name(PresetFamily::gen_czero), std::move(warnings));
}

ConstructedBC preset_gen_clambda(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                                 const PresetParams& p) {
  require(m.l < m.n, errc::invalid_argument, "family needs an outgoing mode");
  const int n = m.n, l = m.l, k = n - l;
  const Mat Bu11 = block_or(p.Bu11t, l, l, Mat(), "Bu11t");
  const Mat Bp11 = block_or(p.Bp11t, l, l, Mat::Zero(l, l), "Bp11t");
  const Mat Bu22 = block_or(p.Bu22t, k, k, Mat::Identity(k, k), "Bu22t");
  const Mat Bu12 = block_or(p.star, l, k, Mat::Zero(l, k), "star");
  const Mat H = coupling_H(m, gbc.Bhat);
  const Mat LmInv = m.lambda_minus().cwiseInverse().asDiagonal();

  Mat But = Mat::Zero(n, n), Bpt = Mat::Zero(n, n);
  But.topLeftCorner(l, l) = Bu11;
  But.topRightCorner(l, k) = Bu12;
  But.bottomRightCorner(k, k) = Bu22;
  Bpt.topLeftCorner(l, l) = Bp11;
  Bpt.topRightCorner(l, k) = -Bu11 * H * LmInv;

  std::vector<std::string> warnings;
  warn_if(&warnings, cond_estimate(Bu22) >= kCondLimit, "u block on outgoing modes is singular");
  if (l > 0) {
    if (cond_estimate(Bu11) >= kCondLimit) {
      warnings.push_back("u block on incoming modes is singular");
    } else {
      check_coupling_radius(m, invert_checked(Bu11).inverse * Bp11, l, &warnings);
    }
  }
  const Mat Ctilde = Mat(m.lambda_minus().asDiagonal());
  return finish(m, gbc, But * m.Tinv, Bpt * m.Tinv, Ctilde, p.D,
                preset_family_name(PresetFamily::gen_clambda), std::move(warnings));
}

}  // namespace

ConstructedBC preset_bc(const SpectralModel& m, const GivenBoundaryCondition& gbc, PresetFamily f,
                        const PresetParams& params) {
  validate_given_bc(m, gbc);
  switch (f) {
    case PresetFamily::l_eq_n: return preset_l_eq_n(m, gbc, params);
    case PresetFamily::n1_pos: return preset_n1_pos(m, gbc, params);
    case PresetFamily::n1_neg: return preset_n1_neg(m, gbc, params);
    case PresetFamily::n2_l1_czero: return preset_n2_czero(m, gbc, params);
    case PresetFamily::n2_l1_cnonzero: return preset_n2_cnonzero(m, gbc, params);
    case PresetFamily::gen_czero: return preset_gen_czero(m, gbc, params);
    case PresetFamily::gen_clambda: return preset_gen_clambda(m, gbc, params);
  }
  fail(errc::invalid_argument, "unknown preset family");
}

}  // namespace relaxbc
