#include "relaxbc/gkc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "relaxbc/errors.hpp"

namespace relaxbc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Validates the admissible range: eta >= 0 and Re xi0 > 0, except that the
// certifier probes the boundary through a tiny positive offset.
void check_point(const FrequencyPoint& fp) {
  require(fp.eta >= 0.0, errc::invalid_argument, "frequency point needs eta >= 0");
  require(fp.xi0.real() > 0.0 || (fp.eta > 0.0 && fp.xi0.real() >= 0.0), errc::invalid_argument,
          "frequency point needs Re xi0 > 0 (or >= 0 with eta > 0)");
  require(std::abs(fp.xi0) + fp.eta > 0.0, errc::invalid_argument,
          "frequency point must not be the origin");
}

}  // namespace

KappaPair kappa_pm(double a, double lambda, const FrequencyPoint& fp) {
  check_point(fp);
  // kappa^2 - (eta lambda / a) kappa - (eta + xi0) xi0 / a = 0.
  const double b = fp.eta * lambda / a;
  const cplx c = -(fp.eta + fp.xi0) * fp.xi0 / a;
  const cplx disc = b * b - 4.0 * c;
  const cplx s = std::sqrt(disc);  // principal branch, Re s >= 0
  KappaPair k{(b + s) / 2.0, (b - s) / 2.0};
  // The admissible region has exactly one root on each side of the imaginary
  // axis; the larger-real-part root is the unstable one.
  const double scale = std::max({std::abs(k.plus), std::abs(k.minus), 1e-300});
  if (k.plus.real() - k.minus.real() <= 1e-14 * scale)
    fail(errc::eigen_split_failure, "kappa real parts failed to split");
  return k;
}

cplx q_value(double a, double lambda, const FrequencyPoint& fp) {
  const KappaPair k = kappa_pm(a, lambda, fp);
  return a / (fp.xi0 + fp.eta) * k.plus - lambda;
}

CMat frequency_symbol(const SpectralModel& m, const FrequencyPoint& fp) {
  check_point(fp);
  const int n = m.n;
  const Mat AbarInvF = m.T * (m.lambda.array() / m.a.array()).matrix().asDiagonal() * m.Tinv;
  const Mat AbarInv = m.T * m.a.cwiseInverse().asDiagonal() * m.Tinv;
  Mat Ainv(2 * n, 2 * n);  // A^{-1} = [[Abar^{-1}F, Abar^{-1}], [I - Abar^{-1}F^2, -Abar^{-1}F]]
  Ainv.topLeftCorner(n, n) = AbarInvF;
  Ainv.topRightCorner(n, n) = AbarInv;
  Ainv.bottomLeftCorner(n, n) = Mat::Identity(n, n) - AbarInvF * m.F;
  Ainv.bottomRightCorner(n, n) = -AbarInvF;

  Mat AinvS = Mat::Zero(2 * n, 2 * n);  // A^{-1} diag(0, -I)
  AinvS.topRightCorner(n, n) = -AbarInv;
  AinvS.bottomRightCorner(n, n) = AbarInvF;

  return fp.eta * AinvS.cast<cplx>() - fp.xi0 * Ainv.cast<cplx>();
}

StableBundle stable_bundle(const SpectralModel& m, const FrequencyPoint& fp) {
  const int n = m.n;
  StableBundle sb;
  sb.q.resize(n);
  sb.kappa_minus.resize(n);
  for (int j = 0; j < n; ++j) {
    const KappaPair k = kappa_pm(m.a(j), m.lambda(j), fp);
    sb.kappa_minus(j) = k.minus;
    sb.q(j) = m.a(j) / (fp.xi0 + fp.eta) * k.plus - m.lambda(j);
  }
  sb.R.resize(2 * n, n);
  const CMat Tc = m.T.cast<cplx>();
  sb.R.topRows(n) = Tc;
  sb.R.bottomRows(n) = Tc * sb.q.asDiagonal();
  return sb;
}

cplx gkc_det(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const FrequencyPoint& fp) {
  const int n = m.n;
  require(Bu.rows() == n && Bu.cols() == n && Bp.rows() == n && Bp.cols() == n,
          errc::invalid_argument, "boundary blocks must be n x n");
  CVec q(n);
  for (int j = 0; j < n; ++j) q(j) = q_value(m.a(j), m.lambda(j), fp);
  const CMat But = (Bu * m.T).cast<cplx>();
  const CMat Bpt = (Bp * m.T).cast<cplx>();
  return (But + Bpt * q.asDiagonal()).determinant();
}

double gkc_ratio(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const FrequencyPoint& fp) {
  const int n = m.n;
  CVec q(n);
  for (int j = 0; j < n; ++j) q(j) = q_value(m.a(j), m.lambda(j), fp);
  const CMat But = (Bu * m.T).cast<cplx>();
  const CMat Bpt = (Bp * m.T).cast<cplx>();
  const cplx det = (But + Bpt * q.asDiagonal()).determinant();
  double denom = 1.0;
  for (int j = 0; j < n; ++j) denom *= 1.0 + std::norm(q(j));
  return std::abs(det) / std::sqrt(denom);
}

namespace {

// Spherical parameterization of the admissible closure: eta = cos(phi),
// xi0 = sin(phi) e^{i psi}.  The shell constraint Re xi0 >= delta bounds
// |psi| by psi_max(phi).
struct ShellEval {
  const SpectralModel& m;
  const Mat& Bu;
  const Mat& Bp;
  long* counter;

  double operator()(double phi, double psi) const {
    FrequencyPoint fp;
    fp.eta = std::cos(phi);
    fp.xi0 = std::polar(std::sin(phi), psi);
    if (fp.eta < 0.0) fp.eta = 0.0;
    ++*counter;
    return gkc_ratio(m, Bu, Bp, fp);
  }
};

double psi_max_for(double phi, double delta) {
  const double r = std::sin(phi);
  if (r <= delta) return -1.0;  // shell empty at this phi
  return std::acos(std::min(1.0, delta / r));
}

struct GridMin {
  double value = std::numeric_limits<double>::infinity();
  double phi = kPi / 2;
  double psi = 0.0;
  double delta = 0.0;

  void consider(double v, double ph, double ps, double de) {
    if (v < value) {
      value = v;
      phi = ph;
      psi = ps;
      delta = de;
    }
  }
};

// Scans every delta shell plus the eta = 0 line; returns the global minimum
// and per-shell minima.
GridMin scan_grid(const ShellEval& ev, const SamplingConfig& cfg, int n_mu, int n_psi,
                  std::vector<std::pair<double, double>>* by_delta) {
  GridMin gm;
  for (double delta : cfg.deltas) {
    double shell_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_mu; ++i) {
      // Cell-centered in phi, endpoints in psi so the shell boundary is hit
      // exactly.
      const double phi = (i + 0.5) / n_mu * (kPi / 2);
      const double pm = psi_max_for(phi, delta);
      if (pm < 0.0) continue;
      for (int k = 0; k < n_psi; ++k) {
        const double psi = -pm + 2.0 * pm * k / (n_psi - 1);
        const double v = ev(phi, psi);
        shell_min = std::min(shell_min, v);
        gm.consider(v, phi, psi, delta);
      }
    }
    if (by_delta) by_delta->emplace_back(delta, shell_min);
  }
  // eta = 0 line: q_j = sqrt(a_j) - lambda_j for every admissible xi0, so the
  // ratio is constant there; a couple of phases guard the implementation.
  for (double psi : {0.0, 0.45 * kPi, -0.45 * kPi}) {
    const double v = ev(kPi / 2, psi);
    gm.consider(v, kPi / 2, psi, cfg.deltas.back());
  }
  return gm;
}

// Deterministic pattern search in (phi, psi), constrained to the delta shell
// the grid minimum came from.  Plain grids cannot resolve narrow dips of the
// determinant, so this polish is what makes FAIL detection reliable.
void polish(const ShellEval& ev, const SamplingConfig& cfg, int n_mu, int n_psi, GridMin* gm) {
  double dphi = (kPi / 2) / n_mu;
  double dpsi = kPi / std::max(2, n_psi - 1);
  double phi = gm->phi, psi = gm->psi, best = gm->value;
  const double delta = gm->delta;
  for (int round = 0; round < cfg.polish_rounds; ++round) {
    bool moved = false;
    const double cand_phi[4] = {phi - dphi, phi + dphi, phi, phi};
    const double cand_psi[4] = {psi, psi, psi - dpsi, psi + dpsi};
    for (int c = 0; c < 4; ++c) {
      double ph = std::clamp(cand_phi[c], 1e-12, kPi / 2);
      const double pm = psi_max_for(ph, delta);
      if (pm < 0.0) continue;
      double ps = std::clamp(cand_psi[c], -pm, pm);
      const double v = ev(ph, ps);
      if (v < best) {
        best = v;
        phi = ph;
        psi = ps;
        moved = true;
      }
    }
    if (!moved) {
      dphi /= 2;
      dpsi /= 2;
    }
  }
  gm->value = best;
  gm->phi = phi;
  gm->psi = psi;
}

}  // namespace

CertifyReport certify(const SpectralModel& m, const Mat& Bu, const Mat& Bp,
                      const SamplingConfig& cfg) {
  require(!cfg.deltas.empty(), errc::config_error, "certifier needs at least one delta shell");
  require(cfg.n_mu >= 4 && cfg.n_psi >= 5, errc::config_error, "certifier grid too coarse");
  CertifyReport rep;
  long counter = 0;
  ShellEval ev{m, Bu, Bp, &counter};

  GridMin gm = scan_grid(ev, cfg, cfg.n_mu, cfg.n_psi, &rep.c_by_delta);
  rep.c_hat_grid = gm.value;

  // Projective check: the ratio is invariant under (eta, xi0) -> s (eta, xi0)
  // up to the q's degree-0 homogeneity; probe a few rays at a large scale.
  for (int i = 1; i <= 7; ++i) {
    const double phi = i / 8.0 * (kPi / 2);
    FrequencyPoint fp;
    fp.eta = cfg.large_scale * std::cos(phi);
    fp.xi0 = std::polar(cfg.large_scale * std::sin(phi), 0.3);
    ++counter;
    const double v = gkc_ratio(m, Bu, Bp, fp);
    gm.consider(v, phi, 0.3, cfg.deltas.front());
  }

  polish(ev, cfg, cfg.n_mu, cfg.n_psi, &gm);
  rep.c_hat = gm.value;
  rep.argmin.eta = std::cos(gm.phi);
  rep.argmin.xi0 = std::polar(std::sin(gm.phi), gm.psi);

  if (rep.c_hat < cfg.tol_fail) {
    rep.verdict = "FAIL";
    rep.samples_used = counter;
    return rep;
  }

  // Stability rerun on a denser grid; a drifting minimum means the sampling
  // has not converged and the certificate is inconclusive.
  const int n_mu2 = static_cast<int>(cfg.n_mu * cfg.refine_factor);
  const int n_psi2 = static_cast<int>(cfg.n_psi * cfg.refine_factor) | 1;
  GridMin gm2 = scan_grid(ev, cfg, n_mu2, n_psi2, nullptr);
  polish(ev, cfg, n_mu2, n_psi2, &gm2);
  rep.c_hat_refined = gm2.value;

  if (gm2.value < cfg.tol_fail) {
    rep.verdict = "FAIL";
    rep.c_hat = gm2.value;
    rep.argmin.eta = std::cos(gm2.phi);
    rep.argmin.xi0 = std::polar(std::sin(gm2.phi), gm2.psi);
    rep.samples_used = counter;
    return rep;
  }

  const double drift = std::abs(rep.c_hat - gm2.value) / std::max(rep.c_hat, 1e-300);
  if (gm2.value < rep.c_hat) {
    rep.c_hat = gm2.value;
    rep.argmin.eta = std::cos(gm2.phi);
    rep.argmin.xi0 = std::polar(std::sin(gm2.phi), gm2.psi);
  }
  rep.verdict = (rep.c_hat > cfg.tol_pass && drift < cfg.stability_tol) ? "PASS" : "INCONCLUSIVE";
  rep.samples_used = counter;
  return rep;
}

std::vector<std::pair<double, cplx>> q_boundary_curve(double a, double lambda, double eta,
                                                      const std::vector<double>& theta2) {
  std::vector<std::pair<double, cplx>> out;
  out.reserve(theta2.size());
  for (double th : theta2) {
    FrequencyPoint fp;
    fp.eta = eta;
    fp.xi0 = cplx(1e-10, th);
    out.emplace_back(th, q_value(a, lambda, fp));
  }
  return out;
}

double min_abs_q_estimate(double a, double lambda, int samples) {
  double best = std::abs(std::sqrt(a) - lambda);  // eta = 0 value
  for (int i = 0; i <= samples; ++i) {
    const double phi = i / static_cast<double>(samples) * (kPi / 2);
    const double eta = std::cos(phi), r = std::sin(phi);
    for (double sgn : {1.0, -1.0}) {
      FrequencyPoint fp;
      fp.eta = eta;
      fp.xi0 = cplx(1e-10, sgn * r);
      if (eta == 0.0 && r == 0.0) continue;
      best = std::min(best, std::abs(q_value(a, lambda, fp)));
    }
  }
  return best;
}

}  // namespace relaxbc
