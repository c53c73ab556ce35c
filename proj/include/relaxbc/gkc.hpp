#pragma once

#include <string>
#include <vector>

#include "relaxbc/model.hpp"

namespace relaxbc {

/// Frequency-domain sample point: eta >= 0 (dual to the relaxation rate) and
/// a Laplace variable xi0 with Re xi0 > 0 (boundary Re xi0 = 0 only as a
/// flagged limit).
struct FrequencyPoint {
  double eta = 0.0;
  cplx xi0{1.0, 0.0};
};

struct KappaPair {
  cplx plus;   // root with positive real part
  cplx minus;  // root with negative real part
};

/// Roots of kappa^2 - (eta lambda / a) kappa - (eta + xi0) xi0 / a = 0,
/// labeled by sign of the real part; throws errc::eigen_split_failure when
/// the real parts fail to split (tie tolerance 1e-14 relative).
KappaPair kappa_pm(double a, double lambda, const FrequencyPoint& fp);

/// q = a / (xi0 + eta) * kappa_plus - lambda; at eta = 0 this is exactly
/// sqrt(a) - lambda for every admissible xi0.
cplx q_value(double a, double lambda, const FrequencyPoint& fp);

/// M(eta, xi0) = A^{-1} (eta S - xi0 I), S = diag(0, -I).
CMat frequency_symbol(const SpectralModel& m, const FrequencyPoint& fp);

/// Basis of the stable (decaying in x) subspace of the frequency symbol:
/// R = blockdiag(T, T) * [I ; Q] with Q = diag(q_j); columns are eigenvectors
/// of M with eigenvalues kappa_minus_j.
struct StableBundle {
  CVec q;
  CVec kappa_minus;
  CMat R;  // 2n x n
};
StableBundle stable_bundle(const SpectralModel& m, const FrequencyPoint& fp);

/// det(Bu T + Bp T Q) (the boundary determinant in tilde coordinates).
cplx gkc_det(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const FrequencyPoint& fp);

/// |gkc_det| / sqrt(prod_j (1 + |q_j|^2)): the normalized Kreiss determinant.
double gkc_ratio(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const FrequencyPoint& fp);

/// Certifier sampling plan.  Points live on the normalized sphere
/// eta^2 + |xi0|^2 = 1 with Re xi0 >= delta for each delta shell; the eta = 0
/// line and a projective large-|xi0| check are included.
struct SamplingConfig {
  int n_mu = 96;                                   // polar resolution (eta vs |xi0|)
  int n_psi = 97;                                  // phase resolution of xi0
  std::vector<double> deltas{1e-2, 1e-4, 1e-6};    // Re xi0 offsets
  double refine_factor = 2.0;                      // density multiplier for the stability rerun
  double tol_pass = 1e-3;
  double tol_fail = 1e-6;
  double stability_tol = 0.10;                     // relative change allowed under refinement
  int polish_rounds = 60;                          // local pattern-search iterations
  double large_scale = 1e8;                        // |.| scaling for the asymptote check
  int jobs = 1;
};

struct CertifyReport {
  double c_hat = 0.0;          // after local polish
  double c_hat_grid = 0.0;     // best grid sample before polish
  double c_hat_refined = 0.0;  // refined-grid value used for the stability check
  FrequencyPoint argmin;
  std::string verdict;  // "PASS" | "FAIL" | "INCONCLUSIVE"
  long samples_used = 0;
  std::vector<std::pair<double, double>> c_by_delta;  // (delta, min ratio on that shell)
};

CertifyReport certify(const SpectralModel& m, const Mat& Bu, const Mat& Bp,
                      const SamplingConfig& cfg = {});

/// Samples of q along the boundary curve xi0 = i theta2 (evaluated at
/// Re xi0 = 1e-10, the flagged limit), for diagnostics and lower-bound
/// estimates.
std::vector<std::pair<double, cplx>> q_boundary_curve(double a, double lambda, double eta,
                                                      const std::vector<double>& theta2);

/// Coarse lower-bound estimate of min |q_j| over the admissible closure for a
/// strictly subcharacteristic outgoing mode (used for preset warnings).
double min_abs_q_estimate(double a, double lambda, int samples = 256);

}  // namespace relaxbc
