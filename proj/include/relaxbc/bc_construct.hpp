#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relaxbc/linalg.hpp"
#include "relaxbc/model.hpp"
#include "relaxbc/signal.hpp"

namespace relaxbc {

/// Free choices in the boundary-condition completion.  Ctilde is the
/// (n-l) x (n-l) reflection coefficient coupling outgoing to incoming layer
/// modes, D the inhomogeneous layer datum (values must lie in span R1S),
/// BpU_free the n x l part of Bp acting on the unstable directions (free in
/// the construction; zero by default).
struct ConstructionParams {
  Mat Ctilde;
  SmoothSignal D;
  Mat BpU_free;
  AnnihilatorPolicy annihilator_policy = AnnihilatorPolicy::svd;
};

/// A completed boundary condition B(u, p) = b0 + eps b1 + eps^2 b2 together
/// with the data needed downstream (layer traces, reduced couplings).
struct ConstructedBC {
  Mat Bu, Bp;                   // n x n blocks of B = (Bu, Bp)
  SmoothSignal b0, b1, b2;      // boundary data per epsilon power
  Mat Ctilde;                   // (n-l) x (n-l)
  Mat C;                        // n x (n-l), C = R1S * Ctilde
  SmoothSignal D;               // layer datum, values in span R1S
  Mat H;                        // l x (n-l) reduced coupling
  SmoothSignal J;               // l-dim reduced trace
  Mat Z;                        // (2n-l) x (n-l) annihilated block
  Mat Bbar;                     // n x (2n-l), Bbar = (Bu, Bp R1S), Bbar Z = 0
  std::string family = "custom";
  std::vector<std::string> warnings;  // preset hypothesis violations
};

/// H = -(Bhat R1U)^{-1} Bhat R1S (l x (n-l)); requires l >= 1.
Mat coupling_H(const SpectralModel& m, const Mat& Bhat);

/// J = (Bhat R1U)^{-1} bhat (l components).
SmoothSignal trace_J(const SpectralModel& m, const Mat& Bhat, const SmoothSignal& bhat);

/// Z = [ R1U H + R1S - F^{-1} R1S Ctilde ; Ctilde ], always of full column
/// rank n - l.
Mat build_Z(const SpectralModel& m, const Mat& H, const Mat& Ctilde);

/// Rows spanning the left null space of Z: an n x (2n-l) matrix Bbar of full
/// row rank with Bbar Z = 0.
Mat complete_annihilator(const Mat& Z, AnnihilatorPolicy policy);

struct AssembledB {
  Mat Bu, Bp;
};

/// Splits Bbar = (Bu, BpS) back into physical blocks and inserts the free
/// part of Bp on the unstable directions: Bp = BpU_free L1U + BpS L1S.
/// Throws errc::degenerate_construction if (Bu, Bp) loses rank.
AssembledB assemble_B(const SpectralModel& m, const Mat& Bbar, const Mat& BpU_free);

/// b0 = Bu R1U J + (Bp - Bu F^{-1}) D.
SmoothSignal build_b0(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const SmoothSignal& J,
                      const SmoothSignal& D);

/// Inf-norm residual of the leading-order solvability constraint in tilde
/// coordinates: Bp_t (0 ; Ctilde) + Bu_t (H ; I - Lambda_minus^{-1} Ctilde).
double check_constraint(const SpectralModel& m, const Mat& Bu, const Mat& Bp, const Mat& H,
                        const Mat& Ctilde);

/// Full construction for a given interior condition Bhat u = bhat (l rows).
/// For l = n the prescribed condition is kept as-is (Bu = Bhat, b0 = bhat)
/// and params.Ctilde/D must be empty/zero; for l < n the completion described
/// above runs.  The internal constraint residual is asserted <= 1e-10 x scale.
ConstructedBC construct_bc(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                           const ConstructionParams& params);

/// Structured families with checkable well-posedness hypotheses.  Hypothesis
/// violations are reported as warnings, never as failures: the certifier is
/// the authority on the Kreiss condition.
enum class PresetFamily {
  l_eq_n,          // all characteristics incoming; Bu = Bhat, Bp free
  n1_pos,          // n = 1, lambda > 0
  n1_neg,          // n = 1, lambda < 0
  n2_l1_czero,     // n = 2, l = 1, Ctilde = 0
  n2_l1_cnonzero,  // n = 2, l = 1, Ctilde != 0
  gen_czero,       // any l < n, Ctilde = 0, block triangular
  gen_clambda,     // any l < n, Ctilde = Lambda_minus
};

std::string preset_family_name(PresetFamily f);
std::optional<PresetFamily> preset_family_from_name(const std::string& name);

/// Parameters of the preset families; every block is given in tilde
/// coordinates (i.e. right-multiplied by T) unless noted.  Unused fields may
/// stay empty and get defaulted per family:
///  - l_eq_n: Bp (physical n x n, default 0).
///  - n1_pos: Bp (1 x 1 physical, default 0).
///  - n1_neg: Ctilde (1 x 1), Bp (1 x 1 physical, default 1).
///  - n2_l1_czero: Bu1t, Bp1t, Bp2t (2-columns; Bp1t default 0, Bp2t default e2).
///  - n2_l1_cnonzero: Bu1t, Bu2t, Bp1t (2-columns), Ctilde (1 x 1, nonzero).
///  - gen_czero: Bu11t (l x l), Bp11t (l x l, default 0), Bp22t ((n-l) x (n-l),
///    default I), star = Bp12t (l x (n-l), default 0).
///  - gen_clambda: Bu11t, Bp11t, Bu22t ((n-l) x (n-l), default I),
///    star = Bu12t (l x (n-l), default 0).
struct PresetParams {
  Mat Bu11t, Bp11t, Bp22t, Bu22t, star;
  Mat Bu1t, Bu2t, Bp1t, Bp2t;  // n = 2 families: tilde columns
  Mat Ctilde;
  Mat Bp;  // physical Bp for the incoming-only families
  SmoothSignal D;
};

/// Builds the boundary matrices of a preset family, completes them through
/// the same pipeline as construct_bc, and records hypothesis checks.
ConstructedBC preset_bc(const SpectralModel& m, const GivenBoundaryCondition& gbc, PresetFamily f,
                        const PresetParams& params);

}  // namespace relaxbc
