#pragma once

#include <utility>

#include "relaxbc/bc_construct.hpp"
#include "relaxbc/model.hpp"
#include "relaxbc/profile.hpp"

namespace relaxbc {

/// Initial data of the relaxation system carrying the first two orders of the
/// interior expansion: (u, p)(x, 0) = (u0; 0) + eps (0; p1) + eps^2 (0; p2)
/// with p1 = -(Abar - F^2) u0_x and p2 = -2 F (Abar - F^2) u0_xx.
struct RelaxationInitialData {
  SmoothProfile u0;
  SmoothProfile p1;
  SmoothProfile p2;
};

RelaxationInitialData build_initial_data(const SpectralModel& m, const SmoothProfile& u0);

/// Columns i = 0..orders-1 of (-F d/dx)^i u0 evaluated at x = 0: the time
/// jets of the equilibrium solution at the boundary corner.
Mat transport_jet(const SpectralModel& m, const SmoothProfile& u0, int orders);

/// Jet of bhat making the equilibrium data compatible:
/// column i = Bhat (-F d/dx)^i u0(0), i = 0..orders-1.
Mat compatible_bhat_jet(const SpectralModel& m, const Mat& Bhat, const SmoothProfile& u0,
                        int orders = 4);

/// Per-order residuals (inf norm, i = 0..order) of the prescribed equilibrium
/// compatibility Bhat (-F d/dx)^i u0(0) = d_t^i bhat(0).  The error estimates
/// assume order 3; the relaxation corner conditions themselves use order 2.
Vec check_given_compat(const SpectralModel& m, const GivenBoundaryCondition& gbc,
                       const SmoothProfile& u0, int order = 3);

/// Jet of the layer datum making the leading boundary layer start from zero:
/// column i = -(0, C) T^{-1} (-F d/dx)^i u0(0).  Values lie in span R1S.
Mat compatible_D_jet(const SpectralModel& m, const Mat& C, const SmoothProfile& u0);

/// Per-order residuals of d_t^i D(0) against compatible_D_jet.
Vec check_D_compat(const SpectralModel& m, const Mat& C, const SmoothSignal& D,
                   const SmoothProfile& u0);

/// First and second order boundary data as quadratic jets: the corner values
/// of (Bu, Bp) applied to the eps and eps^2 parts of d_t^i (u, p)(0, 0).
std::pair<SmoothSignal, SmoothSignal> correction_data(const SpectralModel& m, const Mat& Bu,
                                                      const Mat& Bp, const SmoothProfile& u0);

/// Fills bc->b1 and bc->b2 with correction_data.  Does not touch D: the layer
/// datum is an input of the construction, validated by check_D_compat.
void attach_compatible_data(const SpectralModel& m, ConstructedBC* bc, const SmoothProfile& u0);

struct CompatibilityReport {
  Vec given_compat;  // 4 entries (orders 0..3), prescribed equilibrium condition
  Vec b0_compat;     // 3 entries, leading boundary data vs transport jets
  Vec b1_compat;     // 3 entries, first-order data vs corner values
  Vec b2_compat;     // 3 entries, second-order data vs corner values
  Vec D_compat;      // 3 entries, layer datum jets
  Vec eps_samples;
  Mat assembled;  // rows: eps samples; cols i = 0..2: residual of the full
                  // corner condition B d_t^i (u,p)(0,0) = d_t^i b_eps(0)
  double max_residual = 0.0;
};

/// Checks every corner condition.  The assembled residuals apply the exact
/// generator (-A d/dx + S/eps) to the initial-data profiles, independently of
/// the jet formulas used to build b1/b2.
CompatibilityReport verify_relaxation_compat(const SpectralModel& m,
                                             const GivenBoundaryCondition& gbc,
                                             const ConstructedBC& bc, const SmoothProfile& u0,
                                             const Vec& eps_samples);

}  // namespace relaxbc
