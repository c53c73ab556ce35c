#pragma once

#include <vector>

#include "relaxbc/bc_construct.hpp"
#include "relaxbc/compat.hpp"
#include "relaxbc/linalg.hpp"
#include "relaxbc/model.hpp"

namespace relaxbc {

/// Uniform cell-centered grid on [0, X] with CFL-limited uniform time steps.
/// The step actually used is t_star / ceil(t_star / (cfl dx / max_j sqrt(a_j)))
/// so the final time is hit exactly and the CFL number is never exceeded.
struct Grid1D {
  double X = 1.0;
  int N = 100;
  double cfl = 0.8;   // in (0, 1]
  double t_star = 1.0;
  int snapshot_stride = 0;  // 0: keep initial and final states only

  double dx() const { return X / N; }
};

/// Characteristic transform of the 2n x 2n system: c = L (u; p) decouples the
/// convective part into scalar advections, L A L^{-1} = diag(s, -s) with
/// s_j = sqrt(a_j).  Rows 0..n-1 move right (+s), rows n..2n-1 move left (-s).
struct CharacteristicFrame {
  int n = 0;
  Mat L;
  Mat Linv;
  Vec speeds;  // (s_1..s_n, -s_1..-s_n)
};

CharacteristicFrame characteristic_frame(const SpectralModel& m);

/// Energy matrix A0 = blockdiag(T^-T (Abar - Lambda^2) T^-1, T^-T T^-1);
/// symmetric positive definite with A0 A symmetric.  Throws
/// errc::symmetrizer_unavailable unless the model is strictly
/// subcharacteristic.
Mat symmetrizer(const SpectralModel& m);

enum class RelaxationMode {
  exact,       // p <- p exp(-dt/eps), the exact source solution
  off,         // source disabled: plain hyperbolic system
  projection,  // p <- 0 each step: the eps -> 0 limit of the scheme
};

struct SolverOptions {
  int order = 2;  // 1: upwind, 2: linear reconstruction with central slopes
  RelaxationMode relaxation = RelaxationMode::exact;
  bool transport = true;  // false isolates the relaxation substep
};

/// Cell-centered space-time samples of (u, p) plus the per-step energy trace.
/// Norms are composite-midpoint over the cells; H^1 uses second-order
/// differences, one-sided at the boundaries.
class GridSolution {
public:
  GridSolution() = default;
  GridSolution(int n, const Grid1D& grid, double dt, double eps = 0.0);

  int n() const { return n_; }
  int cells() const { return N_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  /// Relaxation rate of the producing run; 0 for hand-assembled solutions.
  double eps() const { return eps_; }
  double x_center(int i) const { return (i + 0.5) * dx_; }

  int snapshots() const { return static_cast<int>(times_.size()); }
  double time(int k) const { return times_[static_cast<size_t>(k)]; }
  /// 2n x N matrix, column i is (u; p) at cell i.
  const Mat& field(int k) const { return fields_[static_cast<size_t>(k)]; }
  /// Snapshot index with |time - t| <= max(dt/2, 1e-12); throws
  /// errc::invalid_argument when no stored state is that close.
  int index_at(double t) const;

  void push(double t, const Mat& state);

  /// Discrete L2 norm of a 2n x N (or any row-count) cell field
  /// (composite midpoint over the cells).
  static double l2_norm(const Mat& field, double dx);
  /// Full H1 norm: sqrt(L2^2 + |d/dx|^2) with second-order differences.
  static double h1_norm(const Mat& field, double dx);

  /// Per-step energy sum_i (u,p)_i^T A0 (u,p)_i dx recorded after every full
  /// step (entry 0 is the initial state).  Empty when the model is not
  /// strictly subcharacteristic.
  const std::vector<double>& energy_trace() const { return energy_; }
  std::vector<double>& energy_trace() { return energy_; }

private:
  int n_ = 0;
  int N_ = 0;
  double dx_ = 0.0;
  double dt_ = 0.0;
  double eps_ = 0.0;
  std::vector<double> times_;
  std::vector<Mat> fields_;
  std::vector<double> energy_;
};

/// Strang-split characteristic scheme for the stiff relaxation system on
/// [0, X]: half transport, exact relaxation, half transport.  Transport is
/// first- or second-order upwind on the characteristic variables; the left
/// boundary state solves the 2n x 2n system {B (u,p)(0) = b0 + eps b1 +
/// eps^2 b2 at the substep midpoint time; outgoing characteristics
/// extrapolated from the interior}; the right boundary copies the last cell
/// and must stay inactive (enforced through the support margin below).
///
/// Throws errc::config_error when the grid is invalid or the initial support
/// plus t_star * max speed reaches the right boundary, and
/// errc::boundary_solve_failure when the boundary system is numerically
/// singular (the construction was not certified in that case).
GridSolution run_stiff(const SpectralModel& m, const ConstructedBC& bc,
                       const RelaxationInitialData& init, const Grid1D& grid, double eps,
                       const SolverOptions& opts = SolverOptions());

/// Same scheme starting from an explicit cell state (2n x N, column i is
/// (u; p) at cell i).  No support check runs: the caller owns the validity of
/// the copying right boundary (exact for states constant near x = X).
GridSolution run_stiff_state(const SpectralModel& m, const ConstructedBC& bc, const Mat& state0,
                             const Grid1D& grid, double eps,
                             const SolverOptions& opts = SolverOptions());

}  // namespace relaxbc
