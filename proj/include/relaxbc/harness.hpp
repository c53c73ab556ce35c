#pragma once

#include <string>
#include <vector>

#include "relaxbc/asymptotics.hpp"
#include "relaxbc/bc_construct.hpp"
#include "relaxbc/model.hpp"
#include "relaxbc/profile.hpp"
#include "relaxbc/stiff_solver.hpp"

namespace relaxbc {

enum class StudyNorm {
  L2,          // stacked (u, p) difference to the two-term expansion
  H1,          // same difference in the discrete H1 norm
  L2_vs_u0bar  // u block against the leading outer solution alone
};

const char* study_norm_name(StudyNorm n);

/// Cell-count rule N(eps) = max(n_min, ceil(X * coeff * eps^-exponent)).
/// The default keeps the second-order discretization error below the
/// eps^(3/2) signal; trust comes from the per-row refinement check, not from
/// this formula.
struct GridPolicy {
  int n_min = 2000;
  double coeff = 1.0;
  double exponent = 0.9;

  int cells(double X, double eps) const;
};

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;
};

/// Discrete norms of (grid - asymptotic) at the stored snapshot nearest t.
/// The reference is evaluated at the cell centers at the snapshot's exact
/// time with the run's eps.  Throws errc::invalid_argument when t lies
/// outside the run window or the solution carries no relaxation rate.
ErrorNorms error_norms(const GridSolution& gs, const AsymptoticSolution& asym, double t);

/// L2 distance of the u block to the equilibrium solution u0_bar at the
/// snapshot nearest t.  Same domain conditions as error_norms.
double error_vs_u0bar(const GridSolution& gs, const AsymptoticSolution& asym, double t);

/// One convergence experiment: a fixed certified problem, a decreasing eps
/// list, and the measurement policy.  The solver runs to sample_time (at
/// most grid.t_star) and the per-eps error is the max over about
/// time_samples stored snapshots, the finite stand-in for the sup over the
/// time window.
struct ExperimentSpec {
  std::string preset = "custom";  // report label
  SpectralModel model;
  GivenBoundaryCondition given;
  ConstructedBC bc;
  SmoothProfile u0;

  std::vector<double> eps;  // strictly decreasing, positive
  GridPolicy policy;
  Grid1D grid;  // X, cfl, t_star; N per eps comes from the policy
  std::vector<StudyNorm> norms{StudyNorm::L2, StudyNorm::H1};
  double sample_time = 0.5;
  int time_samples = 5;
  SolverOptions solver;
  unsigned jobs = 0;  // worker threads for the per-eps runs; 0: hardware
};

/// Refinement gate: a row is trusted when halving dx moves the error by
/// less than this fraction.
inline constexpr double kRefineTol = 0.05;

struct RateRow {
  double eps = 0.0;
  int cells = 0;               // base resolution
  double error = 0.0;          // max over sampled snapshots
  double refined_error = 0.0;  // same run at dx/2
  double rel_change = 0.0;     // |error - refined| / refined
  bool trusted = false;        // rel_change < kRefineTol
};

struct RateSeries {
  StudyNorm norm = StudyNorm::L2;
  std::vector<RateRow> rows;       // one per eps, in spec order
  std::vector<double> pair_rates;  // observed order between consecutive rows
  double slope = 0.0;              // least squares over trusted rows
  double slope_drop_largest = 0.0;  // same without the largest trusted eps; NaN if < 3 rows
  bool monotone = false;           // trusted errors strictly decreasing
};

struct RateTable {
  std::string preset;
  double sample_time = 0.0;
  int time_samples = 0;
  std::vector<RateSeries> series;
};

/// Runs the full study: validates the spec, re-certifies the boundary
/// condition (GKC PASS required) and the corner compatibility of the data,
/// then solves base + dx-halved grids per eps and fits slopes from the
/// trusted rows.  Throws errc::inconclusive_study when a requested norm ends
/// with fewer than two trusted rows.
RateTable convergence_study(const ExperimentSpec& spec);

/// Deterministic renderings of a table; emit_report writes them to files.
/// CSV: one data row per (norm, eps) plus a '#'-prefixed slope footer per
/// series.  JSON: the same content with stable key order.  SVG: log-log
/// error plot, hollow markers on untrusted rows.
std::string render_csv(const RateTable& table);
std::string render_json(const RateTable& table);
std::string render_svg(const RateTable& table);

/// Writes CSV + JSON (always) and SVG when svg_path is non-empty.  Throws
/// errc::io_error when a file cannot be written.
void emit_report(const RateTable& table, const std::string& csv_path,
                 const std::string& json_path, const std::string& svg_path = "");

/// Acceptance band for a fitted slope.  The estimates are upper bounds: a
/// slope above the band can be flagged without failing when above_passes is
/// set (decay faster than required), below the band always fails.
struct SlopeBand {
  double lo = 0.0;
  double hi = 0.0;
  bool above_passes = false;
};

enum class BandVerdict { pass, flagged_above, fail };

BandVerdict judge_slope(double slope, const SlopeBand& band);

}  // namespace relaxbc
