#include "relaxbc/stiff_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace relaxbc {

CharacteristicFrame characteristic_frame(const SpectralModel& m) {
  const int n = m.n;
  const Vec s = m.sqrt_a();
  CharacteristicFrame f;
  f.n = n;
  f.speeds = Vec(2 * n);
  f.speeds.head(n) = s;
  f.speeds.tail(n) = -s;

  // c_j+- = (lambda_j +- s_j) (T^-1 u)_j + (T^-1 p)_j.
  f.L = Mat(2 * n, 2 * n);
  f.L.topLeftCorner(n, n) = (m.lambda + s).asDiagonal() * m.Tinv;
  f.L.topRightCorner(n, n) = m.Tinv;
  f.L.bottomLeftCorner(n, n) = (m.lambda - s).asDiagonal() * m.Tinv;
  f.L.bottomRightCorner(n, n) = m.Tinv;

  // u = T (c+ - c-) / (2s), p = T ((s-lambda) c+ + (s+lambda) c-) / (2s).
  const Vec half = (2.0 * s).cwiseInverse();
  f.Linv = Mat(2 * n, 2 * n);
  f.Linv.topLeftCorner(n, n) = m.T * half.asDiagonal();
  f.Linv.topRightCorner(n, n) = -f.Linv.topLeftCorner(n, n);
  f.Linv.bottomLeftCorner(n, n) = m.T * ((s - m.lambda).cwiseProduct(half)).asDiagonal();
  f.Linv.bottomRightCorner(n, n) = m.T * ((s + m.lambda).cwiseProduct(half)).asDiagonal();
  return f;
}

Mat symmetrizer(const SpectralModel& m) {
  require(subcharacteristic_status(m) == SubcharStatus::strict, errc::symmetrizer_unavailable,
          "energy matrix needs a strictly subcharacteristic model");
  const Mat w = (m.a - m.lambda.cwiseProduct(m.lambda)).asDiagonal();
  Mat a0 = Mat::Zero(2 * m.n, 2 * m.n);
  a0.topLeftCorner(m.n, m.n) = m.Tinv.transpose() * w * m.Tinv;
  a0.bottomRightCorner(m.n, m.n) = m.Tinv.transpose() * m.Tinv;
  return a0;
}

GridSolution::GridSolution(int n, const Grid1D& grid, double dt, double eps)
    : n_(n), N_(grid.N), dx_(grid.dx()), dt_(dt), eps_(eps) {}

void GridSolution::push(double t, const Mat& state) {
  times_.push_back(t);
  fields_.push_back(state);
}

int GridSolution::index_at(double t) const {
  const double tol = std::max(0.5 * dt_, 1e-12);
  int best = -1;
  double best_gap = tol;
  for (int k = 0; k < snapshots(); ++k) {
    const double gap = std::abs(times_[static_cast<size_t>(k)] - t);
    if (gap <= best_gap) {
      best = k;
      best_gap = gap;
    }
  }
  require(best >= 0, errc::invalid_argument,
          "no snapshot stored within half a step of t = " + std::to_string(t));
  return best;
}

double GridSolution::l2_norm(const Mat& field, double dx) {
  // Composite midpoint: cell i carries its full cell, so [0, X] is covered
  // exactly and wall-concentrated layers lose no half-cell mass.
  double acc = 0.0;
  for (int i = 0; i < field.cols(); ++i) acc += field.col(i).squaredNorm();
  return std::sqrt(acc * dx);
}

double GridSolution::h1_norm(const Mat& field, double dx) {
  const int N = static_cast<int>(field.cols());
  if (N < 3) return l2_norm(field, dx);
  Mat der(field.rows(), N);
  der.col(0) = (-3.0 * field.col(0) + 4.0 * field.col(1) - field.col(2)) / (2.0 * dx);
  for (int i = 1; i + 1 < N; ++i) der.col(i) = (field.col(i + 1) - field.col(i - 1)) / (2.0 * dx);
  der.col(N - 1) = (3.0 * field.col(N - 1) - 4.0 * field.col(N - 2) + field.col(N - 3)) / (2.0 * dx);
  const double l2 = l2_norm(field, dx);
  const double semi = l2_norm(der, dx);
  return std::sqrt(l2 * l2 + semi * semi);
}

namespace {

// One update of a single characteristic row by nu <= 1 cell widths: linear
// reconstruction with slope delta per cell, exact advection of the
// reconstruction.  ghost / ghost_slope describe the cell behind the inflow
// end; slopes are one-sided in the cells adjacent to both ends so a ghost
// value never enters twice.
void advect_row(std::vector<double>& c, std::vector<double>& d, double nu, bool to_right,
                int order, double ghost, double ghost_slope) {
  const size_t N = c.size();
  if (order >= 2) {
    d[0] = c[1] - c[0];
    for (size_t i = 1; i + 1 < N; ++i) d[i] = 0.5 * (c[i + 1] - c[i - 1]);
    d[N - 1] = c[N - 1] - c[N - 2];
  } else {
    std::fill(d.begin(), d.end(), 0.0);
  }
  const double f = 0.5 * nu * (1.0 - nu);
  if (to_right) {
    for (size_t i = N - 1; i >= 1; --i) c[i] -= nu * (c[i] - c[i - 1]) + f * (d[i] - d[i - 1]);
    c[0] -= nu * (c[0] - ghost) + f * (d[0] - ghost_slope);
  } else {
    for (size_t i = 0; i + 1 < N; ++i) c[i] += nu * (c[i + 1] - c[i]) + f * (d[i] - d[i + 1]);
    c[N - 1] += nu * (ghost - c[N - 1]) + f * (d[N - 1] - ghost_slope);
  }
}

}  // namespace

GridSolution run_stiff(const SpectralModel& m, const ConstructedBC& bc,
                       const RelaxationInitialData& init, const Grid1D& grid, double eps,
                       const SolverOptions& opts) {
  const int n = m.n;
  require(init.u0.dim() == n, errc::config_error, "initial datum dimension mismatch");
  require(grid.N >= 4, errc::config_error, "grid needs at least 4 cells");
  require(grid.X > 0.0, errc::config_error, "grid extents must be positive");

  if (opts.transport) {
    const double smax = m.sqrt_a().maxCoeff();
    double support = init.u0.x_max();
    if (init.p1.dim() == n) support = std::max(support, init.p1.x_max());
    if (init.p2.dim() == n) support = std::max(support, init.p2.x_max());
    require(grid.X >= support + grid.t_star * smax + 2.0 * grid.dx(), errc::config_error,
            "initial support plus wave travel reaches the right boundary");
  }

  const SmoothProfile p1 = init.p1.dim() == n ? init.p1 : SmoothProfile::zero(n);
  const SmoothProfile p2 = init.p2.dim() == n ? init.p2 : SmoothProfile::zero(n);
  Mat state0(2 * n, grid.N);
  for (int i = 0; i < grid.N; ++i) {
    const double x = (i + 0.5) * grid.dx();
    state0.col(i).head(n) = init.u0(x);
    state0.col(i).tail(n) = eps * p1(x) + eps * eps * p2(x);
  }
  return run_stiff_state(m, bc, state0, grid, eps, opts);
}

GridSolution run_stiff_state(const SpectralModel& m, const ConstructedBC& bc, const Mat& state0,
                             const Grid1D& grid, double eps, const SolverOptions& opts) {
  const int n = m.n;
  require(grid.N >= 4, errc::config_error, "grid needs at least 4 cells");
  require(grid.X > 0.0 && grid.t_star >= 0.0, errc::config_error,
          "grid extents must be positive");
  require(grid.cfl > 0.0 && grid.cfl <= 1.0, errc::config_error, "cfl must lie in (0, 1]");
  require(eps > 0.0, errc::config_error, "relaxation rate must be positive");
  require(opts.order == 1 || opts.order == 2, errc::config_error, "transport order is 1 or 2");
  require(state0.rows() == 2 * n && state0.cols() == grid.N, errc::config_error,
          "initial state must be 2n x N");
  require(!opts.transport || bc.b0.dim() == n, errc::config_error,
          "boundary data must have n components");

  const Vec s = m.sqrt_a();
  const double smax = s.maxCoeff();
  const double dx = grid.dx();
  const double dt_cfl = grid.cfl * dx / smax;
  const int steps =
      grid.t_star > 0.0 ? static_cast<int>(std::ceil(grid.t_star / dt_cfl - 1e-9)) : 0;
  const double dt = steps > 0 ? grid.t_star / steps : dt_cfl;
  const double tau = 0.5 * dt;

  const CharacteristicFrame frame = characteristic_frame(m);
  const bool strict = subcharacteristic_status(m) == SubcharStatus::strict;

  // Left boundary operator: n data rows B = (Bu, Bp) over the n outgoing rows
  // of L.  Invertibility is a consequence of the certified construction.
  Mat bdry = Mat::Identity(2 * n, 2 * n);
  if (opts.transport) {
    require(bc.Bu.rows() == n && bc.Bu.cols() == n && bc.Bp.rows() == n && bc.Bp.cols() == n,
            errc::config_error, "boundary blocks must be n x n");
    bdry.topLeftCorner(n, n) = bc.Bu;
    bdry.topRightCorner(n, n) = bc.Bp;
    bdry.bottomRows(n) = frame.L.bottomRows(n);
    if (cond_estimate(bdry) > kCondLimit)
      fail(errc::boundary_solve_failure,
           "discrete boundary system singular; the boundary condition is not certifiable");
  }
  const Eigen::PartialPivLU<Mat> bdry_lu(bdry);

  const bool has_b1 = bc.b1.dim() == n;
  const bool has_b2 = bc.b2.dim() == n;
  const auto b_eps = [&](double t) {
    Vec b = bc.b0(t);
    if (has_b1) b += eps * bc.b1(t);
    if (has_b2) b += eps * eps * bc.b2(t);
    return b;
  };

  // State in characteristic variables, one contiguous row per component.
  std::vector<std::vector<double>> c(static_cast<size_t>(2 * n),
                                     std::vector<double>(static_cast<size_t>(grid.N)));
  std::vector<double> scratch(static_cast<size_t>(grid.N));
  for (int i = 0; i < grid.N; ++i) {
    const Vec ci = frame.L * state0.col(i);
    for (int r = 0; r < 2 * n; ++r) c[static_cast<size_t>(r)][static_cast<size_t>(i)] = ci(r);
  }

  const auto gather = [&]() {
    Mat state(2 * n, grid.N);
    Vec ci(2 * n);
    for (int i = 0; i < grid.N; ++i) {
      for (int r = 0; r < 2 * n; ++r) ci(r) = c[static_cast<size_t>(r)][static_cast<size_t>(i)];
      state.col(i) = frame.Linv * ci;
    }
    return state;
  };

  // The A0 energy is diagonal in characteristic variables: the density
  // (a - lambda^2) u_hat^2 + p_hat^2 equals w+ (c+)^2 + w- (c-)^2 with
  // w+- = (s -+ lambda) / (2s); the cross terms cancel exactly.
  const auto char_energy = [&]() {
    double e = 0.0;
    for (int j = 0; j < n; ++j) {
      const double wp = 0.5 * (s(j) - m.lambda(j)) / s(j);
      const double wm = 0.5 * (s(j) + m.lambda(j)) / s(j);
      const std::vector<double>& cp = c[static_cast<size_t>(j)];
      const std::vector<double>& cm = c[static_cast<size_t>(n + j)];
      for (int i = 0; i < grid.N; ++i) {
        const double vp = cp[static_cast<size_t>(i)];
        const double vm = cm[static_cast<size_t>(i)];
        e += wp * vp * vp + wm * vm * vm;
      }
    }
    return e * dx;
  };

  GridSolution out(n, grid, dt, eps);
  out.push(0.0, gather());
  if (strict) out.energy_trace().push_back(char_energy());

  const auto transport = [&](double t_mid) {
    // Wall state from the boundary data at the substep midpoint and the
    // outgoing characteristics extrapolated to the wall.
    Vec rhs(2 * n);
    rhs.head(n) = b_eps(t_mid);
    for (int j = 0; j < n; ++j) {
      const std::vector<double>& row = c[static_cast<size_t>(n + j)];
      rhs(n + j) = opts.order == 2 ? 1.5 * row[0] - 0.5 * row[1] : row[0];
    }
    const Vec wall = bdry_lu.solve(rhs);
    const Vec cw = frame.L * wall;

    for (int r = 0; r < 2 * n; ++r) {
      const double nu = std::abs(frame.speeds(r)) * tau / dx;
      std::vector<double>& row = c[static_cast<size_t>(r)];
      if (frame.speeds(r) > 0.0) {
        const double ghost = 2.0 * cw(r) - row[0];
        advect_row(row, scratch, nu, true, opts.order, ghost,
                   opts.order == 2 ? row[0] - ghost : 0.0);
      } else {
        advect_row(row, scratch, nu, false, opts.order, row[static_cast<size_t>(grid.N - 1)],
                   0.0);
      }
    }
  };

  const double decay = opts.relaxation == RelaxationMode::exact
                           ? std::exp(-dt / eps)
                           : (opts.relaxation == RelaxationMode::projection ? 0.0 : 1.0);

  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    if (opts.transport) transport(t + 0.5 * tau);
    if (opts.relaxation != RelaxationMode::off) {
      // p_hat <- decay * p_hat with u_hat untouched: both c+- shift by
      // (decay - 1) p_hat, p_hat = w+ c+ + w- c- as in the energy density.
      for (int j = 0; j < n; ++j) {
        std::vector<double>& cp = c[static_cast<size_t>(j)];
        std::vector<double>& cm = c[static_cast<size_t>(n + j)];
        const double wp = 0.5 * (s(j) - m.lambda(j)) / s(j);
        const double wm = 0.5 * (s(j) + m.lambda(j)) / s(j);
        for (int i = 0; i < grid.N; ++i) {
          const double phat = wp * cp[static_cast<size_t>(i)] + wm * cm[static_cast<size_t>(i)];
          const double shift = (decay - 1.0) * phat;
          cp[static_cast<size_t>(i)] += shift;
          cm[static_cast<size_t>(i)] += shift;
        }
      }
    }
    if (opts.transport) transport(t + dt - 0.5 * tau);

    if (strict) out.energy_trace().push_back(char_energy());
    const bool snap = (k + 1 == steps) ||
                      (grid.snapshot_stride > 0 && (k + 1) % grid.snapshot_stride == 0);
    if (snap) out.push((k + 1) * dt, gather());
  }
  return out;
}

}  // namespace relaxbc
