#include "relaxbc/linalg.hpp"

#include <string>

namespace relaxbc {

double cond_estimate(const Mat& m) {
  Eigen::PartialPivLU<Mat> lu(m);
  double r = lu.rcond();
  if (r <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / r;
}

InverseResult invert_checked(const Mat& m, double cond_limit, const char* what) {
  require(m.rows() == m.cols(), errc::invalid_argument,
          std::string(what) + " must be square to invert");
  Eigen::PartialPivLU<Mat> lu(m);
  double r = lu.rcond();
  double cond = (r > 0.0) ? 1.0 / r : std::numeric_limits<double>::infinity();
  if (!(cond < cond_limit)) {
    fail(errc::singular_matrix, std::string(what) + " refused: condition estimate " +
                                    std::to_string(cond) + " exceeds limit");
  }
  return {lu.inverse(), cond};
}

int numerical_rank(const Mat& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_tol * s(0)) ++r;
  return r;
}

Mat left_annihilator(const Mat& z, AnnihilatorPolicy policy) {
  const int m = static_cast<int>(z.rows());
  const int k = static_cast<int>(z.cols());
  require(m >= k, errc::invalid_argument, "annihilator needs rows >= cols");
  if (k > 0)
    require(numerical_rank(z) == k, errc::invalid_argument,
            "annihilator input must have full column rank");
  if (policy == AnnihilatorPolicy::svd) {
    if (k == 0) return Mat::Identity(m, m);
    Eigen::JacobiSVD<Mat> svd(z, Eigen::ComputeFullU);
    return svd.matrixU().rightCols(m - k).transpose();
  }
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  return q.rightCols(m - k).transpose();
}

const char* errc_name(errc c) {
  switch (c) {
    case errc::ok: return "ok";
    case errc::invalid_argument: return "invalid argument";
    case errc::ordering: return "wave speed ordering violated";
    case errc::non_characteristic: return "boundary is characteristic";
    case errc::relaxation_speed: return "invalid relaxation speed";
    case errc::subcharacteristic: return "subcharacteristic condition violated";
    case errc::singular_matrix: return "singular or ill conditioned matrix";
    case errc::invalid_given_bc: return "invalid given boundary condition";
    case errc::degenerate_construction: return "degenerate construction";
    case errc::invalid_layer_datum: return "invalid layer datum";
    case errc::eigen_split_failure: return "eigenvalue split failure";
    case errc::reduction_failure: return "boundary reduction failure";
    case errc::constraint_violation: return "constraint violation";
    case errc::boundary_solve_failure: return "boundary solve failure";
    case errc::symmetrizer_unavailable: return "symmetrizer unavailable";
    case errc::inconclusive_study: return "inconclusive study";
    case errc::config_error: return "configuration error";
    case errc::io_error: return "io error";
    case errc::internal: return "internal error";
  }
  return "unknown";
}

}  // namespace relaxbc
