#pragma once

#include <vector>

#include "relaxbc/linalg.hpp"

namespace relaxbc {

/// One additive term of a spatial profile: poly(x - center) * exp(-beta (x - center)^2).
struct ProfileTerm {
  std::vector<double> poly;  // poly[k] multiplies (x - center)^k
  double center = 0.0;
  double beta = 1.0;  // must be > 0
};

/// Vector-valued smooth spatial profile with analytic derivatives and an
/// effective support bound: the profile and its derivatives are numerically
/// zero for x >= x_max().
class SmoothProfile {
public:
  explicit SmoothProfile(int dim = 0) : comps_(static_cast<size_t>(dim)) {}

  static SmoothProfile zero(int dim) { return SmoothProfile(dim); }
  /// Single Gaussian bump amp * exp(-beta (x-center)^2) in one component.
  static SmoothProfile gaussian_bump(int dim, int comp, double amp, double center,
                                     double beta);

  int dim() const { return static_cast<int>(comps_.size()); }
  void add_term(int comp, ProfileTerm term);

  double eval(int comp, double x) const;
  Vec operator()(double x) const;

  SmoothProfile derivative() const;
  double x_max() const;

  bool structurally_zero() const;
  SmoothProfile scaled(double s) const;
  SmoothProfile& operator+=(const SmoothProfile& other);
  friend SmoothProfile operator*(const Mat& m, const SmoothProfile& p);

  const std::vector<ProfileTerm>& terms(int comp) const {
    return comps_[static_cast<size_t>(comp)];
  }

private:
  std::vector<std::vector<ProfileTerm>> comps_;
};

/// Profile with its first `depth` derivatives precomputed; immutable and
/// thread-safe.  Evaluation cost per call is one pass over the term list.
class ProfileStack {
public:
  ProfileStack() = default;
  ProfileStack(const SmoothProfile& p, int depth);

  int dim() const { return levels_.empty() ? 0 : levels_[0].dim(); }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  double x_max() const { return levels_.empty() ? 0.0 : levels_[0].x_max(); }

  Vec eval(double x, int order = 0) const;
  double eval1(int comp, double x, int order = 0) const;
  const SmoothProfile& level(int order) const { return levels_[static_cast<size_t>(order)]; }

private:
  std::vector<SmoothProfile> levels_;
};

}  // namespace relaxbc
