#include "relaxbc/profile.hpp"

#include <cmath>

namespace relaxbc {

namespace {

double poly_eval(const std::vector<double>& p, double y) {
  double v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * y + p[k];
  return v;
}

double poly_abs_eval(const std::vector<double>& p, double y) {
  double v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * y + std::abs(p[k]);
  return v;
}

// Smallest R with (1 + 2 beta R)^6 * |poly|(R) * exp(-beta R^2) below 1e-30,
// so that several more differentiations still vanish past the bound.
double term_reach(const ProfileTerm& t) {
  double s = 60.0;
  for (int iter = 0; iter < 64; ++iter) {
    double r = std::sqrt(s / t.beta);
    double margin = std::pow(1.0 + 2.0 * t.beta * r, 6) * poly_abs_eval(t.poly, r);
    if (std::log(std::max(margin, 1e-300)) - s < std::log(1e-30)) return r;
    s += 20.0;
  }
  return std::sqrt(s / t.beta);
}

}  // namespace

SmoothProfile SmoothProfile::gaussian_bump(int dim, int comp, double amp, double center,
                                           double beta) {
  SmoothProfile p(dim);
  p.add_term(comp, ProfileTerm{{amp}, center, beta});
  return p;
}

void SmoothProfile::add_term(int comp, ProfileTerm term) {
  require(comp >= 0 && comp < dim(), errc::invalid_argument, "profile component out of range");
  require(term.beta > 0.0, errc::invalid_argument, "profile width beta must be positive");
  while (!term.poly.empty() && term.poly.back() == 0.0) term.poly.pop_back();
  bool zero = true;
  for (double c : term.poly)
    if (c != 0.0) zero = false;
  if (zero) return;
  comps_[static_cast<size_t>(comp)].push_back(std::move(term));
}

double SmoothProfile::eval(int comp, double x) const {
  double v = 0.0;
  for (const auto& term : comps_[static_cast<size_t>(comp)]) {
    double y = x - term.center;
    v += poly_eval(term.poly, y) * std::exp(-term.beta * y * y);
  }
  return v;
}

Vec SmoothProfile::operator()(double x) const {
  Vec v(dim());
  for (int c = 0; c < dim(); ++c) v(c) = eval(c, x);
  return v;
}

SmoothProfile SmoothProfile::derivative() const {
  SmoothProfile d(dim());
  for (int c = 0; c < dim(); ++c)
    for (const auto& term : comps_[static_cast<size_t>(c)]) {
      // d/dx [q(y) e^{-beta y^2}] = (q'(y) - 2 beta y q(y)) e^{-beta y^2}
      std::vector<double> q(term.poly.size() + 1, 0.0);
      for (size_t k = 1; k < term.poly.size(); ++k)
        q[k - 1] += term.poly[k] * static_cast<double>(k);
      for (size_t k = 0; k < term.poly.size(); ++k) q[k + 1] -= 2.0 * term.beta * term.poly[k];
      d.add_term(c, ProfileTerm{std::move(q), term.center, term.beta});
    }
  return d;
}

double SmoothProfile::x_max() const {
  double xm = 0.0;
  for (const auto& terms : comps_)
    for (const auto& term : terms) xm = std::max(xm, term.center + term_reach(term));
  return xm;
}

bool SmoothProfile::structurally_zero() const {
  for (const auto& terms : comps_)
    if (!terms.empty()) return false;
  return true;
}

SmoothProfile SmoothProfile::scaled(double s) const {
  SmoothProfile r(dim());
  if (s == 0.0) return r;
  for (int c = 0; c < dim(); ++c)
    for (auto term : comps_[static_cast<size_t>(c)]) {
      for (double& ck : term.poly) ck *= s;
      r.add_term(c, std::move(term));
    }
  return r;
}

SmoothProfile& SmoothProfile::operator+=(const SmoothProfile& other) {
  require(dim() == other.dim(), errc::invalid_argument, "profile dims differ in +");
  for (int c = 0; c < dim(); ++c)
    for (const auto& term : other.comps_[static_cast<size_t>(c)]) add_term(c, term);
  return *this;
}

SmoothProfile operator*(const Mat& m, const SmoothProfile& p) {
  require(static_cast<int>(m.cols()) == p.dim(), errc::invalid_argument,
          "matrix/profile dim mismatch");
  SmoothProfile r(static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) {
      if (m(i, k) == 0.0) continue;
      for (auto term : p.terms(k)) {
        for (double& ck : term.poly) ck *= m(i, k);
        r.add_term(i, std::move(term));
      }
    }
  return r;
}

ProfileStack::ProfileStack(const SmoothProfile& p, int depth) {
  levels_.reserve(static_cast<size_t>(depth) + 1);
  levels_.push_back(p);
  for (int k = 0; k < depth; ++k) levels_.push_back(levels_.back().derivative());
}

Vec ProfileStack::eval(double x, int order) const {
  require(order >= 0 && order < static_cast<int>(levels_.size()), errc::invalid_argument,
          "profile derivative order not precomputed");
  return levels_[static_cast<size_t>(order)](x);
}

double ProfileStack::eval1(int comp, double x, int order) const {
  require(order >= 0 && order < static_cast<int>(levels_.size()), errc::invalid_argument,
          "profile derivative order not precomputed");
  return levels_[static_cast<size_t>(order)].eval(comp, x);
}

}  // namespace relaxbc
