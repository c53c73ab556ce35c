#include "relaxbc/signal.hpp"

#include <cmath>

namespace relaxbc {

namespace {

bool poly_zero(const std::vector<double>& p) {
  for (double c : p)
    if (c != 0.0) return false;
  return true;
}

std::vector<double> poly_deriv(const std::vector<double>& p) {
  if (p.size() <= 1) return {};
  std::vector<double> d(p.size() - 1);
  for (size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
  return d;
}

std::vector<double> poly_axpy(double a, const std::vector<double>& x,
                              const std::vector<double>& y) {
  std::vector<double> r(std::max(x.size(), y.size()), 0.0);
  for (size_t k = 0; k < x.size(); ++k) r[k] += a * x[k];
  for (size_t k = 0; k < y.size(); ++k) r[k] += y[k];
  return r;
}

double poly_eval(const std::vector<double>& p, double t) {
  double v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * t + p[k];
  return v;
}

}  // namespace

SmoothSignal SmoothSignal::from_jet(const Mat& jet) {
  SmoothSignal s(static_cast<int>(jet.rows()));
  double fact = 1.0;
  std::vector<double> inv_fact(static_cast<size_t>(jet.cols()));
  for (int i = 0; i < jet.cols(); ++i) {
    if (i > 0) fact *= static_cast<double>(i);
    inv_fact[static_cast<size_t>(i)] = 1.0 / fact;
  }
  for (int c = 0; c < jet.rows(); ++c) {
    SignalTerm term;
    term.poly.resize(static_cast<size_t>(jet.cols()));
    for (int i = 0; i < jet.cols(); ++i)
      term.poly[static_cast<size_t>(i)] = jet(c, i) * inv_fact[static_cast<size_t>(i)];
    s.add_term(c, std::move(term));
  }
  return s;
}

void SmoothSignal::add_term(int comp, SignalTerm term) {
  require(comp >= 0 && comp < dim(), errc::invalid_argument, "signal component out of range");
  while (!term.poly.empty() && term.poly.back() == 0.0) term.poly.pop_back();
  if (poly_zero(term.poly)) return;
  comps_[static_cast<size_t>(comp)].push_back(std::move(term));
}

double SmoothSignal::eval(int comp, double t) const {
  double v = 0.0;
  for (const auto& term : comps_[static_cast<size_t>(comp)]) {
    double f = poly_eval(term.poly, t);
    if (term.rate != 0.0) f *= std::exp(term.rate * t);
    if (term.freq != 0.0 || term.phase != 0.0) f *= std::cos(term.freq * t + term.phase);
    v += f;
  }
  return v;
}

Vec SmoothSignal::operator()(double t) const {
  Vec v(dim());
  for (int c = 0; c < dim(); ++c) v(c) = eval(c, t);
  return v;
}

SmoothSignal SmoothSignal::derivative() const {
  SmoothSignal d(dim());
  for (int c = 0; c < dim(); ++c) {
    for (const auto& term : comps_[static_cast<size_t>(c)]) {
      // d/dt [p e^{rt} cos(wt+phi)] = (p' + r p) e^{rt} cos(wt+phi)
      //                               + w p e^{rt} cos(wt+phi+pi/2)
      SignalTerm t1{poly_axpy(term.rate, term.poly, poly_deriv(term.poly)), term.rate,
                    term.freq, term.phase};
      d.add_term(c, std::move(t1));
      if (term.freq != 0.0) {
        SignalTerm t2 = term;
        for (double& ck : t2.poly) ck *= term.freq;
        t2.phase += std::acos(-1.0) / 2.0;
        d.add_term(c, std::move(t2));
      }
    }
  }
  return d;
}

bool SmoothSignal::structurally_zero() const {
  for (const auto& terms : comps_)
    if (!terms.empty()) return false;
  return true;
}

SmoothSignal SmoothSignal::scaled(double s) const {
  SmoothSignal r(dim());
  if (s == 0.0) return r;
  for (int c = 0; c < dim(); ++c)
    for (auto term : comps_[static_cast<size_t>(c)]) {
      for (double& ck : term.poly) ck *= s;
      r.add_term(c, std::move(term));
    }
  return r;
}

SmoothSignal& SmoothSignal::operator+=(const SmoothSignal& other) {
  require(dim() == other.dim(), errc::invalid_argument, "signal dims differ in +");
  for (int c = 0; c < dim(); ++c)
    for (const auto& term : other.comps_[static_cast<size_t>(c)]) add_term(c, term);
  return *this;
}

SmoothSignal operator*(const Mat& m, const SmoothSignal& s) {
  require(static_cast<int>(m.cols()) == s.dim(), errc::invalid_argument,
          "matrix/signal dim mismatch");
  SmoothSignal r(static_cast<int>(m.rows()));
  for (int i = 0; i < m.rows(); ++i)
    for (int k = 0; k < m.cols(); ++k) {
      if (m(i, k) == 0.0) continue;
      for (auto term : s.terms(k)) {
        for (double& ck : term.poly) ck *= m(i, k);
        r.add_term(i, std::move(term));
      }
    }
  return r;
}

SignalStack::SignalStack(const SmoothSignal& s, int depth) {
  levels_.reserve(static_cast<size_t>(depth) + 1);
  levels_.push_back(s);
  for (int k = 0; k < depth; ++k) levels_.push_back(levels_.back().derivative());
}

Vec SignalStack::eval(double t, int order) const {
  require(order >= 0 && order < static_cast<int>(levels_.size()), errc::invalid_argument,
          "signal derivative order not precomputed");
  return levels_[static_cast<size_t>(order)](t);
}

double SignalStack::eval1(int comp, double t, int order) const {
  require(order >= 0 && order < static_cast<int>(levels_.size()), errc::invalid_argument,
          "signal derivative order not precomputed");
  return levels_[static_cast<size_t>(order)].eval(comp, t);
}

}  // namespace relaxbc
