#pragma once

#include <vector>

#include "relaxbc/linalg.hpp"

namespace relaxbc {

/// One additive term of a smooth time signal: poly(t) * exp(rate*t) * cos(freq*t + phase).
struct SignalTerm {
  std::vector<double> poly;  // poly[k] multiplies t^k
  double rate = 0.0;
  double freq = 0.0;
  double phase = 0.0;
};

/// Vector-valued smooth signal on t >= 0, closed under differentiation,
/// addition and matrix application.  Used for boundary data and their jets.
class SmoothSignal {
public:
  explicit SmoothSignal(int dim = 0) : comps_(static_cast<size_t>(dim)) {}

  static SmoothSignal zero(int dim) { return SmoothSignal(dim); }

  /// Polynomial signal matching the given jet at t = 0: column i of `jet`
  /// becomes the i-th derivative at 0, so p(t) = sum_i jet.col(i) t^i / i!.
  static SmoothSignal from_jet(const Mat& jet);

  int dim() const { return static_cast<int>(comps_.size()); }

  void add_term(int comp, SignalTerm term);

  double eval(int comp, double t) const;
  Vec operator()(double t) const;

  SmoothSignal derivative() const;

  /// True when no term survives compaction (the exact zero signal).
  bool structurally_zero() const;

  SmoothSignal scaled(double s) const;
  SmoothSignal& operator+=(const SmoothSignal& other);
  friend SmoothSignal operator+(SmoothSignal a, const SmoothSignal& b) {
    a += b;
    return a;
  }
  /// Component-wise linear map: (m * s)(t) = m * s(t).
  friend SmoothSignal operator*(const Mat& m, const SmoothSignal& s);

  const std::vector<SignalTerm>& terms(int comp) const {
    return comps_[static_cast<size_t>(comp)];
  }

private:
  std::vector<std::vector<SignalTerm>> comps_;
};

/// A signal bundled with its first `depth` derivatives, precomputed once.
/// Immutable afterwards, safe to share across threads.
class SignalStack {
public:
  SignalStack() = default;
  SignalStack(const SmoothSignal& s, int depth);

  int dim() const { return levels_.empty() ? 0 : levels_[0].dim(); }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }

  Vec eval(double t, int order = 0) const;
  double eval1(int comp, double t, int order = 0) const;
  const SmoothSignal& level(int order) const { return levels_[static_cast<size_t>(order)]; }

private:
  std::vector<SmoothSignal> levels_;
};

}  // namespace relaxbc
