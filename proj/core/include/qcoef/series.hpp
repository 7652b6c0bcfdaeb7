#pragma once

#include <cstdint>
#include <limits>

namespace qcoef {

/// A value together with a certified bound on its absolute error.
struct Enclosure {
  double value = 0.0;
  double error = 0.0;

  bool certified() const { return error < std::numeric_limits<double>::infinity(); }
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double total() const { return sum_ + comp_; }
  std::uint64_t count() const { return n_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::uint64_t n_ = 0;
};

/// Hurwitz zeta: sum_{k>=0} (a+k)^{-s} for s > 1, a > 0, via Euler-Maclaurin
/// after shifting the argument; the error bound is the first omitted
/// correction plus a rounding allowance.
Enclosure hurwitz_zeta(double s, double a);

/// The series sum_{j} A * j^{-e} * lambda^j, stored in log form so that very
/// small or very large scales do not overflow. This is the common shape of
/// p_j^q s_j^t for geometric and power-law tails.
struct PowerGeometricSeries {
  double log_scale = 0.0;  // log A
  double exponent = 0.0;   // e
  double log_base = 0.0;   // log lambda, <= 0 for convergence

  double term(std::uint64_t j) const;

  /// Convergence of the infinite tail; the boundary case lambda == 1, e <= 1
  /// and anything with lambda > 1 diverge.
  bool converges() const;

  /// sum_{j > n} term(j). Exact closed form when e == 0, a geometric
  /// ratio bound when lambda < 1, and Hurwitz zeta when lambda == 1. Returns
  /// an infinite error when no bound is available at this n (the caller
  /// should move n further out).
  Enclosure tail(std::uint64_t n) const;
};

}  // namespace qcoef
