#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcoef/ifs.hpp"

namespace qcoef {

/// Truncated evaluation of P(q,t) = log sum_j p_j^q s_j^t.
struct PressureValue {
  double value = 0.0;
  /// Bound on |value - P(q,t)| from the omitted tail (pushed through the
  /// logarithm) plus rounding.
  double tail_bound = 0.0;
  std::uint64_t terms_used = 0;
};

/// Convergence abscissa of t -> sum_j p_j^q s_j^t. -inf for finite systems or
/// when the sum converges for every t; +inf when it never converges.
double theta(const InfiniteIFS& system, double q);

/// Pressure with the first n terms summed explicitly and the rest taken from
/// the family's closed-form tail. Requires t > theta(q).
PressureValue pressure_with_terms(const InfiniteIFS& system, double q, double t, std::uint64_t n);

/// Pressure to within tol; the explicit prefix grows until the tail bound is
/// below tol.
PressureValue pressure(const InfiniteIFS& system, double q, double t, double tol = 1e-12);

/// Unique zero t = beta(q) of P(q, .) for q in [0,1].
double beta(const InfiniteIFS& system, double q, double tol = 1e-10);

/// Unique q_r in (0,1) with beta(q_r) = r q_r.
double solve_q_r(const InfiniteIFS& system, double r, double tol = 1e-10);

struct DimensionResult {
  double r = 0.0;
  double kappa = 0.0;
  /// |sum_j (p_j s_j^r)^{kappa/(r+kappa)} - 1| at the returned kappa.
  double residual = 0.0;
  double tail_bound = 0.0;
  double eta = 0.0;
  double q_r = 0.0;
  /// beta(q_r) / (1 - q_r).
  double kappa_via_beta = 0.0;
};

/// kappa_r from the sum equation, cross-checked against beta(q_r)/(1-q_r).
/// Throws BudgetError if the two routes disagree by more than 10 * tol.
DimensionResult quantization_dimension(const InfiniteIFS& system, double r, double tol = 1e-10,
                                       bool cross_check = true);

/// sum_j (p_j s_j^r)^eta, i.e. exp P(eta, r eta).
PressureValue exponent_sum(const InfiniteIFS& system, double r, double eta, double tol = 1e-13);

struct TemperatureCurve {
  std::vector<double> q_grid;
  std::vector<double> beta_values;
  double tolerance = 0.0;
  bool strictly_decreasing = false;
  bool midpoint_convex = false;
  /// min_i (beta_i - beta_{i+1}); positive when strictly decreasing.
  double min_decrease = 0.0;
  /// min over grid triples of beta(q1)/2 + beta(q2)/2 - beta((q1+q2)/2).
  double min_convexity_residual = 0.0;
  std::vector<std::string> diagnostics;
};

TemperatureCurve temperature_curve(const InfiniteIFS& system, std::span<const double> grid,
                                   double tol = 1e-10);

/// Evenly spaced grid with `points` entries over [0,1].
std::vector<double> unit_grid(std::size_t points);

/// Checks that for each q on a grid over [0,1] some u gives 0 <= P(q,u) < inf.
/// Throws ValidationError otherwise.
void require_pressure_condition(const InfiniteIFS& system, std::size_t grid_points = 11);

}  // namespace qcoef
