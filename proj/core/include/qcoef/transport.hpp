#pragma once

#include <cstddef>
#include <vector>

#include "qcoef/geometry.hpp"

namespace qcoef {

/// Finitely supported probability: distinct atoms with positive masses
/// summing to one.
struct DiscreteMeasure {
  std::vector<Point> atoms;
  std::vector<double> masses;

  std::size_t size() const { return atoms.size(); }
  /// 1 when every atom lies on the x-axis.
  int dimension() const;
  /// Throws ValidationError when the invariants fail.
  void validate(double tol = 1e-12) const;

  static DiscreteMeasure uniform(std::vector<Point> atoms);
};

struct CouplingEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  double mass = 0.0;
};

struct TransportResult {
  /// rho_r = cost^{1/r}.
  double rho = 0.0;
  /// Optimal value of sum |x - y|^r over the coupling.
  double cost = 0.0;
  std::vector<CouplingEntry> coupling;
};

/// Exact rho_r on the line through the monotone (quantile) coupling; r >= 1.
TransportResult wasserstein_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double r);

/// Largest common denominator accepted by wasserstein_assignment.
inline constexpr std::size_t kMaxAssignmentAtoms = 64;

/// Exact rho_r by splitting both measures into D equal-mass atoms (D the
/// smallest common denominator, at most 64) and solving the min-cost perfect
/// assignment with cost |x - y|^r. Any r > 0.
TransportResult wasserstein_assignment(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                       double r);

/// Minimum-cost perfect assignment on a square row-major cost matrix.
/// Returns the column assigned to each row.
std::vector<std::size_t> solve_assignment(const std::vector<double>& cost, std::size_t n);

struct DiscreteApproximation {
  DiscreteMeasure q;
  /// rho_r(P, Q); rho^r equals the n-point quantization error of P.
  double rho = 0.0;
  double cost = 0.0;
  /// Index into q.atoms for every atom of P.
  std::vector<std::size_t> cells;
};

/// Largest support accepted by best_discrete_approx.
inline constexpr std::size_t kMaxApproxAtoms = 12;

/// Best Q with at most n atoms: every partition of P's support into at most n
/// cells, each cell collapsed onto its r-center with the cell's mass.
DiscreteApproximation best_discrete_approx(const DiscreteMeasure& p, std::size_t n, double r);

}  // namespace qcoef
