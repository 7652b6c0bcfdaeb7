#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qcoef/errors.hpp"
#include "qcoef/geometry.hpp"
#include "qcoef/sampler.hpp"

namespace qcoef {

enum class Provenance { lloyd, constructive, user };
std::string to_string(Provenance p);

/// Finite center set of order r with a Monte-Carlo distortion estimate.
struct Quantizer {
  std::vector<Point> centers;
  double r = 2.0;
  double distortion_estimate = 0.0;
  double distortion_stderr = 0.0;
  Provenance provenance = Provenance::user;
  /// Distortion after each assignment step of the winning Lloyd run.
  std::vector<double> history;
  std::size_t iterations = 0;
  std::vector<std::string> warnings;
};

struct DistortionEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// |x|^r with exact fast paths for r = 1, 2.
double rpow(double d, double r);

/// The r-center argmin_c sum_i w_i |x_i - c|^r raised when the iteration cap
/// is hit; carries the best iterate found.
class CenterBudgetError : public BudgetError {
 public:
  CenterBudgetError(const std::string& what, Point best) : BudgetError(what), best_(best) {}
  Point best() const { return best_; }

 private:
  Point best_;
};

/// argmin_c sum_i w_i |x_i - c|^r. Empty weights mean uniform weights.
/// r = 2: weighted mean. dimension 1: weighted median (r = 1), bisection on
/// the derivative (r > 1), golden section plus data-point candidates
/// (0 < r < 1). dimension 2: Weiszfeld with the Vardi-Zhang correction
/// (r = 1), damped reweighted fixed point (r > 1); r < 1 is unsupported.
Point r_center(std::span<const Point> points, std::span<const double> weights, double r,
               int dimension, double tol = 1e-13, int max_iters = 20000);

/// sum_i w_i |x_i - c|^r (uniform weights when empty).
double r_cost(std::span<const Point> points, std::span<const double> weights, Point c, double r);

/// Nearest center per point; ties go to the lowest index.
std::vector<std::size_t> assign(std::span<const Point> points, std::span<const Point> centers);

/// Mean and standard error of d(x_i, centers)^r over the sample.
DistortionEstimate distortion(const EmpiricalMeasure& empirical, std::span<const Point> centers,
                              double r);
DistortionEstimate distortion(std::span<const Point> points, std::span<const Point> centers,
                              double r);

struct LloydOptions {
  std::uint64_t seed = 0;
  int max_iters = 300;
  /// Stop when the relative distortion decrease falls below this.
  double tol = 1e-10;
  int restarts = 5;
};

/// Alternating assignment / r-center updates from D^r-weighted seeding, best of
/// `restarts` runs. The recorded distortion sequence is non-increasing.
Quantizer lloyd(const EmpiricalMeasure& empirical, std::size_t n, double r,
                const LloydOptions& opts = {});
Quantizer lloyd(std::span<const Point> points, int dimension, std::size_t n, double r,
                const LloydOptions& opts = {});

}  // namespace qcoef
